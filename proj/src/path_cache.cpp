#include "anderson/errors.hpp"
#include "anderson/noise.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace anderson {

namespace {

static_assert(std::endian::native == std::endian::little,
              "path cache I/O assumes a little-endian host");

constexpr std::array<char, 4> kMagic = {'A', 'N', 'D', '1'};
constexpr std::size_t kHeaderBytes = 40;

template <class T>
void put(std::ofstream& out, T v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in)
{
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) {
        throw FormatError("path cache: truncated header");
    }
    return v;
}

} // namespace

void write_path_cache(const BrownianPath& b, const std::filesystem::path& file)
{
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("path cache: cannot open " + file.string());
    }
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kPathCacheVersion);
    put<std::uint64_t>(out, b.n());
    put<double>(out, b.grid.dx());
    put<std::uint64_t>(out, b.seed);
    put<std::uint64_t>(out, b.replica);
    out.write(reinterpret_cast<const char*>(b.values.data()),
              static_cast<std::streamsize>(b.values.size() * sizeof(double)));
    if (!out) {
        throw FormatError("path cache: write failed for " + file.string());
    }
}

BrownianPath read_path_cache(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw FormatError("path cache: cannot open " + file.string());
    }
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw FormatError("path cache: bad magic in " + file.string());
    }
    const auto version = get<std::uint32_t>(in);
    if (version != kPathCacheVersion) {
        throw FormatError("path cache: unsupported version " + std::to_string(version));
    }
    const auto n = get<std::uint64_t>(in);
    const auto dx = get<double>(in);
    const auto seed = get<std::uint64_t>(in);
    const auto replica = get<std::uint64_t>(in);
    static_assert(4 + 4 + 8 + 8 + 8 + 8 == kHeaderBytes);

    const Grid grid = Grid::from_step(dx, n);
    std::vector<double> values(n + 1);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!in) {
        throw FormatError("path cache: truncated payload in " + file.string());
    }
    return path_from_values(grid, std::move(values), seed, replica);
}

} // namespace anderson
