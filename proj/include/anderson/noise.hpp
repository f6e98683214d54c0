#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

namespace anderson {

/// Uniform grid on [0, L] with n cells of width dx.
class Grid {
public:
    /// Throws DomainError unless dx > 0, n >= 2 and |n dx - L| <= 1e-9 dx.
    Grid(double length, double dx);
    /// Empty placeholder (n == 0); not a valid domain.
    Grid() = default;

    static Grid from_points(double length, std::size_t cells);
    /// Grid with an exact step; length is cells * dx.
    static Grid from_step(double dx, std::size_t cells);

    double length() const noexcept { return length_; }
    double dx() const noexcept { return dx_; }
    /// Number of cells; nodes are 0..n.
    std::size_t n() const noexcept { return n_; }
    double x(std::size_t i) const noexcept { return static_cast<double>(i) * dx_; }

    bool operator==(const Grid& other) const noexcept { return n_ == other.n_ && dx_ == other.dx_; }

private:
    Grid(double length, double dx, std::size_t n) : length_(length), dx_(dx), n_(n) {}

    double length_ = 0.0;
    double dx_ = 0.0;
    std::size_t n_ = 0;
};

/// Brownian motion sampled on the nodes of a grid: values[i] = B(i dx).
struct BrownianPath {
    Grid grid;
    std::vector<double> values; // n + 1 entries, values[0] == 0
    std::uint64_t seed = 0;
    std::uint64_t replica = 0;
    /// Number of Brownian-bridge halvings applied since sampling.
    std::uint32_t level = 0;
    /// Node values of the path this one was reversed from. Reversing again
    /// returns them unchanged, which makes reversal an exact involution.
    std::shared_ptr<const std::vector<double>> reversal_of;

    std::size_t n() const noexcept { return grid.n(); }
    double increment(std::size_t i) const noexcept { return values[i + 1] - values[i]; }
    /// Linear interpolation of B at an arbitrary point of [0, L].
    double at(double t) const noexcept;
};

/// White noise attributed to cells: xi[i] = (B((i+1)dx) - B(i dx)) / dx.
struct WhiteNoiseSample {
    Grid grid;
    std::vector<double> xi; // n entries
};

/// Sample B on `grid` from the counter-based generator keyed by
/// (seed, replica, increment index). Increments are drawn in parallel and
/// accumulated serially, so the result does not depend on the thread count.
BrownianPath sample_brownian(const Grid& grid, std::uint64_t seed, std::uint64_t replica);

/// Single-threaded reference for sample_brownian; bit-identical output.
BrownianPath sample_brownian_serial(const Grid& grid, std::uint64_t seed, std::uint64_t replica);

/// B(t) == 0 on the grid.
BrownianPath zero_path(const Grid& grid);

/// Wrap caller-provided node values (values[0] must be 0).
BrownianPath path_from_values(const Grid& grid, std::vector<double> values,
                              std::uint64_t seed = 0, std::uint64_t replica = 0);

/// values'[i] = values[n-i] - values[n].
BrownianPath reverse_brownian(const BrownianPath& b);

/// Pointwise negation -B (the driving path of the reflected Riccati flow).
BrownianPath negate(const BrownianPath& b);

/// Halve dx by inserting Brownian-bridge midpoints. The coarse nodes are kept
/// exactly, so the refined path is the same noise seen at a finer resolution.
BrownianPath refine_brownian(const BrownianPath& b);

WhiteNoiseSample white_noise(const BrownianPath& b);

/// FNV-1a over the node values; used to certify that two runs shared a path.
std::uint64_t path_fingerprint(const BrownianPath& b) noexcept;

// Binary cache: 40-byte little-endian header
//   magic "AND1" | version u32 | n u64 | dx f64 | seed u64 | replica u64
// followed by n + 1 little-endian f64 node values.
inline constexpr std::uint32_t kPathCacheVersion = 1;

void write_path_cache(const BrownianPath& b, const std::filesystem::path& file);
BrownianPath read_path_cache(const std::filesystem::path& file);

} // namespace anderson
