#include "anderson/noise.hpp"

#include "anderson/errors.hpp"
#include "anderson/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>

namespace anderson {

Grid::Grid(double length, double dx) : length_(length), dx_(dx), n_(0)
{
    if (!(dx > 0.0) || !(length > 0.0) || !std::isfinite(length) || !std::isfinite(dx)) {
        throw DomainError("grid: length and dx must be positive and finite");
    }
    const double cells = std::round(length / dx);
    if (cells < 2.0) {
        throw DomainError("grid: need at least 2 cells");
    }
    if (std::abs(cells * dx - length) > dx * 1e-9) {
        throw DomainError("grid: length " + std::to_string(length) + " is not a multiple of dx " +
                          std::to_string(dx));
    }
    n_ = static_cast<std::size_t>(cells);
}

Grid Grid::from_points(double length, std::size_t cells)
{
    if (cells < 2 || !(length > 0.0)) {
        throw DomainError("grid: need at least 2 cells and positive length");
    }
    return Grid(length, length / static_cast<double>(cells), cells);
}

Grid Grid::from_step(double dx, std::size_t cells)
{
    if (cells < 2 || !(dx > 0.0)) {
        throw DomainError("grid: need at least 2 cells and positive dx");
    }
    return Grid(static_cast<double>(cells) * dx, dx, cells);
}

double BrownianPath::at(double t) const noexcept
{
    const double dx = grid.dx();
    const double s = std::clamp(t / dx, 0.0, static_cast<double>(grid.n()));
    const auto i = std::min(static_cast<std::size_t>(s), grid.n() - 1);
    const double w = s - static_cast<double>(i);
    return values[i] + w * (values[i + 1] - values[i]);
}

namespace {

BrownianPath accumulate(const Grid& grid, std::vector<double>& values, std::uint64_t seed,
                        std::uint64_t replica)
{
    // values[i + 1] holds the increment; serial prefix sum keeps the
    // rounding independent of how the increments were produced.
    values[0] = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        values[i] += values[i - 1];
    }
    return BrownianPath{grid, std::move(values), seed, replica, 0, nullptr};
}

} // namespace

BrownianPath sample_brownian(const Grid& grid, std::uint64_t seed, std::uint64_t replica)
{
    const rng::Gaussian gauss(seed, static_cast<std::uint32_t>(rng::Stream::Path));
    const double sd = std::sqrt(grid.dx());
    const auto n = static_cast<std::int64_t>(grid.n());
    std::vector<double> values(grid.n() + 1);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        values[static_cast<std::size_t>(i) + 1] = sd * gauss(replica, static_cast<std::uint64_t>(i));
    }
    return accumulate(grid, values, seed, replica);
}

BrownianPath sample_brownian_serial(const Grid& grid, std::uint64_t seed, std::uint64_t replica)
{
    const rng::Gaussian gauss(seed, static_cast<std::uint32_t>(rng::Stream::Path));
    const double sd = std::sqrt(grid.dx());
    std::vector<double> values(grid.n() + 1);
    for (std::size_t i = 0; i < grid.n(); ++i) {
        values[i + 1] = sd * gauss(replica, i);
    }
    return accumulate(grid, values, seed, replica);
}

BrownianPath zero_path(const Grid& grid)
{
    return BrownianPath{grid, std::vector<double>(grid.n() + 1, 0.0), 0, 0, 0, nullptr};
}

BrownianPath path_from_values(const Grid& grid, std::vector<double> values, std::uint64_t seed,
                              std::uint64_t replica)
{
    if (values.size() != grid.n() + 1) {
        throw DomainError("path: expected n + 1 node values");
    }
    if (values[0] != 0.0) {
        throw DomainError("path: B(0) must be 0");
    }
    return BrownianPath{grid, std::move(values), seed, replica, 0, nullptr};
}

BrownianPath reverse_brownian(const BrownianPath& b)
{
    const std::size_t n = b.n();
    if (b.reversal_of) {
        return BrownianPath{b.grid, *b.reversal_of, b.seed, b.replica, b.level, nullptr};
    }
    std::vector<double> v(n + 1);
    const double end = b.values[n];
    for (std::size_t i = 0; i <= n; ++i) {
        v[i] = b.values[n - i] - end;
    }
    v[0] = 0.0; // exact, independent of the sign of zero
    return BrownianPath{b.grid, std::move(v), b.seed, b.replica, b.level,
                        std::make_shared<const std::vector<double>>(b.values)};
}

BrownianPath negate(const BrownianPath& b)
{
    BrownianPath out = b;
    out.reversal_of.reset();
    for (double& v : out.values) {
        v = -v;
    }
    out.values[0] = 0.0;
    return out;
}

BrownianPath refine_brownian(const BrownianPath& b)
{
    const std::size_t n = b.n();
    const Grid fine = Grid::from_points(b.grid.length(), 2 * n);
    const rng::Gaussian gauss(b.seed, static_cast<std::uint32_t>(rng::Stream::Bridge) + b.level);
    // midpoint of a bridge over a cell of width h has variance h / 4
    const double sd = 0.5 * std::sqrt(b.grid.dx());
    std::vector<double> v(2 * n + 1);
    const auto cells = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < cells; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        v[2 * i] = b.values[i];
        v[2 * i + 1] = 0.5 * (b.values[i] + b.values[i + 1]) + sd * gauss(b.replica, i);
    }
    v[2 * n] = b.values[n];
    return BrownianPath{fine, std::move(v), b.seed, b.replica, b.level + 1, nullptr};
}

WhiteNoiseSample white_noise(const BrownianPath& b)
{
    const double dx = b.grid.dx();
    std::vector<double> xi(b.n());
    for (std::size_t i = 0; i < xi.size(); ++i) {
        xi[i] = (b.values[i + 1] - b.values[i]) / dx;
    }
    return WhiteNoiseSample{b.grid, std::move(xi)};
}

std::uint64_t path_fingerprint(const BrownianPath& b) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (double v : b.values) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int k = 0; k < 8; ++k) {
            h ^= (bits >> (8 * k)) & 0xFFu;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

} // namespace anderson
