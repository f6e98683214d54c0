#include "anderson/operator.hpp"

#include "anderson/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace anderson {

std::string_view to_string(BoundaryCondition bc) noexcept
{
    return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

double TridiagonalOperator::diag_norm() const noexcept
{
    double r = 0.0;
    for (double d : diag) {
        r = std::max(r, std::abs(d));
    }
    return r;
}

double TridiagonalOperator::norm() const noexcept
{
    const std::size_t n = m();
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = std::abs(diag[i]);
        if (i > 0) {
            row += std::abs(offdiag[i - 1]);
        }
        if (i + 1 < n) {
            row += std::abs(offdiag[i]);
        }
        r = std::max(r, row);
    }
    return r;
}

std::pair<double, double> TridiagonalOperator::gershgorin() const noexcept
{
    const std::size_t n = m();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) {
            radius += std::abs(offdiag[i - 1]);
        }
        if (i + 1 < n) {
            radius += std::abs(offdiag[i]);
        }
        lo = std::min(lo, diag[i] - radius);
        hi = std::max(hi, diag[i] + radius);
    }
    return {lo, hi};
}

void TridiagonalOperator::apply(std::span<const double> x, std::span<double> y) const
{
    const std::size_t n = m();
    if (x.size() != n || y.size() != n) {
        throw DomainError("apply: vector length does not match operator");
    }
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) {
            v += offdiag[i - 1] * x[i - 1];
        }
        if (i + 1 < n) {
            v += offdiag[i] * x[i + 1];
        }
        y[i] = v;
    }
}

std::vector<double> node_noise(const WhiteNoiseSample& noise)
{
    const std::size_t n = noise.grid.n();
    std::vector<double> out(n + 1);
    out[0] = noise.xi[0];
    out[n] = noise.xi[n - 1];
    for (std::size_t i = 1; i < n; ++i) {
        out[i] = 0.5 * (noise.xi[i - 1] + noise.xi[i]);
    }
    return out;
}

TridiagonalOperator assemble(const WhiteNoiseSample& noise, BoundaryCondition bc)
{
    const std::size_t n = noise.grid.n();
    if (noise.xi.size() != n) {
        throw DomainError("assemble: noise length does not match grid");
    }
    const double inv = 1.0 / (noise.grid.dx() * noise.grid.dx());
    const std::vector<double> xn = node_noise(noise);

    TridiagonalOperator op{noise.grid, bc, {}, {}};
    if (bc == BoundaryCondition::Dirichlet) {
        op.diag.resize(n - 1);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            op.diag[j] = 2.0 * inv + xn[j + 1];
        }
    } else {
        op.diag.resize(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            op.diag[j] = 2.0 * inv + xn[j];
        }
        op.diag.front() = inv + xn[0];
        op.diag.back() = inv + xn[n];
    }
    op.offdiag.assign(op.diag.size() - 1, -inv);
    return op;
}

double pivot_floor(const TridiagonalOperator& op) noexcept
{
    double e2 = 1.0;
    for (double e : op.offdiag) {
        e2 = std::max(e2, e * e);
    }
    return std::numeric_limits<double>::min() * e2;
}

std::size_t sturm_count(const TridiagonalOperator& op, double lam)
{
    const std::size_t n = op.m();
    const double pivmin = pivot_floor(op);
    const double* d = op.diag.data();
    const double* e = op.offdiag.data();

    double q = d[0] - lam;
    if (std::abs(q) < pivmin) {
        q = -pivmin;
    }
    std::size_t count = q <= 0.0 ? 1 : 0;
    for (std::size_t i = 1; i < n; ++i) {
        q = d[i] - lam - e[i - 1] * e[i - 1] / q;
        if (std::abs(q) < pivmin) {
            q = -pivmin;
        }
        count += q <= 0.0 ? 1 : 0;
    }
    return count;
}

namespace {

constexpr std::size_t kLanes = 8;

void sturm_block(const TridiagonalOperator& op, double pivmin, const double* shifts,
                 std::size_t lanes, std::size_t* counts)
{
    std::array<double, kLanes> s{};
    std::array<double, kLanes> q{};
    std::array<std::uint64_t, kLanes> c{};
    for (std::size_t l = 0; l < kLanes; ++l) {
        // pad unused lanes with a duplicate shift; their counts are dropped
        s[l] = shifts[std::min(l, lanes - 1)];
    }
    const std::size_t n = op.m();
    const double* d = op.diag.data();
    const double* e = op.offdiag.data();

#pragma omp simd
    for (std::size_t l = 0; l < kLanes; ++l) {
        double v = d[0] - s[l];
        v = std::abs(v) < pivmin ? -pivmin : v;
        q[l] = v;
        c[l] = v <= 0.0 ? 1 : 0;
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double di = d[i];
        const double e2 = e[i - 1] * e[i - 1];
#pragma omp simd
        for (std::size_t l = 0; l < kLanes; ++l) {
            double v = di - s[l] - e2 / q[l];
            v = std::abs(v) < pivmin ? -pivmin : v;
            q[l] = v;
            c[l] += v <= 0.0 ? 1 : 0;
        }
    }
    for (std::size_t l = 0; l < lanes; ++l) {
        counts[l] = static_cast<std::size_t>(c[l]);
    }
}

void check_spans(std::span<const double> shifts, std::span<std::size_t> counts)
{
    if (shifts.size() != counts.size()) {
        throw DomainError("sturm_count_multi: shifts and counts differ in length");
    }
}

} // namespace

void sturm_count_multi(const TridiagonalOperator& op, std::span<const double> shifts,
                       std::span<std::size_t> counts)
{
    check_spans(shifts, counts);
    if (shifts.empty()) {
        return;
    }
    const double pivmin = pivot_floor(op);
    const auto blocks = static_cast<std::int64_t>((shifts.size() + kLanes - 1) / kLanes);
#pragma omp parallel for schedule(dynamic, 1) if (blocks > 1)
    for (std::int64_t b = 0; b < blocks; ++b) {
        const std::size_t first = static_cast<std::size_t>(b) * kLanes;
        const std::size_t lanes = std::min(kLanes, shifts.size() - first);
        sturm_block(op, pivmin, shifts.data() + first, lanes, counts.data() + first);
    }
}

void sturm_count_multi_serial(const TridiagonalOperator& op, std::span<const double> shifts,
                              std::span<std::size_t> counts)
{
    check_spans(shifts, counts);
    for (std::size_t j = 0; j < shifts.size(); ++j) {
        counts[j] = sturm_count(op, shifts[j]);
    }
}

} // namespace anderson
