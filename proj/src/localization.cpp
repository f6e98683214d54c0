#include "anderson/eigen.hpp"

#include "anderson/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anderson {

LocalizationData localization_data(const EigenPair& pair)
{
    const std::size_t n = pair.grid.n();
    const double dx = pair.grid.dx();
    const double L = pair.grid.length();
    LocalizationData out;

    std::size_t arg = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (pair.log_abs[i] > pair.log_abs[arg]) {
            arg = i;
        }
    }
    out.U_node = arg;
    out.U = pair.grid.x(arg);
    out.peak = std::exp(pair.log_abs[arg]);

    std::size_t last = n + 1; // previous node with a nonzero sign
    for (std::size_t i = 0; i <= n; ++i) {
        if (pair.sign[i] == 0) {
            out.zeros.push_back(pair.grid.x(i));
            last = n + 1;
            continue;
        }
        if (last <= n && pair.sign[last] != pair.sign[i]) {
            // |phi_last| / (|phi_last| + |phi_i|), formed from the log ratio
            const double w = 1.0 / (1.0 + std::exp(pair.log_abs[i] - pair.log_abs[last]));
            out.zeros.push_back(pair.grid.x(last) + w * static_cast<double>(i - last) * dx);
        }
        last = i;
    }

    std::vector<double> cuts = out.zeros;
    if (cuts.empty() || cuts.front() > 0.0) {
        cuts.insert(cuts.begin(), 0.0);
    }
    if (cuts.back() < L) {
        cuts.push_back(L);
    }
    for (std::size_t q = 0; q + 1 < cuts.size(); ++q) {
        const auto lo = static_cast<std::size_t>(std::ceil(cuts[q] / dx - 1e-9));
        const auto hi = std::min(n, static_cast<std::size_t>(std::floor(cuts[q + 1] / dx + 1e-9)));
        LocalMax best{0.0, 0.0, -std::numeric_limits<double>::infinity()};
        for (std::size_t i = lo; i <= hi; ++i) {
            if (pair.log_abs[i] > best.log_abs) {
                best = {pair.grid.x(i), 0.0, pair.log_abs[i]};
            }
        }
        if (std::isfinite(best.log_abs)) {
            best.value = std::exp(best.log_abs);
            out.maxima.push_back(best);
        }
    }
    return out;
}

double rescaled_measure_mass(const EigenPair& pair, double t0, double t1)
{
    if (!(0.0 <= t0 && t0 < t1 && t1 <= 1.0)) {
        throw DomainError("rescaled_measure_mass: need 0 <= t0 < t1 <= 1");
    }
    const std::size_t n = pair.grid.n();
    const double dx = pair.grid.dx();
    const double a = t0 * pair.grid.length() / dx; // window in node units
    const double b = t1 * pair.grid.length() / dx;
    auto f = [&](std::size_t i) { return pair.phi[i] * pair.phi[i]; };

    double mass = 0.0;
    const auto first = static_cast<std::size_t>(std::floor(a));
    const auto stop = std::min(n, static_cast<std::size_t>(std::ceil(b)));
    for (std::size_t i = first; i < stop; ++i) {
        // exact integral of the linear interpolant over [i, i+1] clipped to [a, b]
        const double u0 = std::max(a, static_cast<double>(i)) - static_cast<double>(i);
        const double u1 = std::min(b, static_cast<double>(i + 1)) - static_cast<double>(i);
        if (u1 <= u0) {
            continue;
        }
        const double f0 = f(i);
        const double slope = f(i + 1) - f0;
        mass += dx * (f0 * (u1 - u0) + 0.5 * slope * (u1 * u1 - u0 * u0));
    }
    if (pair.bc == BoundaryCondition::Neumann) {
        if (t0 == 0.0) {
            mass += 0.5 * dx * f(0);
        }
        if (t1 == 1.0) {
            mass += 0.5 * dx * f(n);
        }
    }
    return mass;
}

} // namespace anderson
