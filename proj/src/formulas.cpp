#include "anderson/formulas.hpp"

#include "anderson/errors.hpp"

#include <cmath>
// Boost 1.74 pchip calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <tuple>
#include <string>

namespace anderson {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kRelTol = 1e-12;
constexpr std::size_t kMaxPanels = 4000;
// lower clamp on log integrands
constexpr double kLogFloor = -600.0;

/// Globally adaptive Gauss-Kronrod over the pieces defined by `cuts`:
/// the panel with the largest error estimate is bisected until the summed
/// error is below rel_tol times the total.
template <class G>
double adaptive_integral(G g, const std::vector<double>& cuts, double rel_tol)
{
    struct Panel {
        double lo;
        double hi;
        double value;
        double error;
    };
    auto eval = [&g](double lo, double hi) {
        double err = 0.0;
        const double v = gauss_kronrod<double, 31>::integrate(g, lo, hi, 0, 0.0, &err);
        return Panel{lo, hi, v, err};
    };
    auto by_error = [](const Panel& x, const Panel& y) { return x.error < y.error; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(by_error)> heap(by_error);
    double total = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] > cuts[i]) {
            heap.push(eval(cuts[i], cuts[i + 1]));
        }
    }
    auto sums = [&heap]() {
        auto copy = heap;
        double v = 0.0;
        double e = 0.0;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            copy.pop();
        }
        return std::pair{v, e};
    };
    std::tie(total, error) = sums();
    while (!heap.empty() && error > rel_tol * std::abs(total) && heap.size() < kMaxPanels) {
        const Panel p = heap.top();
        if (p.error <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(p.value)) {
            break;
        }
        heap.pop();
        const double mid = 0.5 * (p.lo + p.hi);
        if (!(mid > p.lo && mid < p.hi)) {
            heap.push(p);
            break;
        }
        const Panel l = eval(p.lo, mid);
        const Panel r = eval(mid, p.hi);
        total += l.value + r.value - p.value;
        error += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
    }
    return sums().first;
}

/// int exp(f) over the consecutive pieces defined by `cuts`
/// (sorted, lo and hi included).
template <class F>
double integrate_pieces(F f, const std::vector<double>& cuts)
{
    return adaptive_integral([&f](double u) { return std::exp(std::max(f(u), kLogFloor)); }, cuts,
                             kRelTol);
}

std::vector<double> sorted_cuts(double lo, double hi, std::initializer_list<double> inner)
{
    std::vector<double> c{lo};
    for (double x : inner) {
        if (x > lo && x < hi) {
            c.push_back(x);
        }
    }
    c.push_back(hi);
    std::sort(c.begin(), c.end());
    return c;
}

double log_m_uncached(double a)
{
    // v = w^2 turns the integrand into 2 exp(2 a w^2 - w^6 / 6) on [0, inf)
    const double peak = a > 0.0 ? (8.0 / 3.0) * std::pow(a, 1.5) : 0.0;
    auto phase = [a, peak](double w) {
        const double w2 = w * w;
        return 2.0 * a * w2 - w2 * w2 * w2 / 6.0 - peak;
    };
    const double ws = a > 0.0 ? std::pow(4.0 * a, 0.25) : 0.0;
    double upper = ws + 1.0;
    while (phase(upper) > -60.0) {
        upper *= 1.5;
    }
    const double width = a < 0.0 ? 1.0 / std::sqrt(-4.0 * a + 1.0) : 1.0;
    const std::vector<double> cuts =
        sorted_cuts(0.0, upper, {0.5 * ws, ws, 1.5 * ws, width, 4.0 * width});
    const double integral = 2.0 * integrate_pieces(phase, cuts);
    return 0.5 * std::log(2.0 * std::numbers::pi) + peak + std::log(integral);
}

double two_v(double a, double x) noexcept
{
    return 2.0 * (x * x * x / 3.0 - a * x);
}

/// 2V(u) - 2V(p) without cancellation.
double two_v_diff(double a, double u, double p) noexcept
{
    return 2.0 * (u - p) * ((u * u + u * p + p * p) / 3.0 - a);
}

/// Point of [lo, hi] where 2V is largest.
double argmax_two_v(double a, double lo, double hi)
{
    double best = two_v_diff(a, hi, lo) > 0.0 ? hi : lo;
    if (a > 0.0) {
        const double c = -std::sqrt(a); // local maximum of V
        if (c > lo && c < hi && two_v_diff(a, c, best) > 0.0) {
            best = c;
        }
    }
    return best;
}

std::vector<double> v_cuts(double a, double lo, double hi)
{
    const double s = a > 0.0 ? std::sqrt(a) : 0.0;
    // short pieces next to each end resolve steep exponential edges
    const double el = 1.0 / (2.0 * std::abs(lo * lo - a) + 1.0);
    const double eh = 1.0 / (2.0 * std::abs(hi * hi - a) + 1.0);
    return sorted_cuts(lo, hi, {-s, s, 0.0, lo + el, lo + 10.0 * el, hi - eh, hi - 10.0 * eh});
}

/// Point far enough left of `from` that exp(2V - 2V(p)) is negligible below it.
double left_cutoff(double a, double from, double p)
{
    double step = 1.0 / (2.0 * std::abs(from * from - a) + 1.0);
    double y = from - step;
    while (two_v_diff(a, y, p) > -60.0) {
        step *= 2.0;
        y = from - step;
    }
    return y;
}

/// int_lo^hi exp(2V(u) - 2V(p)) du, integrated in t = u - p.
double integral_2v(double a, double lo, double hi, double p)
{
    std::vector<double> cuts = v_cuts(a, lo, hi);
    for (double& c : cuts) {
        c -= p;
    }
    return integrate_pieces(
        [a, p](double t) { return 2.0 * t * (p * p + p * t + t * t / 3.0 - a); }, cuts);
}

/// ln S(x) - 2V(x).
double log_s_minus_2v(double a, double x)
{
    const double from = a > 0.0 ? std::min(x, -std::sqrt(a)) : x;
    const double p = argmax_two_v(a, from, x);
    const double lo = left_cutoff(a, from, p);
    return std::log(integral_2v(a, lo, x, p)) - two_v_diff(a, x, p);
}

} // namespace

double mean_explosion_time_at_zero()
{
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(6.0, 1.0 / 6.0) * std::tgamma(1.0 / 6.0) /
           3.0;
}

double log_mean_explosion_time(double a)
{
    if (!std::isfinite(a)) {
        throw DomainError("log_mean_explosion_time: a must be finite");
    }
    return log_m_uncached(a);
}

DerivedScales scales_from_a(double a_L)
{
    const double la = std::log(a_L);
    const double q = std::pow(a_L, 0.25);
    return {a_L, la / std::sqrt(a_L), la / q, la * la / q};
}

DerivedScales a_of_L(double L)
{
    const double m0 = mean_explosion_time_at_zero();
    if (!(L > m0)) {
        throw OutOfRange("a_of_L: L = " + std::to_string(L) + " must exceed m(0) = " +
                         std::to_string(m0));
    }
    const double target = std::log(L);
    auto f = [target](double a) { return log_mean_explosion_time(a) - target; };
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    std::uintmax_t iters = 200;
    const auto [r0, r1] = boost::math::tools::toms748_solve(
        f, lo, hi, [](double x, double y) { return std::abs(y - x) < 1e-11; }, iters);
    return scales_from_a(0.5 * (r0 + r1));
}

double a_L_expansion(double L)
{
    const double lnL = std::log(L);
    return std::pow(0.375 * lnL, 2.0 / 3.0) +
           std::pow(3.0, -1.0 / 3.0) * 0.5 * std::pow(lnL, -1.0 / 3.0) *
               std::log(std::cbrt(3.0) / (2.0 * std::numbers::pi) * std::cbrt(lnL));
}

double density_of_states(double lambda)
{
    return std::exp(-log_mean_explosion_time(-lambda));
}

double potential(double a, double x) noexcept
{
    return x * x * x / 3.0 - a * x;
}

double log_scale_function(double a, double x)
{
    return log_s_minus_2v(a, x) + two_v(a, x);
}

double log_invariant_density(double a, double x)
{
    return std::log(2.0) - log_mean_explosion_time(a) + log_s_minus_2v(a, x);
}

double invariant_density(double a, double x)
{
    return std::exp(log_invariant_density(a, x));
}

double hitting_probability(double a, double x, double y, double z)
{
    if (!(y < x && x < z)) {
        throw DomainError("hitting_probability: need y < x < z");
    }
    const double p = argmax_two_v(a, y, z);
    const double upper = integral_2v(a, x, z, p);
    const double lower = integral_2v(a, y, x, p);
    return upper / (upper + lower);
}

double invariant_mass(double a, double lo, double hi)
{
    if (!(lo < hi)) {
        throw DomainError("invariant_mass: need lo < hi");
    }
    const double s = a > 0.0 ? std::sqrt(a) : 0.0;
    const double lm = log_mean_explosion_time(a);
    const std::vector<double> cuts =
        sorted_cuts(lo, hi, {-s, s, 0.0, s - 1.0, s + 1.0, -2.0, 2.0, -10.0, 10.0});
    return adaptive_integral([a, lm](double u) { return std::exp(std::max(std::log(2.0) - lm + log_s_minus_2v(a, u), kLogFloor)); }, cuts, 1e-11);
}

struct ScalingTable::Impl {
    boost::math::interpolators::pchip<std::vector<double>> forward;
    boost::math::interpolators::pchip<std::vector<double>> inverse;
};

ScalingTable::ScalingTable(double a_min, double a_max, std::size_t points)
{
    if (points < 4 || !(a_min < a_max)) {
        throw DomainError("ScalingTable: need at least 4 points and a_min < a_max");
    }
    a_.resize(points);
    log_m_.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
        a_[i] = a_min + (a_max - a_min) * static_cast<double>(i) / static_cast<double>(points - 1);
        log_m_[i] = log_mean_explosion_time(a_[i]);
    }
    impl_ = std::make_shared<const Impl>(
        Impl{boost::math::interpolators::pchip<std::vector<double>>(std::vector<double>(a_),
                                                                    std::vector<double>(log_m_)),
             boost::math::interpolators::pchip<std::vector<double>>(std::vector<double>(log_m_),
                                                                    std::vector<double>(a_))});
}

double ScalingTable::interpolate_log_m(double a) const
{
    if (a < a_.front() || a > a_.back()) {
        throw OutOfRange("ScalingTable: a outside the tabulated range");
    }
    return impl_->forward(a);
}

double ScalingTable::a_of_L(double L) const
{
    const double l = std::log(L);
    if (!(l >= log_m_.front() && l <= log_m_.back())) {
        throw OutOfRange("ScalingTable: L outside the tabulated range");
    }
    return impl_->inverse(l);
}

} // namespace anderson
