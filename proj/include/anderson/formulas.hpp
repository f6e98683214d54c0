#pragma once

#include <memory>
#include <vector>

namespace anderson {

/// ln m(a), m(a) = sqrt(2 pi) int_0^inf v^{-1/2} exp(2 a v - v^3 / 6) dv, the
/// mean first explosion time of X_a started at +infinity.
double log_mean_explosion_time(double a);

/// Closed form m(0) = sqrt(2 pi) 6^{1/6} Gamma(1/6) / 3.
double mean_explosion_time_at_zero();

struct DerivedScales {
    double a_L;
    double t_L;     ///< ln(a_L) / sqrt(a_L)
    double h_L;     ///< ln(a_L) / a_L^{1/4}
    double kappa_L; ///< ln(a_L)^2 / a_L^{1/4}
};

DerivedScales scales_from_a(double a_L);

/// Solves ln m(a) = ln L to |da| < 1e-10. Throws OutOfRange if L <= m(0).
DerivedScales a_of_L(double L);

/// Two-term large-L expansion of a_L.
double a_L_expansion(double L);

/// Integrated density of states per unit length, N(lambda) = 1 / m(-lambda).
double density_of_states(double lambda);

/// V_a(x) = x^3 / 3 - a x.
double potential(double a, double x) noexcept;

/// ln S(x), S(x) = int_{-inf}^x exp(2 V_a(u)) du.
double log_scale_function(double a, double x);

/// Stationary density f_a(x) = (2 / m(a)) exp(-2 V_a(x)) S(x) of the
/// restarted diffusion.
double invariant_density(double a, double x);
double log_invariant_density(double a, double x);

/// P_x[tau_y < tau_z] = (S(z) - S(x)) / (S(z) - S(y)) for y < x < z.
/// Throws DomainError unless y < x < z.
double hitting_probability(double a, double x, double y, double z);

/// int_lo^hi f_a(x) dx.
double invariant_mass(double a, double lo, double hi);

/// ln m tabulated on a uniform a-grid with monotone cubic (PCHIP)
/// interpolation, for repeated a_L lookups.
class ScalingTable {
public:
    ScalingTable(double a_min, double a_max, std::size_t points);

    const std::vector<double>& a_values() const noexcept { return a_; }
    const std::vector<double>& log_m() const noexcept { return log_m_; }
    int order() const noexcept { return 3; }

    double interpolate_log_m(double a) const;
    /// a with ln m(a) = ln L, by the inverse interpolant.
    double a_of_L(double L) const;

private:
    struct Impl;
    std::vector<double> a_;
    std::vector<double> log_m_;
    std::shared_ptr<const Impl> impl_;
};

} // namespace anderson
