#pragma once

#include "anderson/eigen.hpp"
#include "anderson/noise.hpp"
#include "anderson/riccati.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace anderson {

inline constexpr double kShapeHalfWidth = 4.0;
inline constexpr std::size_t kShapePoints = 81;

/// The fixed t-grid of the shape samples: kShapePoints values on [-T, T].
std::vector<double> shape_grid();

struct DecayFit {
    double slope = 0.0;     ///< d ln|phi| / d|t - U| on the fitted domain
    double intercept = 0.0;
    double residual = 0.0;  ///< RMS residual of the fit
    std::size_t points = 0;
    bool pass = false;      ///< slope in [-(sqrt a + 3 kappa), -(sqrt a - 3 kappa)]
    /// Median over interior zeros of the sup relative error of
    /// |phi'(z)| sinh(sqrt(a)|t - z|) / sqrt(a) against |phi| on the excluded ball.
    double near_zero_error = 0.0;
};

/// Per-realization record. Index j of every per-k array refers to the
/// (j+1)-th eigenpair.
struct SpectralReport {
    std::uint64_t seed = 0;
    std::uint64_t replica = 0;
    std::uint64_t fingerprint = 0; ///< path_fingerprint of the driving path
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    double L = 0.0;
    double dx = 0.0;
    double a_L = 0.0;

    std::vector<double> lambdas;
    std::vector<double> rescaled; ///< 4 sqrt(a_L) (lambda + a_L)
    std::vector<double> centers;  ///< U_k
    std::vector<double> peaks;    ///< max |phi_k|

    std::vector<std::vector<double>> h; ///< sqrt(2) a^{-1/4} |phi_k(U_k + t / sqrt a)|
    std::vector<std::vector<double>> b; ///< (B(U_k + t / sqrt a) - B(U_k)) / sqrt a

    std::vector<DecayFit> decay;
    std::vector<bool> decay_valid;

    std::vector<std::vector<double>> zeros;      ///< interior zeros
    std::vector<std::vector<LocalMax>> maxima;   ///< one per nodal interval
    /// local_shape[j][m]: sup_{|t| <= 2} |phi(c + t/sqrt a)/phi(c) - 1/cosh t|
    /// for the m-th smallest of the centres U_1..U_{j+1}.
    std::vector<std::vector<double>> local_shape;

    /// ln|lambda^N_k - lambda^D_k| and its sign, from boundary_gap; filled
    /// only by spectral_report_pair (identical in both reports).
    std::vector<double> log_dn_gap;
    std::vector<signed char> dn_gap_sign;

    std::vector<double> thresholds;          ///< rescaled levels r
    std::vector<std::size_t> counts_below;   ///< #{k : x_k < r}, from sturm_count
};

struct RealizationOptions {
    /// Rescaled thresholds for the Poisson counts.
    std::vector<double> thresholds{0.0, 0.6931471805599453, 1.0986122886681098};
    /// a_L to use; <= 0 means a_of_L(L).
    double a_L = 0.0;
};

/// Spectral report of one noise realization. The bottom k eigenpairs of the
/// assembled operator are extracted and reduced to the report fields.
SpectralReport spectral_report(const BrownianPath& b, BoundaryCondition bc, std::size_t k,
                               const RealizationOptions& opt = {});

/// Dirichlet and Neumann reports of one path, with the exact eigenvalue gaps.
std::pair<SpectralReport, SpectralReport> spectral_report_pair(const BrownianPath& b,
                                                               std::size_t k,
                                                               const RealizationOptions& opt = {});

/// sample_brownian(Grid(L, dx), seed, replica) followed by spectral_report.
/// Throws DomainError unless 1 <= k <= 32.
SpectralReport run_realization(double L, double dx, std::size_t k, BoundaryCondition bc,
                               std::uint64_t seed, std::uint64_t replica,
                               const RealizationOptions& opt = {});

/// Fit of ln|phi(t)/phi(U)| against |t - U| outside the balls of radius
/// (3/8) ln(a)/sqrt(a) around the zeros, on nodes with |phi| > 1e-280.
/// Throws InsufficientDomain when fewer than 16 nodes remain.
DecayFit fit_decay(const EigenPair& pair, const LocalizationData& loc, double a_L);

struct GumbelResult {
    double ks = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    std::size_t n = 0;
};

/// KS distance of {-x_1} against exp(-e^{-y}). Throws DomainError below
/// min_replicas reports.
GumbelResult gumbel_statistic(std::span<const SpectralReport> reports,
                              std::size_t min_replicas = 100);

struct PoissonInterval {
    double lo;       ///< -inf for the first interval
    double hi;
    double expected; ///< e^hi - e^lo
    double mean;
    double dispersion;
};

struct PoissonResult {
    std::vector<PoissonInterval> intervals;
    std::vector<std::vector<double>> correlation; ///< Pearson between interval counts
};

/// Counts of rescaled eigenvalues in (-inf, r_0], (r_0, r_1], ... Throws
/// DomainError if the reports carry different thresholds.
PoissonResult poisson_counts(std::span<const SpectralReport> reports);

struct CenterStatistics {
    double ks = 0.0;
    double p_value = 0.0;
    double correlation = 0.0; ///< Pearson of U_1/L with x_1
    bool in_unit_interval = true;
};

CenterStatistics center_statistics(std::span<const SpectralReport> reports,
                                   std::size_t min_replicas = 100);

struct ShapeDeviation {
    double h = 0.0; ///< sup_{|t| <= 2} |h_k(t) - 1/cosh t|
    double b = 0.0; ///< sup_{|t| <= 2} |b_k(t) + 2 tanh t|
};

ShapeDeviation shape_deviation(const SpectralReport& report, std::size_t k);

/// Stored fit of the k-th eigenfunction. Throws InsufficientDomain if the
/// fit was not possible for that realization.
DecayFit decay_fit(const SpectralReport& report, std::size_t k);

struct ZeroGeometry {
    double band = 0.0;                  ///< (ln ln a)^2 / sqrt a
    std::vector<double> offset_residual; ///< per interior zero
    std::vector<double> argmax_distance; ///< per interval, own centre excluded
    std::vector<double> amplitude_residual; ///< ln ratio + sqrt(a)|c - U_i|, own centre excluded
    double local_shape_median = 0.0;
    bool sign_alternates = true;
    bool within_band() const noexcept;
};

/// Geometry of the i-th eigenfunction against the centres U_1..U_i.
/// Throws DomainError unless 2 <= i <= number of pairs in the report.
ZeroGeometry zero_geometry(const SpectralReport& report, std::size_t i);

struct NeumannGap {
    std::vector<double> median_log_lambda_gap; ///< median ln(|lambda^N - lambda| sqrt a), per k
    std::vector<double> median_lambda_gap;     ///< exp of the above (may underflow to 0)
    std::vector<double> median_center_gap;     ///< median |U^N - U| sqrt a, per k
    std::size_t ground_violations = 0;         ///< replicas with lambda_1^N > lambda_1
};

/// Throws PairingMismatch unless the i-th reports share seed, replica and path.
NeumannGap neumann_gap(std::span<const SpectralReport> dirichlet,
                       std::span<const SpectralReport> neumann);

struct ExplosionTest {
    double a = 0.0;
    double m = 0.0;
    double ks = 0.0;   ///< KS of zeta(1)/m(a) against Exp(1)
    double mean = 0.0; ///< sample mean of zeta(1)/m(a)
    double dispersion = 0.0; ///< of counts on [0, horizon m(a)]; 0 if not run
    std::vector<double> first;
    std::vector<double> counts;
};

struct ExplosionTestConfig {
    std::uint64_t seed = 1;
    double dt_well = 0.05;
    /// Counting horizon in units of m(a); 0 runs the first explosion only.
    double horizon = 5.0;
    int jobs = 0;
};

/// First explosion times (and optionally counts) of R replicas of X_a
/// started at +infinity. Throws DomainError for a < 2.
ExplosionTest explosion_pp_test(double a, std::size_t reps, const ExplosionTestConfig& cfg = {});

struct HittingEstimate {
    double p = 0.0;
    double standard_error = 0.0;
};

/// Monte-Carlo estimate of P_x[tau_y < tau_z] for dX = (a - X^2)dt + dB,
/// with Brownian-bridge crossing checks between steps.
HittingEstimate hitting_monte_carlo(double a, double x, double y, double z, std::size_t paths,
                                    double dt, std::uint64_t seed);

/// First excursion down to -sqrt(a) of X_a on a sampled path of length L.
ExcursionProfile excursion_diagnostic(double a, double L, double dx, std::uint64_t seed,
                                      std::uint64_t replica);

} // namespace anderson
