#pragma once

#include "anderson/noise.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace anderson {

enum class Start {
    PlusInfinity, ///< Dirichlet condition at 0
    Zero,         ///< Neumann condition at 0
};

struct RiccatiConfig {
    double x_max = 100.0;  ///< explosion cap M
    double x_mono = 2.0;   ///< |X| above this triggers substepping
    int substeps = 4;
    bool record_samples = true;

    /// X_max = 10 max(sqrt|a|, 10), X_mono = 2 sqrt(|a| + 1), 4 substeps.
    static RiccatiConfig defaults(double a);
    void validate() const;
};

// Closed-form pieces of the deterministic flow x' = a - x^2.

/// Time for the flow started at x to reach -infinity (+infinity if never).
double time_to_minus_infinity(double a, double x) noexcept;
/// Time from +infinity down to +M; equal to the time from -M to -infinity.
double tail_half(double a, double M) noexcept;
/// Total time spent beyond the cap per explosion: -M -> -inf, +inf -> +M.
double tail_time(double a, double M) noexcept;
/// Flow map over time tau, valid while the flow stays finite.
double drift_flow(double a, double x, double tau) noexcept;

enum class SampleEvent : std::uint8_t { None, Explode, Restart };

struct RiccatiSample {
    double t;
    double x; // clipped to [-x_max, x_max]
    SampleEvent event;
};

struct Restart {
    double t_explode; // flow reached -M
    double t_restart; // flow resumed from +M
};

struct RiccatiTrajectory {
    double a = 0.0;
    Start start = Start::PlusInfinity;
    Grid grid;
    RiccatiConfig cfg;
    bool reversed = false; ///< samples are -Y for the reflected flow Y

    std::vector<RiccatiSample> samples; ///< node samples plus event samples
    std::vector<double> zeta;           ///< explosion times in (0, L]
    std::vector<Restart> restarts;      ///< one per entry of zeta
    double x_end = 0.0;                 ///< X(L); +-inf when inside a tail at L
    bool exploded_at_end = false;

    std::size_t count() const noexcept { return zeta.size(); }
    /// Node samples only (n + 1 values); requires record_samples.
    std::vector<double> node_values() const;
};

/// Strang splitting on every grid cell: exact half flow, add dB, exact half
/// flow. Cells starting with |X| > x_mono are split into `substeps` equal
/// parts. Reaching -x_max is an explosion; the path is resumed from +x_max
/// after tail_time(a, x_max) and the explosion time is the passage at -inf.
/// Throws StepTooCoarse if dx x_max > 0.5.
RiccatiTrajectory integrate(double a, const BrownianPath& b, Start start,
                            const RiccatiConfig& cfg);
RiccatiTrajectory integrate(double a, const BrownianPath& b, Start start);

/// Same scheme from a finite initial value.
RiccatiTrajectory integrate_from(double a, const BrownianPath& b, double x0,
                                 const RiccatiConfig& cfg);

std::size_t explosion_count(double a, const BrownianPath& b, Start start);

/// Number of eigenvalues below -a: explosions for a Dirichlet start; for a
/// Neumann start one more when X(L) <= 0.
std::size_t eigenvalue_count(double a, const BrownianPath& b, Start start);

/// Largest a with eigenvalue_count(a) >= k, bracketed by doubling away from 0
/// and bisected to width tol_a. Returns the final midpoint, an estimate of
/// -lambda_k. Throws BracketFailure if the bracket cannot be established.
double eigenvalue_bisection(const BrownianPath& b, std::size_t k, Start start, double tol_a);

/// The reflected flow dX = (X^2 - a) dt + dB^ from -infinity, where
/// B^(t) = B(L - t) - B(L). Built as -Y with Y the forward flow on -B^.
RiccatiTrajectory reversed_trajectory(double a, const BrownianPath& b, const RiccatiConfig& cfg);
RiccatiTrajectory reversed_trajectory(double a, const BrownianPath& b);

/// Equal counts k and zeta(i-1) <= L - zeta^(k-i+1) <= zeta(i) for i = 1..k,
/// each with slack 2 dx.
bool check_interlacing(const RiccatiTrajectory& fwd, const RiccatiTrajectory& bwd, double L);

/// max_t (X_a(t) - X_a2(t)) over grid nodes before the first explosion of X_a
/// where both values lie in [-x_mono, x_mono]. Both flows start at +infinity
/// and share the configuration of max(|a|, |a2|). Returns 0 when a == a2 and
/// -inf when no node qualifies.
double coupling_gap(double a, double a2, const BrownianPath& b);

enum class ExcursionOutcome { Exploded, Returned };

struct ExcursionProfile {
    double iota;    ///< last hit of sqrt(a) before theta
    double upsilon; ///< last hit of 0 before theta
    double theta;   ///< first hit of -sqrt(a)
    ExcursionOutcome outcome;
    double tanh_deviation;  ///< sup over [iota, theta] of |X - sqrt(a) tanh(-sqrt(a)(t - upsilon))|
    double timing_residual; ///< theta - upsilon - (3/8) ln(a)/sqrt(a)
};

/// Profile of the first excursion of a trajectory down to -sqrt(a), a > 0.
/// Throws NoCrossing if the trajectory never reaches -sqrt(a).
ExcursionProfile excursion_profile(const RiccatiTrajectory& traj, double a);

/// sup over node samples with t in [t0, t1] of |X(t) - sqrt(a) tanh(-sqrt(a)(t - upsilon))|.
double heteroclinic_deviation(const RiccatiTrajectory& traj, double a, double upsilon, double t0,
                              double t1);

// Long-horizon explosion times, with the noise drawn on the fly.

struct StreamingConfig {
    double dt = 1e-3;      ///< step whenever X <= well_floor or |X| > x_mono
    double dt_well = 1e-3; ///< step while well_floor < X <= x_mono
    double well_floor = 0.0;
    RiccatiConfig riccati;

    static StreamingConfig defaults(double a);
};

/// Explosion times of X_a from +infinity up to `horizon`, stopping early once
/// `max_explosions` have been seen (0: no limit). Deterministic in
/// (seed, replica).
std::vector<double> streaming_explosions(double a, double horizon, std::size_t max_explosions,
                                         std::uint64_t seed, std::uint64_t replica,
                                         const StreamingConfig& cfg);

} // namespace anderson
