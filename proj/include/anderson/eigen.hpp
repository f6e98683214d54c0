#pragma once

#include "anderson/operator.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace anderson {

/// k-th eigenpair of a TridiagonalOperator, expanded to all grid nodes.
///
/// The vector is kept as (log|phi|, sign) next to the plain values: far from
/// the localization centre |phi| drops below the double range at large L,
/// while zero positions and decay fits still need its sign and magnitude.
struct EigenPair {
    std::size_t k = 0; // 1-based
    double lambda = 0.0;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    Grid grid;
    std::vector<double> phi;        // n + 1 nodes; sum phi^2 dx = 1
    std::vector<double> log_abs;    // -inf where phi is exactly zero
    std::vector<signed char> sign;  // -1, 0, +1
    double residual = 0.0;          // ||H phi - lambda phi|| / ||phi|| at the last iterate
};

/// Bisection tolerance used when the caller passes tol <= 0:
/// 1e-10 * max(1, ||diag||_inf).
double default_tolerance(const TridiagonalOperator& op) noexcept;

struct EigenBracket {
    double lo;
    double hi;
};

/// Brackets of width <= tol around the k smallest eigenvalues, found by
/// simultaneous bisection of all k intervals with the multi-shift Sturm count.
std::vector<EigenBracket> bracket_eigenvalues(const TridiagonalOperator& op, std::size_t k,
                                              double tol);

/// Bottom k eigenpairs. Eigenvalues come from bracket_eigenvalues; vectors
/// from Rayleigh quotient iteration on twisted factorizations, started at the
/// bracket midpoint. Throws NonConvergence if the residual stays above
/// 1e-8 ||H|| after 50 iterations.
std::vector<EigenPair> bottom_eigenpairs(const TridiagonalOperator& op, std::size_t k,
                                         double tol = 0.0);

/// ||H phi - lambda phi||_2 / ||phi||_2 evaluated in plain arithmetic.
double eigen_residual(const TridiagonalOperator& op, const EigenPair& pair);

/// sum_i phi_a[i] phi_b[i] dx, accumulated in the log domain.
double inner_product(const EigenPair& a, const EigenPair& b);

struct SignedLog {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;
};

/// lambda^N - lambda^D of a Dirichlet and a Neumann pair of the same noise,
/// from (lambda^N - lambda^D) <u, v> = -(u_0 v_1 + u_n v_{n-1}) / dx with u
/// the Neumann and v the Dirichlet vector. Exact for the two matrices and
/// resolved far below the rounding level of either eigenvalue. Falls back to
/// the plain difference when the vectors are not paired (|<u, v>| < 1/2).
SignedLog boundary_gap(const EigenPair& dirichlet, const EigenPair& neumann);

struct LocalMax {
    double x;
    double value;   // |phi| at the maximum (may underflow to 0)
    double log_abs; // log|phi| at the maximum
};

struct LocalizationData {
    double U = 0.0;    // first argmax of |phi|
    std::size_t U_node = 0;
    double peak = 0.0; // max |phi|
    std::vector<double> zeros;     // increasing; Dirichlet includes 0 and L
    std::vector<LocalMax> maxima;  // one per interval between consecutive zeros
};

/// Zeros by sign change with linear interpolation (exact node zeros kept).
/// For Neumann, the intervals for the maxima are closed off by 0 and L.
LocalizationData localization_data(const EigenPair& pair);

/// Mass of the rescaled measure L phi^2(tL) dt on [t0, t1]. The integrand is
/// the piecewise-linear interpolant of phi^2; for Neumann the half cells at the
/// domain ends are added so that the total equals the discrete norm.
double rescaled_measure_mass(const EigenPair& pair, double t0, double t1);

} // namespace anderson
