#pragma once

#include "anderson/noise.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace anderson {

enum class BoundaryCondition { Dirichlet, Neumann };

std::string_view to_string(BoundaryCondition bc) noexcept;

/// Symmetric tridiagonal discretization of -d^2/dx^2 + xi.
///
/// Dirichlet: unknowns are the interior nodes 1..n-1 (m = n-1).
/// Neumann:   unknowns are all nodes 0..n (m = n+1); the ghost value beyond
///            each end is set equal to the end value, so the end rows read
///            (1/dx^2 + xi_node, -1/dx^2).
struct TridiagonalOperator {
    Grid grid;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    std::vector<double> diag;    // m entries
    std::vector<double> offdiag; // m - 1 entries

    std::size_t m() const noexcept { return diag.size(); }
    /// Grid node carried by matrix row j.
    std::size_t node(std::size_t j) const noexcept
    {
        return bc == BoundaryCondition::Dirichlet ? j + 1 : j;
    }
    double diag_norm() const noexcept;
    /// Infinity norm of the matrix.
    double norm() const noexcept;
    /// Gershgorin enclosure [lo, hi] of the spectrum.
    std::pair<double, double> gershgorin() const noexcept;
    /// y = H x.
    void apply(std::span<const double> x, std::span<double> y) const;
};

/// Noise value attributed to each node (n + 1 entries): the centred average
/// (xi[i-1] + xi[i]) / 2 inside, the adjacent cell value at the ends.
std::vector<double> node_noise(const WhiteNoiseSample& noise);

TridiagonalOperator assemble(const WhiteNoiseSample& noise, BoundaryCondition bc);

/// Number of eigenvalues strictly below `lam`, from the pivots of the shifted
/// LDL^T factorization (tiny pivots are replaced by -pivmin).
std::size_t sturm_count(const TridiagonalOperator& op, double lam);

/// Counts for many shifts in one sweep over the matrix. Shifts are processed
/// in SIMD lanes and the lanes are distributed over OpenMP threads.
void sturm_count_multi(const TridiagonalOperator& op, std::span<const double> shifts,
                       std::span<std::size_t> counts);

/// Scalar reference for sturm_count_multi: one sturm_count call per shift.
void sturm_count_multi_serial(const TridiagonalOperator& op, std::span<const double> shifts,
                              std::span<std::size_t> counts);

/// Pivot floor used by the Sturm recurrences.
double pivot_floor(const TridiagonalOperator& op) noexcept;

} // namespace anderson
