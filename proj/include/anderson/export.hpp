#pragma once

#include "anderson/analysis.hpp"
#include "anderson/eigen.hpp"
#include "anderson/ensemble.hpp"
#include "anderson/riccati.hpp"

#include <json.hpp>

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace anderson {

inline constexpr const char* kSchema = "anderson1d/1";

/// Shortest round-trip decimal form, '.' separator regardless of locale.
std::string format_number(double v);

/// k,lambda,U,peak,n_zeros
void write_eigenpairs_csv(std::ostream& os, std::span<const EigenPair> pairs);
/// x,phi
void write_phi_csv(std::ostream& os, const EigenPair& pair);
/// t,X_clipped,event
void write_trajectory_csv(std::ostream& os, const RiccatiTrajectory& traj);
/// replica,a,k,zeta_k; the header is written when `header` is set.
void write_explosion_times_csv(std::ostream& os, std::uint64_t replica, double a,
                               std::span<const double> zeta, bool header = true);

/// a,log_m
void write_log_m_csv(std::ostream& os, std::span<const double> a);
/// L,a_L
void write_a_of_L_csv(std::ostream& os, std::span<const double> L);
/// lambda,N
void write_density_of_states_csv(std::ostream& os, std::span<const double> lambda);

/// One row per (replica, k): replica,seed,bc,k,lambda,x,U,peak,h0,h_dev,b_dev,
/// decay_slope,decay_pass,n_zeros
void write_reports_csv(std::ostream& os, std::span<const SpectralReport> reports);

/// {"schema", "run": {...}, "tests": [{name, statistic, band, pass}]}
nlohmann::json summary_json(const EnsembleSummary& summary);

} // namespace anderson
