#pragma once

#include "anderson/analysis.hpp"

#include <functional>
#include <string>
#include <vector>

namespace anderson {

enum class BoundarySelection { Dirichlet, Neumann, Both };

struct EnsembleConfig {
    double L = 500.0;
    double dx = 1e-3;
    std::size_t k = 4;
    BoundarySelection bc = BoundarySelection::Dirichlet;
    std::uint64_t seed = 1;
    std::size_t reps = 1;
    std::uint64_t first_replica = 0;
    int jobs = 0; ///< <= 0: all available threads
    RealizationOptions options;
};

/// Reports ordered by replica index. With BoundarySelection::Both the i-th
/// Dirichlet and Neumann reports come from the same BrownianPath.
struct EnsembleResult {
    EnsembleConfig config;
    std::vector<SpectralReport> dirichlet;
    std::vector<SpectralReport> neumann;
};

/// Called after each finished replica with (done, total); serialized.
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

/// Replicas run in parallel (one path each, shared by both boundary
/// conditions); the output does not depend on the thread count.
EnsembleResult run_ensemble(const EnsembleConfig& cfg, const ProgressFn& progress = {});

/// Single-threaded reference for run_ensemble.
EnsembleResult run_ensemble_serial(const EnsembleConfig& cfg);

/// Union of two results over disjoint replica sets, ordered by replica.
EnsembleResult merge(EnsembleResult a, const EnsembleResult& b);

struct TestRecord {
    std::string name;
    double statistic = 0.0;
    double band_lo = 0.0;
    double band_hi = 0.0;
    bool pass = false;
};

struct EnsembleSummary {
    EnsembleConfig config;
    std::size_t replicas = 0;
    std::vector<TestRecord> tests;
};

/// Ensemble statistics against their acceptance bands. band_scale widens
/// every band around its centre (2 for the quick profile).
EnsembleSummary summarize(const EnsembleResult& result, double band_scale = 1.0);

std::string_view to_string(BoundarySelection bc) noexcept;

} // namespace anderson
