#include "anderson/ensemble.hpp"

#include "anderson/errors.hpp"
#include "anderson/stats.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <utility>

namespace anderson {

namespace {

struct ReplicaOutput {
    std::optional<SpectralReport> dirichlet;
    std::optional<SpectralReport> neumann;
};

ReplicaOutput run_replica(const EnsembleConfig& cfg, std::uint64_t replica)
{
    const BrownianPath b = sample_brownian(Grid(cfg.L, cfg.dx), cfg.seed, replica);
    ReplicaOutput out;
    if (cfg.bc == BoundarySelection::Both) {
        auto [d, n] = spectral_report_pair(b, cfg.k, cfg.options);
        out.dirichlet = std::move(d);
        out.neumann = std::move(n);
        return out;
    }
    if (cfg.bc != BoundarySelection::Neumann) {
        out.dirichlet = spectral_report(b, BoundaryCondition::Dirichlet, cfg.k, cfg.options);
    }
    if (cfg.bc != BoundarySelection::Dirichlet) {
        out.neumann = spectral_report(b, BoundaryCondition::Neumann, cfg.k, cfg.options);
    }
    return out;
}

void validate(const EnsembleConfig& cfg)
{
    if (cfg.reps == 0) {
        throw DomainError("ensemble: reps must be at least 1");
    }
    if (cfg.k < 1 || cfg.k > 32) {
        throw DomainError("ensemble: k must lie in [1, 32]");
    }
}

EnsembleResult collect(const EnsembleConfig& cfg, std::vector<ReplicaOutput>& outs)
{
    EnsembleResult r;
    r.config = cfg;
    for (auto& o : outs) {
        if (o.dirichlet) {
            r.dirichlet.push_back(std::move(*o.dirichlet));
        }
        if (o.neumann) {
            r.neumann.push_back(std::move(*o.neumann));
        }
    }
    return r;
}

std::pair<double, double> band(double centre, double half, double scale)
{
    return {centre - half * scale, centre + half * scale};
}

TestRecord record(std::string name, double stat, double lo, double hi)
{
    return {std::move(name), stat, lo, hi, stat >= lo && stat <= hi};
}

} // namespace

std::string_view to_string(BoundarySelection bc) noexcept
{
    switch (bc) {
    case BoundarySelection::Dirichlet:
        return "dirichlet";
    case BoundarySelection::Neumann:
        return "neumann";
    case BoundarySelection::Both:
        return "both";
    }
    return "?";
}

EnsembleResult run_ensemble(const EnsembleConfig& cfg, const ProgressFn& progress)
{
    validate(cfg);
    std::vector<ReplicaOutput> outs(cfg.reps);
    std::size_t done = 0;
    const auto n = static_cast<std::ptrdiff_t>(cfg.reps);
    const int threads = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            outs[static_cast<std::size_t>(i)] =
                run_replica(cfg, cfg.first_replica + static_cast<std::uint64_t>(i));
        } catch (...) {
#pragma omp critical(anderson_ensemble_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
#pragma omp critical(anderson_ensemble_progress)
        {
            ++done;
            if (progress) {
                progress(done, cfg.reps);
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return collect(cfg, outs);
}

EnsembleResult run_ensemble_serial(const EnsembleConfig& cfg)
{
    validate(cfg);
    std::vector<ReplicaOutput> outs;
    outs.reserve(cfg.reps);
    for (std::size_t i = 0; i < cfg.reps; ++i) {
        outs.push_back(run_replica(cfg, cfg.first_replica + i));
    }
    return collect(cfg, outs);
}

EnsembleResult merge(EnsembleResult a, const EnsembleResult& b)
{
    auto join = [](std::vector<SpectralReport>& x, const std::vector<SpectralReport>& y) {
        x.insert(x.end(), y.begin(), y.end());
        std::sort(x.begin(), x.end(), [](const SpectralReport& p, const SpectralReport& q) {
            return p.replica < q.replica;
        });
        const auto dup = std::adjacent_find(x.begin(), x.end(),
                                            [](const SpectralReport& p, const SpectralReport& q) {
                                                return p.replica == q.replica;
                                            });
        if (dup != x.end()) {
            throw DomainError("merge: replica " + std::to_string(dup->replica) + " appears twice");
        }
    };
    join(a.dirichlet, b.dirichlet);
    join(a.neumann, b.neumann);
    a.config.reps = std::max(a.dirichlet.size(), a.neumann.size());
    a.config.first_replica = std::min(a.config.first_replica, b.config.first_replica);
    return a;
}

EnsembleSummary summarize(const EnsembleResult& result, double band_scale)
{
    EnsembleSummary s;
    s.config = result.config;
    const auto& reps = result.dirichlet.empty() ? result.neumann : result.dirichlet;
    s.replicas = reps.size();
    if (reps.empty()) {
        return s;
    }
    const double inf = std::numeric_limits<double>::infinity();

    if (!reps.front().thresholds.empty()) {
        const PoissonResult p = poisson_counts(reps);
        const auto [lo, hi] = band(p.intervals[0].expected, 0.2, band_scale);
        s.tests.push_back(record("poisson_mean_first_interval", p.intervals[0].mean, lo, hi));
        for (std::size_t i = 0; i < p.intervals.size(); ++i) {
            const auto [dlo, dhi] = band(1.0, 0.3, band_scale);
            s.tests.push_back(record("poisson_dispersion_" + std::to_string(i),
                                     p.intervals[i].dispersion, dlo, dhi));
        }
    }
    if (reps.size() >= 2) {
        std::vector<double> y;
        for (const auto& r : reps) {
            y.push_back(-r.rescaled[0]);
        }
        s.tests.push_back(record("gumbel_ks", stats::ks_statistic(y, stats::gumbel_cdf), 0.0, 1.0));
        const CenterStatistics c = center_statistics(reps, 2);
        s.tests.push_back(record("center_ks_pvalue", c.p_value, 0.01 / band_scale, 1.0));
        s.tests.push_back(
            record("center_correlation", c.correlation, -0.15 * band_scale, 0.15 * band_scale));
    }

    std::vector<double> h0;
    std::vector<double> hdev;
    std::size_t decay_pass = 0;
    std::size_t zero_pass = 0;
    std::size_t zero_total = 0;
    const std::size_t mid = kShapePoints / 2;
    for (const auto& r : reps) {
        h0.push_back(r.h[0][mid]);
        hdev.push_back(shape_deviation(r, 1).h);
        decay_pass += r.decay_valid[0] && r.decay[0].pass ? 1 : 0;
        if (r.lambdas.size() >= 2 && r.a_L > 1.0) {
            ++zero_total;
            zero_pass += zero_geometry(r, 2).within_band() ? 1 : 0;
        }
    }
    const auto [hlo, hhi] = band(1.0, 0.15, band_scale);
    s.tests.push_back(record("h1_at_zero_median", stats::median(h0), hlo, hhi));
    s.tests.push_back(record("h1_sup_deviation_median", stats::median(hdev), 0.0, inf));
    const double n = static_cast<double>(reps.size());
    s.tests.push_back(record("decay_pass_rate", static_cast<double>(decay_pass) / n,
                             1.0 - 0.2 * band_scale, 1.0));
    if (zero_total > 0) {
        s.tests.push_back(record("zero_band_rate",
                                 static_cast<double>(zero_pass) / static_cast<double>(zero_total),
                                 1.0 - 0.3 * band_scale, 1.0));
    }
    if (!result.dirichlet.empty() && !result.neumann.empty()) {
        const NeumannGap g = neumann_gap(result.dirichlet, result.neumann);
        s.tests.push_back(record("neumann_ground_violations",
                                 static_cast<double>(g.ground_violations), 0.0, 0.0));
        s.tests.push_back(record("neumann_lambda_gap_median", g.median_lambda_gap[0], 0.0, inf));
        s.tests.push_back(record("neumann_center_gap_median", g.median_center_gap[0], 0.0, inf));
    }
    return s;
}

} // namespace anderson
