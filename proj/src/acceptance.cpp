#include "anderson/acceptance.hpp"

#include "anderson/analysis.hpp"
#include "anderson/eigen.hpp"
#include "anderson/ensemble.hpp"
#include "anderson/errors.hpp"
#include "anderson/export.hpp"
#include "anderson/formulas.hpp"
#include "anderson/noise.hpp"
#include "anderson/operator.hpp"
#include "anderson/riccati.hpp"
#include "anderson/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace anderson {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

struct Outcome {
    bool pass;
    std::string detail;
};

class Suite {
public:
    explicit Suite(const AcceptanceConfig& cfg) : cfg_(cfg), p_(cfg.params) {}

    Outcome run(int id)
    {
        switch (id) {
        case 1:
            return zero_noise();
        case 2:
            return cross_oracle();
        case 3:
            return m_asymptotics();
        case 4:
            return a_L_inversion();
        case 5:
            return explosion_law();
        case 6:
            return density_of_states_check();
        case 7:
            return spectral_statistics();
        case 8:
            return shape();
        case 9:
            return zero_geometry_check();
        case 10:
            return neumann();
        case 11:
            return structural();
        default:
            throw DomainError("acceptance: no criterion " + std::to_string(id));
        }
    }

private:
    void log(const std::string& line) const
    {
        if (cfg_.log) {
            cfg_.log(line);
        }
    }

    Outcome zero_noise()
    {
        const Grid g = Grid::from_points(kPi, 2000);
        const auto op = assemble(white_noise(zero_path(g)), BoundaryCondition::Dirichlet);
        const auto pairs = bottom_eigenpairs(op, 3);
        double worst = 0.0;
        for (const auto& p : pairs) {
            const double k2 = static_cast<double>(p.k * p.k);
            worst = std::max(worst, std::abs(p.lambda - k2) / k2);
        }
        const double dx = 1e-3;
        const auto traj = integrate(-4.0, zero_path(Grid(3.0, dx)), Start::PlusInfinity);
        const double err = traj.count() == 1 ? std::abs(traj.zeta[0] - kPi / 2) : kPi;
        const bool pass = worst <= 1e-4 && traj.count() == 1 && err <= 2 * dx;
        return {pass, fmt("max rel err lambda_1..3 = %.2e; explosions = %zu, |zeta - pi/2| = %.2e",
                          worst, traj.count(), err)};
    }

    Outcome cross_oracle()
    {
        constexpr int kNoises = 50;
        constexpr double eps = 2e-4;
        double rate[2] = {0.0, 0.0};
        double within[2] = {0.0, 0.0};
        for (int level = 0; level < 2; ++level) {
            int mismatches = 0;
            int close = 0;
            for (int r = 0; r < kNoises; ++r) {
                BrownianPath b = sample_brownian(Grid(100.0, 1e-3), cfg_.seed, r);
                if (level == 1) {
                    b = refine_brownian(b);
                }
                const auto op = assemble(white_noise(b), BoundaryCondition::Dirichlet);
                const double l1 = bottom_eigenpairs(op, 1)[0].lambda;
                for (double a : {-l1 - eps, -l1 + eps}) {
                    const auto e = static_cast<long>(explosion_count(a, b, Start::PlusInfinity));
                    const auto s = static_cast<long>(sturm_count(op, -a));
                    mismatches += e != s ? 1 : 0;
                    close += std::abs(e - s) <= 1 ? 1 : 0;
                }
            }
            rate[level] = mismatches / (2.0 * kNoises);
            within[level] = close / (2.0 * kNoises);
            log(fmt("  criterion 2: dx = %g, mismatch rate %.3f", b_dx(level), rate[level]));
        }
        const bool pass = within[0] >= 0.95 && within[1] >= 0.95 && rate[1] < rate[0];
        return {pass, fmt("|diff|<=1: %.2f / %.2f; mismatch rate %.3f (dx) -> %.3f (dx/2)", within[0],
                          within[1], rate[0], rate[1])};
    }

    static double b_dx(int level) { return level == 0 ? 1e-3 : 5e-4; }

    Outcome m_asymptotics()
    {
        double prev = std::numeric_limits<double>::infinity();
        bool pass = true;
        std::string detail = "ratio:";
        for (double a : {4.0, 6.25, 9.0}) {
            const double r = std::exp(log_mean_explosion_time(a) + 0.5 * std::log(a) -
                                      8.0 / 3.0 * std::pow(a, 1.5)) /
                             kPi;
            pass = pass && r >= 0.8 && r <= 1.2 && std::abs(r - 1.0) < prev;
            prev = std::abs(r - 1.0);
            detail += fmt(" a=%g: %.5f", a, r);
        }
        return {pass, detail};
    }

    Outcome a_L_inversion()
    {
        double worst = 0.0;
        for (double L : {1e2, 1e4, 1e6}) {
            const double a = a_of_L(L).a_L;
            worst = std::max(worst, std::abs(std::exp(log_mean_explosion_time(a) - std::log(L)) - 1.0));
        }
        const double a6 = a_of_L(1e6).a_L;
        const double rel = std::abs(a_L_expansion(1e6) - a6) / a6;
        return {worst < 1e-8 && rel <= 0.05,
                fmt("round-trip |m(a_L)/L - 1| max %.2e; expansion rel diff at 1e6 %.4f", worst, rel)};
    }

    Outcome explosion_law()
    {
        ExplosionTestConfig ec;
        ec.seed = cfg_.seed;
        ec.jobs = cfg_.jobs;
        const ExplosionTest t2 = explosion_pp_test(2.0, p_.explosion_reps, ec);
        log(fmt("  criterion 5: a = 2 mean %.4f KS %.4f dispersion %.3f", t2.mean, t2.ks,
                t2.dispersion));
        ec.horizon = 0.0;
        const ExplosionTest t3 = explosion_pp_test(3.0, p_.explosion_reps, ec);
        const double half = 0.15 * p_.band_scale;
        const bool pass = std::abs(t2.mean - 1.0) <= half && t3.ks < t2.ks;
        return {pass, fmt("R=%zu mean zeta/m(2) = %.4f (band +-%.2f); KS a=2 %.4f, a=3 %.4f; "
                          "count dispersion on 5 m(2) %.3f",
                          p_.explosion_reps, t2.mean, half, t2.ks, t3.ks, t2.dispersion)};
    }

    Outcome density_of_states_check()
    {
        constexpr int kNoises = 50;
        constexpr double L = 200.0;
        double total = 0.0;
        for (int r = 0; r < kNoises; ++r) {
            const BrownianPath b = sample_brownian(Grid(L, p_.dx), cfg_.seed + 1, r);
            total += static_cast<double>(
                sturm_count(assemble(white_noise(b), BoundaryCondition::Dirichlet), -1.0));
        }
        const double emp = total / (kNoises * L);
        const double ref = density_of_states(-1.0);
        const double rel = std::abs(emp - ref) / ref;
        return {rel <= 0.10, fmt("N(-1): empirical %.5f, 1/m(1) = %.5f, rel diff %.4f", emp, ref, rel)};
    }

    const EnsembleResult& ensemble(bool large) { return ensemble_at(large ? p_.L_large : p_.L_small); }

    const EnsembleResult& ensemble_at(double L)
    {
        auto& slot = ensembles_[L];
        if (!slot) {
            EnsembleConfig ec;
            ec.L = L;
            ec.dx = p_.dx;
            ec.k = 2;
            ec.bc = BoundarySelection::Both;
            ec.seed = cfg_.seed;
            ec.reps = p_.reps;
            ec.jobs = cfg_.jobs;
            log(fmt("  ensemble L = %g, R = %zu (Dirichlet + Neumann)", ec.L, ec.reps));
            slot = run_ensemble(ec);
        }
        return *slot;
    }

    Outcome spectral_statistics()
    {
        const auto& big = ensemble(true).dirichlet;
        const auto& small = ensemble(false).dirichlet;
        const double s = p_.band_scale;
        const PoissonResult pc = poisson_counts(big);
        bool disp_ok = true;
        std::string disp = "dispersion";
        for (const auto& iv : pc.intervals) {
            disp_ok = disp_ok && std::abs(iv.dispersion - 1.0) <= 0.3 * s;
            disp += fmt(" %.3f", iv.dispersion);
        }
        const double mean0 = pc.intervals[0].mean;
        const CenterStatistics c = center_statistics(big, 2);
        const double ks_big = gumbel_statistic(big, 2).ks;
        const double ks_small = gumbel_statistic(small, 2).ks;
        const bool pass = std::abs(mean0 - 1.0) <= 0.2 * s && disp_ok && c.p_value > 0.01 / s &&
                          std::abs(c.correlation) < 0.15 * s && ks_big < ks_small;
        return {pass, fmt("L=%g R=%zu: mean count (-inf,0] %.3f; %s; U1/L KS p %.3f; corr %.3f; "
                          "Gumbel KS %.4f (L=%g) vs %.4f (L=%g)",
                          p_.L_large, big.size(), mean0, disp.c_str(), c.p_value, c.correlation,
                          ks_big, p_.L_large, ks_small, p_.L_small)};
    }

    static double median_sup_h(const std::vector<SpectralReport>& reps)
    {
        std::vector<double> d;
        for (const auto& r : reps) {
            d.push_back(shape_deviation(r, 1).h);
        }
        return stats::median(d);
    }

    Outcome shape()
    {
        const auto& big = ensemble(true).dirichlet;
        const auto& small = ensemble(false).dirichlet;
        const double dev_big = median_sup_h(big);
        const double dev_small = median_sup_h(small);
        std::vector<double> h0;
        std::size_t pass_fit = 0;
        for (const auto& r : big) {
            h0.push_back(r.h[0][kShapePoints / 2]);
            pass_fit += r.decay_valid[0] && r.decay[0].pass ? 1 : 0;
        }
        const double med_h0 = stats::median(h0);
        const double rate = static_cast<double>(pass_fit) / static_cast<double>(big.size());
        const double s = p_.band_scale;
        const bool pass = dev_big < dev_small && std::abs(med_h0 - 1.0) <= 0.15 * s &&
                          rate >= 1.0 - 0.2 * s;
        return {pass, fmt("median sup|h1 - sech| %.4f (L=%g) vs %.4f (L=%g); median h1(0) %.4f; "
                          "decay pass rate %.3f",
                          dev_big, p_.L_large, dev_small, p_.L_small, med_h0, rate)};
    }

    Outcome zero_geometry_check()
    {
        const auto& big = ensemble(true).dirichlet;
        const auto& small = ensemble_at(p_.L_calibration).dirichlet;
        auto scaled = [](const std::vector<SpectralReport>& reps) {
            std::vector<double> d;
            for (const auto& r : reps) {
                const ZeroGeometry z = zero_geometry(r, 2);
                for (double v : z.argmax_distance) {
                    d.push_back(v * std::sqrt(r.a_L) * std::log(r.a_L));
                }
            }
            return d;
        };
        const double c_emp = stats::median(scaled(small));
        std::size_t inside = 0;
        std::vector<double> dist;
        for (const auto& r : big) {
            const ZeroGeometry z = zero_geometry(r, 2);
            inside += z.within_band() ? 1 : 0;
            dist.insert(dist.end(), z.argmax_distance.begin(), z.argmax_distance.end());
        }
        const double a = big.front().a_L;
        const double bound = 10.0 * c_emp / (std::sqrt(a) * std::log(a));
        const double med = stats::median(dist);
        const double rate = static_cast<double>(inside) / static_cast<double>(big.size());
        const double band = std::pow(std::log(std::log(a)), 2) / std::sqrt(a);
        const bool pass = rate >= 1.0 - 0.3 * p_.band_scale && med < bound;
        return {pass, fmt("a_L=%.4f band %.4f: offset within band %.3f; C_emp %.4f (L=%g); median "
                          "argmax distance %.4f vs bound %.4f",
                          a, band, rate, c_emp, p_.L_calibration, med, bound)};
    }

    Outcome neumann()
    {
        const auto& big = ensemble(true);
        const auto& small = ensemble(false);
        const NeumannGap gb = neumann_gap(big.dirichlet, big.neumann);
        const NeumannGap gs = neumann_gap(small.dirichlet, small.neumann);
        const double lb = gb.median_log_lambda_gap[0];
        const double ls = gs.median_log_lambda_gap[0];
        const bool pass = lb < ls && gb.ground_violations == 0 && gs.ground_violations == 0;
        return {pass, fmt("median |lambda1^N - lambda1| sqrt(a_L) = e^%.2f (L=%g) vs e^%.2f (L=%g); "
                          "violations %zu + %zu",
                          lb, p_.L_large, ls, p_.L_small, gb.ground_violations,
                          gs.ground_violations)};
    }

    Outcome structural()
    {
        std::vector<std::string> failed;
        std::string detail;
        auto check = [&](const char* name, bool ok, const std::string& info) {
            detail += std::string(detail.empty() ? "" : "; ") + name + " " + info;
            if (!ok) {
                failed.emplace_back(name);
            }
        };

        const double dx = 1e-3;
        double gap = -std::numeric_limits<double>::infinity();
        for (int r = 0; r < 20; ++r) {
            const BrownianPath b = sample_brownian(Grid(20.0, dx), cfg_.seed + 2, r);
            gap = std::max({gap, coupling_gap(1.0, 1.05, b), coupling_gap(-1.0, -0.9, b)});
        }
        check("coupling", gap <= 10 * dx, fmt("%.2e", gap));

        int interlaced = 0;
        for (int r = 0; r < 100; ++r) {
            const BrownianPath b = sample_brownian(Grid(20.0, dx), cfg_.seed + 3, r);
            const auto fwd = integrate(1.0, b, Start::PlusInfinity);
            const auto bwd = reversed_trajectory(1.0, b);
            interlaced += check_interlacing(fwd, bwd, b.grid.length()) ? 1 : 0;
        }
        check("reversal", interlaced >= 99, fmt("%d/100", interlaced));

        double ortho = 0.0;
        for (int r = 0; r < 5; ++r) {
            const BrownianPath b = sample_brownian(Grid(100.0, dx), cfg_.seed + 4, r);
            for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
                const auto pairs = bottom_eigenpairs(assemble(white_noise(b), bc), 4);
                for (std::size_t i = 0; i < pairs.size(); ++i) {
                    for (std::size_t j = 0; j <= i; ++j) {
                        const double d = i == j ? 1.0 : 0.0;
                        ortho = std::max(ortho, std::abs(inner_product(pairs[i], pairs[j]) - d));
                    }
                }
            }
        }
        check("orthonormality", ortho <= 1e-8, fmt("%.2e", ortho));

        double norm = 0.0;
        for (double a : {-1.0, 0.0, 1.0, 4.0}) {
            const double R = 400.0;
            const double m = std::exp(log_mean_explosion_time(a));
            norm = std::max(norm, std::abs(invariant_mass(a, -R, R) + 2.0 / (m * R) - 1.0));
        }
        check("normalization", norm <= 1e-6, fmt("%.2e", norm));

        const double exact = hitting_probability(1.0, 0.0, -1.0, 1.0);
        const HittingEstimate mc = hitting_monte_carlo(1.0, 0.0, -1.0, 1.0, 20000, 1e-3, cfg_.seed);
        const double zscore = std::abs(mc.p - exact) / mc.standard_error;
        check("hitting", zscore <= 3.0, fmt("%.4f vs MC %.4f (z %.2f)", exact, mc.p, zscore));

        check("determinism", deterministic(), "");

        return {failed.empty(), detail};
    }

    bool deterministic() const
    {
        const Grid g(50.0, 1e-3);
        const BrownianPath p1 = sample_brownian(g, cfg_.seed, 7);
        const BrownianPath p2 = sample_brownian_serial(g, cfg_.seed, 7);
        bool ok = p1.values == p2.values && path_fingerprint(p1) == path_fingerprint(p2);

        const auto op = assemble(white_noise(p1), BoundaryCondition::Dirichlet);
        std::vector<double> shifts;
        for (int i = 0; i < 37; ++i) {
            shifts.push_back(-3.0 + 0.25 * i);
        }
        std::vector<std::size_t> c1(shifts.size());
        std::vector<std::size_t> c2(shifts.size());
        sturm_count_multi(op, shifts, c1);
        sturm_count_multi_serial(op, shifts, c2);
        ok = ok && c1 == c2;

        EnsembleConfig ec;
        ec.L = 50.0;
        ec.k = 2;
        ec.bc = BoundarySelection::Both;
        ec.seed = cfg_.seed;
        ec.reps = 3;
        ec.jobs = cfg_.jobs;
        auto csv = [](const EnsembleResult& r) {
            std::ostringstream os;
            write_reports_csv(os, r.dirichlet);
            write_reports_csv(os, r.neumann);
            return os.str();
        };
        ok = ok && csv(run_ensemble(ec)) == csv(run_ensemble_serial(ec));

        const StreamingConfig sc = StreamingConfig::defaults(2.0);
        ok = ok && streaming_explosions(2.0, 200.0, 0, cfg_.seed, 3, sc) ==
                       streaming_explosions(2.0, 200.0, 0, cfg_.seed, 3, sc);
        return ok;
    }

    const AcceptanceConfig& cfg_;
    const ProfileParams& p_;
    std::map<double, std::optional<EnsembleResult>> ensembles_;
};

const char* const kNames[] = {
    "",
    "zero-noise oracle",
    "explosion count vs Sturm count",
    "m(a) asymptotics",
    "a_L inversion",
    "explosion-time law",
    "density of states",
    "eigenvalue point process",
    "ground state shape",
    "zeros of the second eigenfunction",
    "Neumann vs Dirichlet",
    "structural invariants",
};

} // namespace

ProfileParams ProfileParams::quick()
{
    return {};
}

ProfileParams ProfileParams::full()
{
    ProfileParams p;
    p.profile = Profile::Full;
    p.L_small = 200.0;
    p.L_large = 2000.0;
    p.L_calibration = 200.0;
    p.reps = 500;
    p.explosion_reps = 400;
    p.band_scale = 1.0;
    return p;
}

std::string_view to_string(Profile p) noexcept
{
    return p == Profile::Quick ? "quick" : "full";
}

std::vector<CriterionResult> run_acceptance(
    const AcceptanceConfig& cfg, const std::function<void(const CriterionResult&)>& on_result)
{
    std::vector<int> ids = cfg.only;
    if (ids.empty()) {
        for (int i = 1; i <= 11; ++i) {
            ids.push_back(i);
        }
    }
    Suite suite(cfg);
    std::vector<CriterionResult> out;
    for (int id : ids) {
        if (id < 1 || id > 11) {
            throw DomainError("acceptance: no criterion " + std::to_string(id));
        }
        CriterionResult r;
        r.id = id;
        r.name = kNames[id];
        if (cfg.log) {
            cfg.log(fmt("criterion %d: %s", id, r.name.c_str()));
        }
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const Outcome o = suite.run(id);
            r.pass = o.pass;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_result) {
            on_result(r);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_result(const CriterionResult& r)
{
    return fmt("[%s] %2d %s (%.2f s): ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds) +
           r.detail;
}

nlohmann::json acceptance_json(const std::vector<CriterionResult>& results, Profile profile)
{
    nlohmann::json j;
    j["schema"] = kSchema;
    j["profile"] = std::string(to_string(profile));
    nlohmann::json list = nlohmann::json::array();
    nlohmann::json failures = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        list.push_back({{"id", r.id},
                        {"name", r.name},
                        {"pass", r.pass},
                        {"detail", r.detail},
                        {"seconds", r.seconds}});
        if (!r.pass) {
            failures.push_back(r.id);
            all = false;
        }
    }
    j["pass"] = all;
    j["criteria"] = std::move(list);
    j["failures"] = std::move(failures);
    return j;
}

} // namespace anderson
