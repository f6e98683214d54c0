// Batch front-end: spectra, Riccati paths, closed-form tables, ensembles and
// the acceptance suite.

#include "anderson/acceptance.hpp"
#include "anderson/analysis.hpp"
#include "anderson/eigen.hpp"
#include "anderson/ensemble.hpp"
#include "anderson/errors.hpp"
#include "anderson/export.hpp"
#include "anderson/formulas.hpp"
#include "anderson/riccati.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace anderson;

namespace {

enum ExitCode { kPass = 0, kFail = 1, kUsage = 2, kNumerical = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    double L = 500.0;
    double dx = 1e-3;
    std::size_t k = 4;
    std::string bc = "dirichlet";
    std::uint64_t seed = 1;
    std::uint64_t replica = 0;
    std::size_t reps = 1;
    std::string out;
    std::string format = "csv";
    std::vector<double> thresholds{0.0, 0.6931471805599453, 1.0986122886681098};
    std::optional<double> a;
    int jobs = 0;
    std::string a_grid = "0:10:0.5";
    std::string L_grid;
    std::string lambda_grid;
    std::string profile = "quick";
    std::vector<int> only;
    double band_scale = 1.0;
    bool seed_given = false;
};

/// Writes one artifact either into the output directory or to stdout.
class Sink {
public:
    explicit Sink(std::string dir) : dir_(std::move(dir))
    {
        if (!dir_.empty()) {
            fs::create_directories(dir_);
        }
    }

    bool to_files() const { return !dir_.empty(); }

    template <class F>
    void emit(const std::string& name, F&& write, bool to_stdout = true)
    {
        if (to_files()) {
            std::ofstream f(fs::path(dir_) / name, std::ios::binary);
            if (!f) {
                throw std::runtime_error("cannot write " + (fs::path(dir_) / name).string());
            }
            write(f);
        } else if (to_stdout) {
            write(std::cout);
        }
    }

private:
    std::string dir_;
};

std::vector<double> parse_grid(const std::string& spec, const char* flag)
{
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    char c1 = 0;
    char c2 = 0;
    std::istringstream is(spec);
    is.imbue(std::locale::classic());
    if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0) ||
        hi < lo) {
        throw UsageError(std::string(flag) + ": expected lo:hi:step with step > 0, got '" + spec +
                         "'");
    }
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
        out.push_back(lo + static_cast<double>(i) * step);
    }
    return out;
}

BoundarySelection selection(const std::string& bc)
{
    if (bc == "dirichlet") {
        return BoundarySelection::Dirichlet;
    }
    if (bc == "neumann") {
        return BoundarySelection::Neumann;
    }
    return BoundarySelection::Both;
}

std::vector<BoundaryCondition> conditions(const std::string& bc)
{
    switch (selection(bc)) {
    case BoundarySelection::Dirichlet:
        return {BoundaryCondition::Dirichlet};
    case BoundarySelection::Neumann:
        return {BoundaryCondition::Neumann};
    case BoundarySelection::Both:
        break;
    }
    return {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann};
}

void validate(const RunConfig& c)
{
    if (!(c.L > 0.0)) {
        throw UsageError("--L must be positive");
    }
    if (!(c.dx > 0.0) || !(c.dx < c.L / 100.0)) {
        throw UsageError("--dx must satisfy 0 < dx < L/100");
    }
    if (c.k < 1 || c.k > 32) {
        throw UsageError("--k must lie in [1, 32]");
    }
    if (c.reps < 1) {
        throw UsageError("--reps must be at least 1");
    }
}

void progress_line(std::size_t done, std::size_t total)
{
    std::cerr << "replica " << done << "/" << total << "\n";
}

int cmd_spectrum(const RunConfig& c)
{
    validate(c);
    Sink sink(c.out);
    nlohmann::json doc;
    doc["schema"] = kSchema;
    doc["run"] = {{"L", c.L}, {"dx", c.dx}, {"k", c.k}, {"bc", c.bc}, {"seed", c.seed}};
    doc["eigenpairs"] = nlohmann::json::array();
    for (std::size_t r = 0; r < c.reps; ++r) {
        const std::uint64_t replica = c.replica + r;
        const BrownianPath b = sample_brownian(Grid(c.L, c.dx), c.seed, replica);
        for (BoundaryCondition bc : conditions(c.bc)) {
            std::cerr << "spectrum: replica " << replica << " " << to_string(bc) << "\n";
            const auto pairs = bottom_eigenpairs(assemble(white_noise(b), bc), c.k);
            const std::string tag = std::string(to_string(bc)) + "_r" + std::to_string(replica);
            if (c.format == "json") {
                for (const auto& p : pairs) {
                    const LocalizationData loc = localization_data(p);
                    doc["eigenpairs"].push_back({{"replica", replica},
                                                 {"bc", std::string(to_string(bc))},
                                                 {"k", p.k},
                                                 {"lambda", p.lambda},
                                                 {"U", loc.U},
                                                 {"peak", loc.peak}});
                }
                continue;
            }
            sink.emit("eigenpairs_" + tag + ".csv",
                      [&](std::ostream& os) { write_eigenpairs_csv(os, pairs); });
            for (const auto& p : pairs) {
                sink.emit("phi_" + tag + "_k" + std::to_string(p.k) + ".csv",
                          [&](std::ostream& os) { write_phi_csv(os, p); }, false);
            }
        }
    }
    if (c.format == "json") {
        sink.emit("spectrum.json", [&](std::ostream& os) { os << doc.dump(2) << "\n"; });
    }
    return kPass;
}

int cmd_riccati(const RunConfig& c)
{
    validate(c);
    if (!c.a) {
        throw UsageError("--a is required for riccati");
    }
    Sink sink(c.out);
    bool header = true;
    std::ostringstream times;
    for (std::size_t r = 0; r < c.reps; ++r) {
        const std::uint64_t replica = c.replica + r;
        const BrownianPath b = sample_brownian(Grid(c.L, c.dx), c.seed, replica);
        const bool neumann = selection(c.bc) == BoundarySelection::Neumann;
        const auto traj = integrate(*c.a, b, neumann ? Start::Zero : Start::PlusInfinity);
        std::cerr << "riccati: replica " << replica << ", " << traj.count() << " explosions\n";
        write_explosion_times_csv(times, replica, *c.a, traj.zeta, header);
        header = false;
        sink.emit("trajectory_r" + std::to_string(replica) + ".csv",
                  [&](std::ostream& os) { write_trajectory_csv(os, traj); }, false);
    }
    sink.emit("explosions.csv", [&](std::ostream& os) { os << times.str(); });
    return kPass;
}

int cmd_formulas(const RunConfig& c)
{
    Sink sink(c.out);
    const std::vector<double> a = parse_grid(c.a_grid, "--a-grid");
    if (c.format == "json") {
        nlohmann::json doc;
        doc["schema"] = kSchema;
        nlohmann::json rows = nlohmann::json::array();
        for (double v : a) {
            rows.push_back({{"a", v}, {"log_m", log_mean_explosion_time(v)}});
        }
        doc["log_m"] = std::move(rows);
        sink.emit("formulas.json", [&](std::ostream& os) { os << doc.dump(2) << "\n"; });
        return kPass;
    }
    sink.emit("log_m.csv", [&](std::ostream& os) { write_log_m_csv(os, a); });
    if (!c.L_grid.empty()) {
        const auto L = parse_grid(c.L_grid, "--L-grid");
        sink.emit("a_of_L.csv", [&](std::ostream& os) { write_a_of_L_csv(os, L); });
    }
    if (!c.lambda_grid.empty()) {
        const auto lam = parse_grid(c.lambda_grid, "--lambda-grid");
        sink.emit("density_of_states.csv",
                  [&](std::ostream& os) { write_density_of_states_csv(os, lam); });
    }
    return kPass;
}

int cmd_ensemble(const RunConfig& c)
{
    validate(c);
    EnsembleConfig ec;
    ec.L = c.L;
    ec.dx = c.dx;
    ec.k = c.k;
    ec.bc = selection(c.bc);
    ec.seed = c.seed;
    ec.reps = c.reps;
    ec.first_replica = c.replica;
    ec.jobs = c.jobs;
    ec.options.thresholds = c.thresholds;
    const EnsembleResult res = run_ensemble(ec, progress_line);
    const EnsembleSummary sum = summarize(res, c.band_scale);
    const nlohmann::json doc = summary_json(sum);

    Sink sink(c.out);
    const bool csv = c.format == "csv";
    if (!res.dirichlet.empty()) {
        sink.emit("reports_dirichlet.csv",
                  [&](std::ostream& os) { write_reports_csv(os, res.dirichlet); }, csv);
    }
    if (!res.neumann.empty()) {
        sink.emit("reports_neumann.csv",
                  [&](std::ostream& os) { write_reports_csv(os, res.neumann); }, csv);
    }
    sink.emit("summary.json", [&](std::ostream& os) { os << doc.dump(2) << "\n"; }, !csv);

    bool pass = true;
    for (const auto& t : sum.tests) {
        std::cerr << (t.pass ? "pass " : "FAIL ") << t.name << " " << format_number(t.statistic)
                  << "\n";
        pass = pass && t.pass;
    }
    return pass ? kPass : kFail;
}

int cmd_verify(const RunConfig& c)
{
    AcceptanceConfig ac;
    ac.params = c.profile == "full" ? ProfileParams::full() : ProfileParams::quick();
    if (c.seed_given) {
        ac.seed = c.seed;
    }
    ac.jobs = c.jobs;
    ac.only = c.only;
    ac.log = [](std::string_view line) { std::cerr << line << "\n"; };

    Sink sink(c.out);
    const bool lines_to_stdout = !sink.to_files() && c.format == "csv";
    const auto results = run_acceptance(ac, [&](const CriterionResult& r) {
        (lines_to_stdout ? std::cout : std::cerr) << format_result(r) << std::endl;
    });
    const nlohmann::json doc = acceptance_json(results, ac.params.profile);
    sink.emit("acceptance.json", [&](std::ostream& os) { os << doc.dump(2) << "\n"; },
              c.format == "json");
    if (!doc["pass"].get<bool>()) {
        std::cerr << nlohmann::json{{"failures", doc["failures"]}}.dump() << "\n";
        return kFail;
    }
    return kPass;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spectra of the one-dimensional Anderson Hamiltonian -d^2/dx^2 + white noise"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with option values; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);

    RunConfig c;
    std::vector<std::string> thresholds;
    app.add_option("--L", c.L, "Domain length")->capture_default_str();
    app.add_option("--dx", c.dx, "Grid step")->capture_default_str();
    app.add_option("--k", c.k, "Number of eigenpairs")->capture_default_str();
    app.add_option("--bc", c.bc, "Boundary condition")
        ->check(CLI::IsMember({"dirichlet", "neumann", "both"}))
        ->capture_default_str();
    auto* seed_opt = app.add_option("--seed", c.seed, "Noise seed")->capture_default_str();
    app.add_option("--replica", c.replica, "First replica index")->capture_default_str();
    app.add_option("--reps", c.reps, "Number of replicas")->capture_default_str();
    app.add_option("--out", c.out, "Output directory; nothing is written to stdout when set");
    app.add_option("--format", c.format, "Artifact format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--thresholds", c.thresholds, "Rescaled thresholds of the Poisson counts")
        ->delimiter(',');
    app.add_option("--a", c.a, "Riccati parameter");
    app.add_option("--jobs", c.jobs, "Worker threads (0: all)")->capture_default_str();
    app.add_option("--band-scale", c.band_scale, "Widening of the ensemble bands")
        ->capture_default_str();
    app.add_option("--a-grid", c.a_grid, "lo:hi:step grid of a for ln m(a)")->capture_default_str();
    app.add_option("--L-grid", c.L_grid, "lo:hi:step grid of L for a_L");
    app.add_option("--lambda-grid", c.lambda_grid, "lo:hi:step grid of lambda for N(lambda)");
    app.add_option("--profile", c.profile, "Acceptance profile")
        ->check(CLI::IsMember({"quick", "full"}))
        ->capture_default_str();
    app.add_option("--only", c.only, "Criteria to run (1-11)")->delimiter(',');

    auto* spectrum = app.add_subcommand("spectrum", "Bottom eigenpairs of sampled operators");
    auto* riccati = app.add_subcommand("riccati", "Riccati trajectories and explosion times");
    auto* formulas = app.add_subcommand("formulas", "Tables of m(a), a_L and N(lambda)");
    auto* ensemble = app.add_subcommand("ensemble", "Replica ensemble with summary statistics");
    auto* verify = app.add_subcommand("verify", "Acceptance suite");
    for (auto* s : {spectrum, riccati, formulas, ensemble, verify}) {
        s->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }
    c.seed_given = seed_opt->count() > 0;

    try {
        if (spectrum->parsed()) {
            return cmd_spectrum(c);
        }
        if (riccati->parsed()) {
            return cmd_riccati(c);
        }
        if (formulas->parsed()) {
            return cmd_formulas(c);
        }
        if (ensemble->parsed()) {
            return cmd_ensemble(c);
        }
        return cmd_verify(c);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const anderson::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
}
