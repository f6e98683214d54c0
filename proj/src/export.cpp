#include "anderson/export.hpp"

#include "anderson/formulas.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace anderson {

namespace {

std::string_view event_name(SampleEvent e) noexcept
{
    switch (e) {
    case SampleEvent::None:
        return "none";
    case SampleEvent::Explode:
        return "explode";
    case SampleEvent::Restart:
        return "restart";
    }
    return "none";
}

nlohmann::json number_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

} // namespace

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0.0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_eigenpairs_csv(std::ostream& os, std::span<const EigenPair> pairs)
{
    os << "k,lambda,U,peak,n_zeros\n";
    for (const auto& p : pairs) {
        const LocalizationData loc = localization_data(p);
        const auto interior = std::count_if(loc.zeros.begin(), loc.zeros.end(), [&](double z) {
            return z > 0.0 && z < p.grid.length();
        });
        os << p.k << ',' << format_number(p.lambda) << ',' << format_number(loc.U) << ','
           << format_number(loc.peak) << ',' << interior << '\n';
    }
}

void write_phi_csv(std::ostream& os, const EigenPair& pair)
{
    os << "x,phi\n";
    for (std::size_t i = 0; i < pair.phi.size(); ++i) {
        os << format_number(pair.grid.x(i)) << ',' << format_number(pair.phi[i]) << '\n';
    }
}

void write_trajectory_csv(std::ostream& os, const RiccatiTrajectory& traj)
{
    os << "t,X_clipped,event\n";
    for (const auto& s : traj.samples) {
        os << format_number(s.t) << ',' << format_number(s.x) << ',' << event_name(s.event) << '\n';
    }
}

void write_explosion_times_csv(std::ostream& os, std::uint64_t replica, double a,
                               std::span<const double> zeta, bool header)
{
    if (header) {
        os << "replica,a,k,zeta_k\n";
    }
    for (std::size_t k = 0; k < zeta.size(); ++k) {
        os << replica << ',' << format_number(a) << ',' << k + 1 << ',' << format_number(zeta[k])
           << '\n';
    }
}

void write_log_m_csv(std::ostream& os, std::span<const double> a)
{
    os << "a,log_m\n";
    for (double v : a) {
        os << format_number(v) << ',' << format_number(log_mean_explosion_time(v)) << '\n';
    }
}

void write_a_of_L_csv(std::ostream& os, std::span<const double> L)
{
    os << "L,a_L\n";
    for (double v : L) {
        os << format_number(v) << ',' << format_number(a_of_L(v).a_L) << '\n';
    }
}

void write_density_of_states_csv(std::ostream& os, std::span<const double> lambda)
{
    os << "lambda,N\n";
    for (double v : lambda) {
        os << format_number(v) << ',' << format_number(density_of_states(v)) << '\n';
    }
}

void write_reports_csv(std::ostream& os, std::span<const SpectralReport> reports)
{
    os << "replica,seed,bc,k,lambda,x,U,peak,h0,h_dev,b_dev,decay_slope,decay_pass,n_zeros\n";
    const std::size_t mid = kShapePoints / 2;
    for (const auto& r : reports) {
        for (std::size_t j = 0; j < r.lambdas.size(); ++j) {
            const ShapeDeviation d = shape_deviation(r, j + 1);
            os << r.replica << ',' << r.seed << ',' << to_string(r.bc) << ',' << j + 1 << ','
               << format_number(r.lambdas[j]) << ',' << format_number(r.rescaled[j]) << ','
               << format_number(r.centers[j]) << ',' << format_number(r.peaks[j]) << ','
               << format_number(r.h[j][mid]) << ',' << format_number(d.h) << ','
               << format_number(d.b) << ','
               << (r.decay_valid[j] ? format_number(r.decay[j].slope) : std::string("nan")) << ','
               << (r.decay_valid[j] && r.decay[j].pass ? 1 : 0) << ',' << r.zeros[j].size()
               << '\n';
        }
    }
}

nlohmann::json summary_json(const EnsembleSummary& summary)
{
    const EnsembleConfig& c = summary.config;
    nlohmann::json j;
    j["schema"] = kSchema;
    j["run"] = {{"L", c.L},
                {"dx", c.dx},
                {"k", c.k},
                {"bc", std::string(to_string(c.bc))},
                {"seed", c.seed},
                {"first_replica", c.first_replica},
                {"replicas", summary.replicas}};
    nlohmann::json tests = nlohmann::json::array();
    for (const auto& t : summary.tests) {
        tests.push_back({{"name", t.name},
                         {"statistic", number_or_null(t.statistic)},
                         {"band", {number_or_null(t.band_lo), number_or_null(t.band_hi)}},
                         {"pass", t.pass}});
    }
    j["tests"] = std::move(tests);
    return j;
}

} // namespace anderson
