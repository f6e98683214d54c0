#include "anderson/analysis.hpp"

#include "anderson/errors.hpp"
#include "anderson/formulas.hpp"
#include "anderson/rng.hpp"
#include "anderson/stats.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace anderson {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogGuard = -644.7; // ln(1e-280)

/// |phi| at an arbitrary point, linear between nodes; 0 outside [0, L].
double abs_phi_at(const EigenPair& p, double t)
{
    const double L = p.grid.length();
    if (t < 0.0 || t > L) {
        return 0.0;
    }
    const double s = t / p.grid.dx();
    const auto i = std::min(static_cast<std::size_t>(s), p.grid.n() - 1);
    const double w = s - static_cast<double>(i);
    return std::abs((1.0 - w) * p.phi[i] + w * p.phi[i + 1]);
}

/// phi(t) / phi(node c), linear between nodes, valid when phi(c) underflows.
double ratio_at(const EigenPair& p, std::size_t c, double t)
{
    const double L = p.grid.length();
    if (t < 0.0 || t > L || p.sign[c] == 0) {
        return 0.0;
    }
    auto node_ratio = [&](std::size_t i) {
        if (p.sign[i] == 0) {
            return 0.0;
        }
        return static_cast<double>(p.sign[i] * p.sign[c]) * std::exp(p.log_abs[i] - p.log_abs[c]);
    };
    const double s = t / p.grid.dx();
    const auto i = std::min(static_cast<std::size_t>(s), p.grid.n() - 1);
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * node_ratio(i) + w * node_ratio(i + 1);
}

std::size_t nearest_node(const Grid& g, double x)
{
    const double s = std::round(x / g.dx());
    return static_cast<std::size_t>(std::clamp(s, 0.0, static_cast<double>(g.n())));
}

std::vector<double> interior_zeros(const LocalizationData& loc, double L)
{
    std::vector<double> z;
    for (double v : loc.zeros) {
        if (v > 0.0 && v < L) {
            z.push_back(v);
        }
    }
    return z;
}

double sup_local_shape(const EigenPair& p, double center, double sa)
{
    const std::size_t c = nearest_node(p.grid, center);
    double worst = 0.0;
    for (double t : shape_grid()) {
        if (std::abs(t) <= 2.0) {
            const double r = ratio_at(p, c, p.grid.x(c) + t / sa);
            worst = std::max(worst, std::abs(r - 1.0 / std::cosh(t)));
        }
    }
    return worst;
}

std::vector<double> sorted_centers(const SpectralReport& r, std::size_t i)
{
    std::vector<double> c(r.centers.begin(), r.centers.begin() + static_cast<std::ptrdiff_t>(i));
    std::sort(c.begin(), c.end());
    return c;
}

} // namespace

std::vector<double> shape_grid()
{
    std::vector<double> t(kShapePoints);
    for (std::size_t i = 0; i < kShapePoints; ++i) {
        t[i] = -kShapeHalfWidth +
               2.0 * kShapeHalfWidth * static_cast<double>(i) / static_cast<double>(kShapePoints - 1);
    }
    return t;
}

DecayFit fit_decay(const EigenPair& pair, const LocalizationData& loc, double a_L)
{
    const double sa = std::sqrt(a_L);
    const double radius = std::max(0.0, 0.375 * std::log(a_L) / sa);
    const Grid& g = pair.grid;
    const double lU = pair.log_abs[loc.U_node];
    std::vector<double> zeros = loc.zeros;

    // least squares y = c + s d with d = |t - U|
    double n = 0.0;
    double sd = 0.0;
    double sy = 0.0;
    double sdd = 0.0;
    double sdy = 0.0;
    std::size_t zi = 0;
    for (std::size_t i = 0; i <= g.n(); ++i) {
        const double x = g.x(i);
        while (zi < zeros.size() && zeros[zi] < x - radius) {
            ++zi;
        }
        if (zi < zeros.size() && std::abs(zeros[zi] - x) <= radius) {
            continue;
        }
        if (pair.log_abs[i] <= kLogGuard) {
            continue;
        }
        const double d = std::abs(x - loc.U);
        const double y = pair.log_abs[i] - lU;
        n += 1.0;
        sd += d;
        sy += y;
        sdd += d * d;
        sdy += d * y;
    }
    const double det = n * sdd - sd * sd;
    if (n < 16.0 || !(det > 0.0)) {
        throw InsufficientDomain("fit_decay: " + std::to_string(static_cast<std::size_t>(n)) +
                                 " usable nodes for k = " + std::to_string(pair.k));
    }
    DecayFit f;
    f.points = static_cast<std::size_t>(n);
    f.slope = (n * sdy - sd * sy) / det;
    f.intercept = (sy - f.slope * sd) / n;

    double ss = 0.0;
    zi = 0;
    for (std::size_t i = 0; i <= g.n(); ++i) {
        const double x = g.x(i);
        while (zi < zeros.size() && zeros[zi] < x - radius) {
            ++zi;
        }
        if ((zi < zeros.size() && std::abs(zeros[zi] - x) <= radius) ||
            pair.log_abs[i] <= kLogGuard) {
            continue;
        }
        const double e = pair.log_abs[i] - lU - f.intercept - f.slope * std::abs(x - loc.U);
        ss += e * e;
    }
    f.residual = std::sqrt(ss / n);

    const DerivedScales sc = scales_from_a(a_L);
    f.pass = f.slope >= -(sa + 3.0 * sc.kappa_L) && f.slope <= -(sa - 3.0 * sc.kappa_L);

    std::vector<double> errs;
    const double dx = g.dx();
    for (double z : interior_zeros(loc, g.length())) {
        const auto j = std::min(static_cast<std::size_t>(z / dx), g.n() - 1);
        if (pair.log_abs[j] <= kLogGuard || pair.log_abs[j + 1] <= kLogGuard) {
            continue;
        }
        // phi changes sign across [j, j + 1]
        const double lref = std::max(pair.log_abs[j], pair.log_abs[j + 1]);
        const double slope = (std::exp(pair.log_abs[j] - lref) + std::exp(pair.log_abs[j + 1] - lref)) / dx;
        double worst = 0.0;
        const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil((z - radius) / dx)));
        const auto hi = std::min(g.n(), static_cast<std::size_t>(std::floor((z + radius) / dx)));
        for (std::size_t i = lo; i <= hi; ++i) {
            const double d = std::abs(g.x(i) - z);
            if (d < 2.0 * dx) {
                continue;
            }
            const double model = slope * std::sinh(sa * d) / sa;
            const double actual = std::exp(pair.log_abs[i] - lref);
            worst = std::max(worst, std::abs(actual - model) / model);
        }
        errs.push_back(worst);
    }
    f.near_zero_error = errs.empty() ? 0.0 : stats::median(errs);
    return f;
}

namespace {

SpectralReport build_report(const BrownianPath& b, const TridiagonalOperator& op,
                            const std::vector<EigenPair>& pairs, const RealizationOptions& opt)
{
    const std::size_t k = pairs.size();
    const BoundaryCondition bc = op.bc;
    const Grid& g = b.grid;
    SpectralReport r;
    r.seed = b.seed;
    r.replica = b.replica;
    r.fingerprint = path_fingerprint(b);
    r.bc = bc;
    r.L = g.length();
    r.dx = g.dx();
    if (opt.a_L > 0.0) {
        r.a_L = opt.a_L;
    } else {
        r.a_L = r.L > mean_explosion_time_at_zero() ? a_of_L(r.L).a_L : 0.0;
    }
    const bool scaled = r.a_L > 0.0;
    const double sa = std::sqrt(r.a_L);

    const std::vector<double> ts = shape_grid();

    std::vector<LocalizationData> locs;
    locs.reserve(k);
    for (const auto& p : pairs) {
        locs.push_back(localization_data(p));
        const auto& loc = locs.back();
        r.lambdas.push_back(p.lambda);
        r.rescaled.push_back(4.0 * sa * (p.lambda + r.a_L));
        r.centers.push_back(loc.U);
        r.peaks.push_back(loc.peak);
        r.zeros.push_back(interior_zeros(loc, r.L));
        r.maxima.push_back(loc.maxima);

        std::vector<double> h(ts.size(), 0.0);
        std::vector<double> bb(ts.size(), 0.0);
        if (scaled) {
            const double amp = std::sqrt(2.0) / std::pow(r.a_L, 0.25);
            const double bU = b.at(loc.U);
            for (std::size_t q = 0; q < ts.size(); ++q) {
                const double t = loc.U + ts[q] / sa;
                h[q] = amp * abs_phi_at(p, t);
                bb[q] = (b.at(std::clamp(t, 0.0, r.L)) - bU) / sa;
            }
        }
        r.h.push_back(std::move(h));
        r.b.push_back(std::move(bb));

        DecayFit fit;
        bool valid = false;
        if (scaled) {
            try {
                fit = fit_decay(p, loc, r.a_L);
                valid = true;
            } catch (const InsufficientDomain&) {
                valid = false;
            }
        }
        r.decay.push_back(fit);
        r.decay_valid.push_back(valid);
    }

    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> shapes;
        if (scaled && j >= 1) {
            for (double c : sorted_centers(r, j + 1)) {
                shapes.push_back(sup_local_shape(pairs[j], c, sa));
            }
        }
        r.local_shape.push_back(std::move(shapes));
    }

    if (scaled) {
        r.thresholds = opt.thresholds;
        std::vector<double> shifts;
        for (double t : opt.thresholds) {
            shifts.push_back(t / (4.0 * sa) - r.a_L);
        }
        r.counts_below.assign(shifts.size(), 0);
        sturm_count_multi(op, shifts, r.counts_below);
    }
    return r;
}

void check_k(std::size_t k)
{
    if (k < 1 || k > 32) {
        throw DomainError("spectral_report: k must lie in [1, 32]");
    }
}

} // namespace

SpectralReport spectral_report(const BrownianPath& b, BoundaryCondition bc, std::size_t k,
                               const RealizationOptions& opt)
{
    check_k(k);
    const TridiagonalOperator op = assemble(white_noise(b), bc);
    return build_report(b, op, bottom_eigenpairs(op, k), opt);
}

std::pair<SpectralReport, SpectralReport> spectral_report_pair(const BrownianPath& b,
                                                               std::size_t k,
                                                               const RealizationOptions& opt)
{
    check_k(k);
    const WhiteNoiseSample xi = white_noise(b);
    const TridiagonalOperator od = assemble(xi, BoundaryCondition::Dirichlet);
    const TridiagonalOperator on = assemble(xi, BoundaryCondition::Neumann);
    const std::vector<EigenPair> pd = bottom_eigenpairs(od, k);
    const std::vector<EigenPair> pn = bottom_eigenpairs(on, k);
    SpectralReport d = build_report(b, od, pd, opt);
    SpectralReport n = build_report(b, on, pn, opt);
    for (std::size_t j = 0; j < k; ++j) {
        const SignedLog gap = boundary_gap(pd[j], pn[j]);
        for (SpectralReport* r : {&d, &n}) {
            r->log_dn_gap.push_back(gap.log_abs);
            r->dn_gap_sign.push_back(static_cast<signed char>(gap.sign));
        }
    }
    return {std::move(d), std::move(n)};
}

SpectralReport run_realization(double L, double dx, std::size_t k, BoundaryCondition bc,
                               std::uint64_t seed, std::uint64_t replica,
                               const RealizationOptions& opt)
{
    if (k < 1 || k > 32) {
        throw DomainError("run_realization: k must lie in [1, 32]");
    }
    return spectral_report(sample_brownian(Grid(L, dx), seed, replica), bc, k, opt);
}

GumbelResult gumbel_statistic(std::span<const SpectralReport> reports, std::size_t min_replicas)
{
    if (reports.size() < min_replicas) {
        throw DomainError("gumbel_statistic: need at least " + std::to_string(min_replicas) +
                          " replicas");
    }
    std::vector<double> y;
    y.reserve(reports.size());
    for (const auto& r : reports) {
        y.push_back(-r.rescaled.at(0));
    }
    GumbelResult g;
    g.n = y.size();
    g.mean = stats::mean(y);
    g.variance = stats::variance(y);
    g.ks = stats::ks_statistic(std::move(y), stats::gumbel_cdf);
    return g;
}

PoissonResult poisson_counts(std::span<const SpectralReport> reports)
{
    if (reports.empty()) {
        throw DomainError("poisson_counts: no reports");
    }
    const std::vector<double>& th = reports.front().thresholds;
    if (th.empty()) {
        throw DomainError("poisson_counts: reports carry no thresholds");
    }
    for (const auto& r : reports) {
        if (r.thresholds != th) {
            throw DomainError("poisson_counts: reports use different thresholds");
        }
    }
    const std::size_t p = th.size();
    std::vector<std::vector<double>> counts(p, std::vector<double>(reports.size()));
    for (std::size_t j = 0; j < reports.size(); ++j) {
        const auto& c = reports[j].counts_below;
        for (std::size_t i = 0; i < p; ++i) {
            const std::size_t below = i == 0 ? 0 : c[i - 1];
            counts[i][j] = static_cast<double>(c[i] - below);
        }
    }
    PoissonResult out;
    for (std::size_t i = 0; i < p; ++i) {
        const double lo = i == 0 ? -kInf : th[i - 1];
        const double expected = std::exp(th[i]) - (i == 0 ? 0.0 : std::exp(th[i - 1]));
        out.intervals.push_back(
            {lo, th[i], expected, stats::mean(counts[i]), stats::dispersion_index(counts[i])});
    }
    out.correlation.assign(p, std::vector<double>(p, 1.0));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            const double c = stats::pearson(counts[i], counts[j]);
            out.correlation[i][j] = c;
            out.correlation[j][i] = c;
        }
    }
    return out;
}

CenterStatistics center_statistics(std::span<const SpectralReport> reports, std::size_t min_replicas)
{
    if (reports.size() < min_replicas) {
        throw DomainError("center_statistics: need at least " + std::to_string(min_replicas) +
                          " replicas");
    }
    std::vector<double> u;
    std::vector<double> x;
    CenterStatistics s;
    for (const auto& r : reports) {
        const double v = r.centers.at(0) / r.L;
        s.in_unit_interval = s.in_unit_interval && v >= 0.0 && v <= 1.0;
        u.push_back(v);
        x.push_back(r.rescaled.at(0));
    }
    s.correlation = stats::pearson(u, x);
    s.ks = stats::ks_statistic(u, stats::uniform_cdf);
    s.p_value = stats::ks_pvalue(s.ks, u.size());
    return s;
}

ShapeDeviation shape_deviation(const SpectralReport& report, std::size_t k)
{
    if (k < 1 || k > report.h.size()) {
        throw DomainError("shape_deviation: k out of range");
    }
    const std::vector<double> ts = shape_grid();
    ShapeDeviation d;
    for (std::size_t q = 0; q < ts.size(); ++q) {
        if (std::abs(ts[q]) <= 2.0) {
            d.h = std::max(d.h, std::abs(report.h[k - 1][q] - 1.0 / std::cosh(ts[q])));
            d.b = std::max(d.b, std::abs(report.b[k - 1][q] + 2.0 * std::tanh(ts[q])));
        }
    }
    return d;
}

DecayFit decay_fit(const SpectralReport& report, std::size_t k)
{
    if (k < 1 || k > report.decay.size()) {
        throw DomainError("decay_fit: k out of range");
    }
    if (!report.decay_valid[k - 1]) {
        throw InsufficientDomain("decay_fit: no usable domain for k = " + std::to_string(k));
    }
    return report.decay[k - 1];
}

bool ZeroGeometry::within_band() const noexcept
{
    return std::all_of(offset_residual.begin(), offset_residual.end(),
                       [this](double r) { return std::abs(r) <= band; });
}

ZeroGeometry zero_geometry(const SpectralReport& report, std::size_t i)
{
    if (i < 2 || i > report.lambdas.size()) {
        throw DomainError("zero_geometry: need 2 <= i <= k");
    }
    const double a = report.a_L;
    const double sa = std::sqrt(a);
    const double lla = std::log(std::log(a));
    ZeroGeometry z;
    z.band = lla * lla / sa;

    const std::vector<double> c = sorted_centers(report, i);
    const double Ui = report.centers[i - 1];
    const auto p = static_cast<std::size_t>(std::find(c.begin(), c.end(), Ui) - c.begin());
    const std::vector<double>& zeros = report.zeros[i - 1];
    const double shift = 0.75 * std::log(a) / sa;
    for (std::size_t q = 0; q < zeros.size() && q + 1 < c.size(); ++q) {
        // zero q sits between c[q] and c[q + 1], next to the centre away from U_i
        const double offset = q < p ? zeros[q] - c[q] : c[q + 1] - zeros[q];
        z.offset_residual.push_back(offset - shift);
    }

    const auto& mx = report.maxima[i - 1];
    double lpeak = -kInf;
    for (const auto& m : mx) {
        lpeak = std::max(lpeak, m.log_abs);
    }
    for (std::size_t q = 0; q < mx.size() && q < c.size(); ++q) {
        if (q == p) {
            continue;
        }
        z.argmax_distance.push_back(std::abs(mx[q].x - c[q]));
        z.amplitude_residual.push_back(mx[q].log_abs - lpeak + sa * std::abs(c[q] - Ui));
    }
    const auto& shapes = report.local_shape[i - 1];
    z.local_shape_median = shapes.empty() ? 0.0 : stats::median(shapes);
    // consecutive nodal intervals carry opposite signs by construction of the zeros
    z.sign_alternates = zeros.size() + 1 == mx.size();
    return z;
}

NeumannGap neumann_gap(std::span<const SpectralReport> dirichlet,
                       std::span<const SpectralReport> neumann)
{
    if (dirichlet.size() != neumann.size() || dirichlet.empty()) {
        throw PairingMismatch("neumann_gap: report counts differ");
    }
    const std::size_t k = std::min(dirichlet.front().lambdas.size(), neumann.front().lambdas.size());
    std::vector<std::vector<double>> dl(k);
    std::vector<std::vector<double>> du(k);
    NeumannGap g;
    for (std::size_t j = 0; j < dirichlet.size(); ++j) {
        const auto& d = dirichlet[j];
        const auto& n = neumann[j];
        if (d.seed != n.seed || d.replica != n.replica || d.fingerprint != n.fingerprint ||
            d.bc != BoundaryCondition::Dirichlet || n.bc != BoundaryCondition::Neumann) {
            throw PairingMismatch("neumann_gap: replica " + std::to_string(d.replica) +
                                  " is not paired with the same noise");
        }
        const double sa = std::sqrt(d.a_L);
        const bool exact = n.log_dn_gap.size() >= k;
        for (std::size_t q = 0; q < k; ++q) {
            const double diff = n.lambdas[q] - d.lambdas[q];
            dl[q].push_back(exact ? n.log_dn_gap[q] + std::log(sa) : std::log(std::abs(diff) * sa));
            du[q].push_back(std::abs(n.centers[q] - d.centers[q]) * sa);
        }
        if (exact ? n.dn_gap_sign[0] > 0 : n.lambdas[0] > d.lambdas[0]) {
            ++g.ground_violations;
        }
    }
    for (std::size_t q = 0; q < k; ++q) {
        g.median_log_lambda_gap.push_back(stats::median(dl[q]));
        g.median_lambda_gap.push_back(std::exp(g.median_log_lambda_gap.back()));
        g.median_center_gap.push_back(stats::median(du[q]));
    }
    return g;
}

ExplosionTest explosion_pp_test(double a, std::size_t reps, const ExplosionTestConfig& cfg)
{
    if (a < 2.0) {
        throw DomainError("explosion_pp_test: a must be at least 2");
    }
    if (reps == 0) {
        throw DomainError("explosion_pp_test: reps must be positive");
    }
    ExplosionTest out;
    out.a = a;
    out.m = std::exp(log_mean_explosion_time(a));
    StreamingConfig sc = StreamingConfig::defaults(a);
    sc.dt_well = cfg.dt_well;
    const bool counting = cfg.horizon > 0.0;
    const double horizon = counting ? cfg.horizon * out.m : 1e4 * out.m;
    out.first.assign(reps, 0.0);
    out.counts.assign(counting ? reps : 0, 0.0);

    const auto n = static_cast<std::ptrdiff_t>(reps);
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads())
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        const auto rep = static_cast<std::uint64_t>(r);
        std::vector<double> z = streaming_explosions(a, horizon, counting ? 0 : 1, cfg.seed, rep, sc);
        if (counting && z.empty()) {
            // no explosion inside the counting horizon: continue for the first one
            const auto more = streaming_explosions(a, 1e4 * out.m, 1, cfg.seed, rep, sc);
            out.first[static_cast<std::size_t>(r)] = more.empty() ? kInf : more.front() / out.m;
        } else {
            out.first[static_cast<std::size_t>(r)] = z.empty() ? kInf : z.front() / out.m;
        }
        if (counting) {
            out.counts[static_cast<std::size_t>(r)] = static_cast<double>(z.size());
        }
    }
    out.mean = stats::mean(out.first);
    out.ks = stats::ks_statistic(out.first, stats::exponential_cdf);
    out.dispersion = counting ? stats::dispersion_index(out.counts) : 0.0;
    return out;
}

HittingEstimate hitting_monte_carlo(double a, double x, double y, double z, std::size_t paths,
                                    double dt, std::uint64_t seed)
{
    if (!(y < x && x < z) || paths == 0 || !(dt > 0.0)) {
        throw DomainError("hitting_monte_carlo: need y < x < z, paths > 0, dt > 0");
    }
    const rng::Gaussian gauss(seed, static_cast<std::uint32_t>(rng::Stream::Hitting));
    const double sd = std::sqrt(dt);
    std::size_t low = 0;
    for (std::size_t p = 0; p < paths; ++p) {
        double u = x;
        std::uint64_t index = 0;
        for (;;) {
            // Strang step; the Brownian part is checked for bridge crossings
            const double u0 = drift_flow(a, u, 0.5 * dt);
            const double u1 = u0 + sd * gauss(p, index++);
            if (u1 <= y) {
                ++low;
                break;
            }
            if (u1 >= z) {
                break;
            }
            const double cross_y = std::exp(-2.0 * (u0 - y) * (u1 - y) / dt);
            const double cross_z = std::exp(-2.0 * (z - u0) * (z - u1) / dt);
            const double v = 0.5 * (1.0 + std::erf(gauss(p, index++) / std::sqrt(2.0)));
            if (v < cross_y) {
                ++low;
                break;
            }
            if (v < cross_y + cross_z) {
                break;
            }
            u = drift_flow(a, u1, 0.5 * dt);
            if (u <= y) {
                ++low;
                break;
            }
            if (u >= z) {
                break;
            }
        }
    }
    HittingEstimate e;
    e.p = static_cast<double>(low) / static_cast<double>(paths);
    e.standard_error = std::sqrt(std::max(e.p * (1.0 - e.p), 1e-12) / static_cast<double>(paths));
    return e;
}

ExcursionProfile excursion_diagnostic(double a, double L, double dx, std::uint64_t seed,
                                      std::uint64_t replica)
{
    const auto b = sample_brownian(Grid(L, dx), seed, replica);
    return excursion_profile(integrate(a, b, Start::PlusInfinity), a);
}

} // namespace anderson
