#include "anderson/riccati.hpp"

#include "anderson/errors.hpp"
#include "anderson/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace anderson {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double g_factor(double a, double tau) noexcept
{
    if (a > 0.0) {
        const double s = std::sqrt(a);
        return std::tanh(s * tau) / s;
    }
    if (a < 0.0) {
        const double s = std::sqrt(-a);
        return std::tan(s * tau) / s;
    }
    return tau;
}

/// Exact drift flow with detection of the passage through -M.
class Flow {
public:
    Flow(double a, double M) : a_(a), M_(M), t_cap_(time_to_minus_infinity(a, -M)) {}

    double a() const noexcept { return a_; }
    double cap() const noexcept { return M_; }

    /// Advances x by tau (g = g_factor(a, tau)). Returns true and the offset
    /// at which -M is reached if that happens within tau.
    bool advance(double& x, double tau, double g, double& t_hit) const noexcept
    {
        if (x <= -M_) {
            t_hit = 0.0;
            return true;
        }
        const double den = 1.0 + x * g;
        if (den > 0.0) {
            const double y = (x + a_ * g) / den;
            if (y > -M_) {
                x = y;
                return false;
            }
        }
        t_hit = std::clamp(time_to_minus_infinity(a_, x) - t_cap_, 0.0, tau);
        return true;
    }

    /// Half flow, noise w, half flow over a step h; gh = g_factor(a, h/2).
    bool strang(double& x, double h, double gh, double w, double& t_hit) const noexcept
    {
        double th = 0.0;
        if (advance(x, 0.5 * h, gh, th)) {
            t_hit = th;
            return true;
        }
        x += w;
        if (x <= -M_) {
            t_hit = 0.5 * h;
            return true;
        }
        if (advance(x, 0.5 * h, gh, th)) {
            t_hit = 0.5 * h + th;
            return true;
        }
        return false;
    }

private:
    double a_;
    double M_;
    double t_cap_;
};

class GridIntegrator {
public:
    GridIntegrator(double a, const BrownianPath& b, const RiccatiConfig& cfg, RiccatiTrajectory& out)
        : flow_(a, cfg.x_max), b_(b), cfg_(cfg), out_(out), L_(b.grid.length()),
          tail_(tail_time(a, cfg.x_max)), half_(tail_half(a, cfg.x_max)),
          g_full_(g_factor(a, 0.5 * b.grid.dx())),
          g_sub_(g_factor(a, 0.5 * b.grid.dx() / cfg.substeps))
    {
    }

    void start_in_tail()
    {
        in_tail_ = true;
        resume_ = half_;
        pending_zeta_ = -kInf;
    }

    void start_at(double x0) { x_ = x0; }

    void run()
    {
        const std::size_t n = b_.n();
        const double dx = b_.grid.dx();
        if (cfg_.record_samples) {
            out_.samples.reserve(n + 1);
            record_node(0.0);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double t0 = static_cast<double>(i) * dx;
            const double t1 = i + 1 == n ? L_ : static_cast<double>(i + 1) * dx;
            cell(t0, t1, b_.increment(i));
            if (cfg_.record_samples) {
                record_node(t1);
            }
        }
        if (in_tail_) {
            out_.exploded_at_end = true;
            out_.x_end = pending_zeta_ <= L_ ? kInf : -kInf;
        } else {
            out_.x_end = x_;
        }
    }

private:
    double clip(double x) const noexcept { return std::clamp(x, -cfg_.x_max, cfg_.x_max); }

    void record_node(double t)
    {
        double x = x_;
        if (in_tail_) {
            x = t < pending_zeta_ ? -cfg_.x_max : cfg_.x_max;
        }
        out_.samples.push_back({t, clip(x), SampleEvent::None});
    }

    void explode(double te)
    {
        const double zeta = te + half_;
        if (zeta <= L_) {
            out_.zeta.push_back(zeta);
            out_.restarts.push_back({te, te + tail_});
        }
        if (cfg_.record_samples) {
            out_.samples.push_back({te, -cfg_.x_max, SampleEvent::Explode});
        }
        in_tail_ = true;
        pending_zeta_ = zeta;
        resume_ = te + tail_;
    }

    void cell(double t0, double t1, double w)
    {
        const double span = t1 - t0;
        bool full = true; // standard cell length, cached g factors apply
        for (;;) {
            if (in_tail_) {
                if (resume_ >= t1) {
                    return;
                }
                if (resume_ > t0) {
                    w *= (t1 - resume_) / (t1 - t0);
                    t0 = resume_;
                    full = false;
                }
                in_tail_ = false;
                x_ = cfg_.x_max;
                if (cfg_.record_samples) {
                    out_.samples.push_back({resume_, cfg_.x_max, SampleEvent::Restart});
                }
            }
            const int parts = std::abs(x_) > cfg_.x_mono ? cfg_.substeps : 1;
            const double h = (t1 - t0) / parts;
            double gh = parts == 1 ? g_full_ : g_sub_;
            if (!full) {
                gh = g_factor(flow_.a(), 0.5 * h);
            }
            const double wp = w / parts;
            bool exploded = false;
            for (int j = 0; j < parts; ++j) {
                const double ts = t0 + j * h;
                double th = 0.0;
                if (flow_.strang(x_, h, gh, wp, th)) {
                    explode(ts + th);
                    const double next = ts + h;
                    w *= (t1 - next) / (t1 - t0);
                    t0 = next;
                    exploded = true;
                    break;
                }
            }
            if (!exploded || t0 >= t1 - 1e-12 * span) {
                return;
            }
            full = false;
        }
    }

    Flow flow_;
    const BrownianPath& b_;
    const RiccatiConfig& cfg_;
    RiccatiTrajectory& out_;
    double L_;
    double tail_;
    double half_;
    double g_full_;
    double g_sub_;

    double x_ = 0.0;
    bool in_tail_ = false;
    double resume_ = 0.0;
    double pending_zeta_ = -kInf;
};

RiccatiTrajectory make_trajectory(double a, const BrownianPath& b, Start start,
                                  const RiccatiConfig& cfg)
{
    cfg.validate();
    if (b.grid.dx() * cfg.x_max > 0.5) {
        throw StepTooCoarse("riccati: dx * x_max = " + std::to_string(b.grid.dx() * cfg.x_max) +
                            " exceeds 0.5; refine the grid or lower the cap");
    }
    RiccatiTrajectory tr;
    tr.a = a;
    tr.start = start;
    tr.grid = b.grid;
    tr.cfg = cfg;
    return tr;
}

} // namespace

RiccatiConfig RiccatiConfig::defaults(double a)
{
    RiccatiConfig c;
    c.x_max = 10.0 * std::max(std::sqrt(std::abs(a)), 10.0);
    c.x_mono = 2.0 * std::sqrt(std::abs(a) + 1.0);
    c.substeps = 4;
    return c;
}

void RiccatiConfig::validate() const
{
    if (!(x_mono > 0.0) || !(x_max > x_mono) || substeps < 1) {
        throw DomainError("riccati config: need x_max > x_mono > 0 and substeps >= 1");
    }
}

double time_to_minus_infinity(double a, double x) noexcept
{
    if (a > 0.0) {
        const double s = std::sqrt(a);
        if (x >= -s) {
            return kInf;
        }
        return std::log1p(2.0 * s / (-x - s)) / (2.0 * s);
    }
    if (a == 0.0) {
        return x < 0.0 ? -1.0 / x : kInf;
    }
    const double s = std::sqrt(-a);
    if (x < 0.0) {
        return std::atan(s / -x) / s;
    }
    return (0.5 * std::numbers::pi + std::atan(x / s)) / s;
}

double tail_half(double a, double M) noexcept
{
    return time_to_minus_infinity(a, -M);
}

double tail_time(double a, double M) noexcept
{
    return 2.0 * tail_half(a, M);
}

double drift_flow(double a, double x, double tau) noexcept
{
    const double g = g_factor(a, tau);
    return (x + a * g) / (1.0 + x * g);
}

std::vector<double> RiccatiTrajectory::node_values() const
{
    std::vector<double> v;
    v.reserve(grid.n() + 1);
    for (const auto& s : samples) {
        if (s.event == SampleEvent::None) {
            v.push_back(s.x);
        }
    }
    return v;
}

RiccatiTrajectory integrate(double a, const BrownianPath& b, Start start, const RiccatiConfig& cfg)
{
    RiccatiTrajectory tr = make_trajectory(a, b, start, cfg);
    GridIntegrator it(a, b, tr.cfg, tr);
    if (start == Start::PlusInfinity) {
        it.start_in_tail();
    } else {
        it.start_at(0.0);
    }
    it.run();
    return tr;
}

RiccatiTrajectory integrate(double a, const BrownianPath& b, Start start)
{
    return integrate(a, b, start, RiccatiConfig::defaults(a));
}

RiccatiTrajectory integrate_from(double a, const BrownianPath& b, double x0,
                                 const RiccatiConfig& cfg)
{
    if (!std::isfinite(x0)) {
        throw DomainError("integrate_from: initial value must be finite");
    }
    RiccatiTrajectory tr = make_trajectory(a, b, Start::Zero, cfg);
    GridIntegrator it(a, b, tr.cfg, tr);
    it.start_at(x0);
    it.run();
    return tr;
}

std::size_t explosion_count(double a, const BrownianPath& b, Start start)
{
    RiccatiConfig cfg = RiccatiConfig::defaults(a);
    cfg.record_samples = false;
    return integrate(a, b, start, cfg).count();
}

std::size_t eigenvalue_count(double a, const BrownianPath& b, Start start)
{
    RiccatiConfig cfg = RiccatiConfig::defaults(a);
    cfg.record_samples = false;
    const RiccatiTrajectory tr = integrate(a, b, start, cfg);
    if (start == Start::Zero) {
        return tr.count() + (tr.x_end <= 0.0 ? 1 : 0);
    }
    return tr.count();
}

double eigenvalue_bisection(const BrownianPath& b, std::size_t k, Start start, double tol_a)
{
    if (!(tol_a > 0.0) || k == 0) {
        throw DomainError("eigenvalue_bisection: need k >= 1 and tol_a > 0");
    }
    constexpr int kMaxDoublings = 60;
    double lo = 0.0; // eigenvalue_count(lo) >= k
    double hi = 0.0; // eigenvalue_count(hi) < k
    if (eigenvalue_count(0.0, b, start) >= k) {
        double step = 1.0;
        for (int i = 0;; ++i) {
            if (i == kMaxDoublings) {
                throw BracketFailure("eigenvalue_bisection: no upper bracket");
            }
            hi = step;
            if (eigenvalue_count(hi, b, start) < k) {
                break;
            }
            lo = hi;
            step *= 2.0;
        }
    } else {
        double step = 1.0;
        for (int i = 0;; ++i) {
            if (i == kMaxDoublings) {
                throw BracketFailure("eigenvalue_bisection: no lower bracket");
            }
            lo = -step;
            if (eigenvalue_count(lo, b, start) >= k) {
                break;
            }
            hi = lo;
            step *= 2.0;
        }
    }
    while (hi - lo >= tol_a) {
        const double mid = 0.5 * (lo + hi);
        if (eigenvalue_count(mid, b, start) >= k) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (eigenvalue_count(lo, b, start) < k) {
        throw BracketFailure("eigenvalue_bisection: counts not monotone across the bracket");
    }
    return 0.5 * (lo + hi);
}

RiccatiTrajectory reversed_trajectory(double a, const BrownianPath& b, const RiccatiConfig& cfg)
{
    RiccatiTrajectory tr = integrate(a, negate(reverse_brownian(b)), Start::PlusInfinity, cfg);
    for (auto& s : tr.samples) {
        s.x = -s.x;
    }
    tr.x_end = -tr.x_end;
    tr.reversed = true;
    return tr;
}

RiccatiTrajectory reversed_trajectory(double a, const BrownianPath& b)
{
    return reversed_trajectory(a, b, RiccatiConfig::defaults(a));
}

bool check_interlacing(const RiccatiTrajectory& fwd, const RiccatiTrajectory& bwd, double L)
{
    const std::size_t k = fwd.count();
    if (k != bwd.count()) {
        return false;
    }
    const double slack = 2.0 * fwd.grid.dx();
    for (std::size_t i = 1; i <= k; ++i) {
        const double prev = i == 1 ? 0.0 : fwd.zeta[i - 2];
        const double mid = L - bwd.zeta[k - i];
        if (mid < prev - slack || mid > fwd.zeta[i - 1] + slack) {
            return false;
        }
    }
    return true;
}

double coupling_gap(double a, double a2, const BrownianPath& b)
{
    if (!(a <= a2)) {
        throw DomainError("coupling_gap: need a <= a2");
    }
    if (a == a2) {
        return 0.0;
    }
    const RiccatiConfig cfg = RiccatiConfig::defaults(std::max(std::abs(a), std::abs(a2)));
    const RiccatiTrajectory lo = integrate(a, b, Start::PlusInfinity, cfg);
    const RiccatiTrajectory hi = integrate(a2, b, Start::PlusInfinity, cfg);
    const std::vector<double> xa = lo.node_values();
    const std::vector<double> xb = hi.node_values();
    const double stop = lo.restarts.empty() ? kInf : lo.restarts.front().t_explode;
    double gap = -kInf;
    for (std::size_t i = 0; i < xa.size(); ++i) {
        if (b.grid.x(i) >= stop) {
            break;
        }
        if (std::abs(xa[i]) <= cfg.x_mono && std::abs(xb[i]) <= cfg.x_mono) {
            gap = std::max(gap, xa[i] - xb[i]);
        }
    }
    return gap;
}

StreamingConfig StreamingConfig::defaults(double a)
{
    StreamingConfig c;
    c.riccati = RiccatiConfig::defaults(a);
    c.riccati.record_samples = false;
    return c;
}

namespace {

/// Sequential reader over the on-the-fly Gaussian stream of one replica.
class DrawStream {
public:
    DrawStream(std::uint64_t seed, std::uint64_t replica)
        : gauss_(seed, static_cast<std::uint32_t>(rng::Stream::Streaming)), replica_(replica)
    {
    }

    double next() noexcept
    {
        if (pos_ == buf_.size()) {
            gauss_.fill(replica_, index_, buf_);
            index_ += buf_.size();
            pos_ = 0;
        }
        return buf_[pos_++];
    }

private:
    rng::Gaussian gauss_;
    std::uint64_t replica_;
    std::uint64_t index_ = 0;
    std::array<double, 512> buf_{};
    std::size_t pos_ = buf_.size();
};

} // namespace

std::vector<double> streaming_explosions(double a, double horizon, std::size_t max_explosions,
                                         std::uint64_t seed, std::uint64_t replica,
                                         const StreamingConfig& cfg)
{
    const RiccatiConfig& rc = cfg.riccati;
    rc.validate();
    if (!(cfg.dt > 0.0) || !(cfg.dt_well > 0.0)) {
        throw DomainError("streaming: steps must be positive");
    }
    if (cfg.dt * rc.x_max > 0.5) {
        throw StepTooCoarse("streaming: dt * x_max exceeds 0.5");
    }
    const Flow flow(a, rc.x_max);
    DrawStream draws(seed, replica);
    const double tail = tail_time(a, rc.x_max);
    const double half = tail_half(a, rc.x_max);
    const double h_sub = cfg.dt / rc.substeps;
    const double g_fine = g_factor(a, 0.5 * cfg.dt);
    const double g_sub = g_factor(a, 0.5 * h_sub);
    const double hw = cfg.dt_well;
    const double g_well = g_factor(a, 0.5 * hw);
    const double g_well_full = g_factor(a, hw);
    const double sd_fine = std::sqrt(cfg.dt);
    const double sd_well = std::sqrt(hw);
    auto in_well = [&](double x) { return x > cfg.well_floor && x <= rc.x_mono; };

    std::vector<double> out;
    double t = half; // entrance from +infinity
    double x = rc.x_max;
    while (t < horizon) {
        double th = 0.0;
        bool exploded = false;
        if (in_well(x)) {
            // consecutive well steps share their adjacent half flows
            exploded = flow.advance(x, 0.5 * hw, g_well, th);
            while (!exploded) {
                x += sd_well * draws.next();
                if (!in_well(x) || t + hw >= horizon) {
                    if (flow.advance(x, 0.5 * hw, g_well, th)) {
                        th += 0.5 * hw;
                        exploded = true;
                    }
                    break;
                }
                if (flow.advance(x, hw, g_well_full, th)) {
                    th += 0.5 * hw;
                    exploded = true;
                    break;
                }
                t += hw;
            }
            if (!exploded) {
                t += hw;
                continue;
            }
        } else {
            const double w = sd_fine * draws.next();
            if (std::abs(x) > rc.x_mono) {
                for (int j = 0; j < rc.substeps; ++j) {
                    if (flow.strang(x, h_sub, g_sub, w / rc.substeps, th)) {
                        th += j * h_sub;
                        exploded = true;
                        break;
                    }
                }
            } else {
                exploded = flow.strang(x, cfg.dt, g_fine, w, th);
            }
            if (!exploded) {
                t += cfg.dt;
                continue;
            }
        }
        const double zeta = t + th + half;
        if (zeta > horizon) {
            break;
        }
        out.push_back(zeta);
        if (max_explosions != 0 && out.size() >= max_explosions) {
            break;
        }
        t = t + th + tail;
        x = rc.x_max;
    }
    return out;
}

} // namespace anderson
