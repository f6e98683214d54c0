#include "anderson/errors.hpp"
#include "anderson/riccati.hpp"

#include <algorithm>
#include <cmath>

namespace anderson {

namespace {

struct Node {
    double t;
    double x;
};

std::vector<Node> nodes_of(const RiccatiTrajectory& traj)
{
    std::vector<Node> v;
    v.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        if (s.event == SampleEvent::None) {
            v.push_back({s.t, s.x});
        }
    }
    return v;
}

/// Time at which the segment between nodes p and p+1 crosses `level`.
double crossing(const Node& p, const Node& q, double level)
{
    if (p.x == q.x) {
        return p.t;
    }
    const double w = std::clamp((p.x - level) / (p.x - q.x), 0.0, 1.0);
    return p.t + w * (q.t - p.t);
}

/// Last crossing of `level` from above before node j (0 if never above).
double last_above(const std::vector<Node>& v, std::size_t j, double level)
{
    for (std::size_t p = j; p-- > 0;) {
        if (v[p].x >= level) {
            return crossing(v[p], v[p + 1], level);
        }
    }
    return v.front().t;
}

} // namespace

double heteroclinic_deviation(const RiccatiTrajectory& traj, double a, double upsilon, double t0,
                              double t1)
{
    if (!(a > 0.0)) {
        throw DomainError("heteroclinic_deviation: need a > 0");
    }
    const double s = std::sqrt(a);
    double sup = 0.0;
    for (const auto& p : traj.samples) {
        if (p.event != SampleEvent::None || p.t < t0 || p.t > t1) {
            continue;
        }
        sup = std::max(sup, std::abs(p.x - s * std::tanh(-s * (p.t - upsilon))));
    }
    return sup;
}

ExcursionProfile excursion_profile(const RiccatiTrajectory& traj, double a)
{
    if (!(a > 0.0)) {
        throw DomainError("excursion_profile: need a > 0");
    }
    if (traj.samples.empty()) {
        throw DomainError("excursion_profile: trajectory has no samples");
    }
    const double s = std::sqrt(a);
    const std::vector<Node> v = nodes_of(traj);

    std::size_t j = 0;
    while (j < v.size() && v[j].x > -s) {
        ++j;
    }
    if (j == v.size() || j == 0) {
        throw NoCrossing("excursion_profile: trajectory never reaches -sqrt(a)");
    }

    ExcursionProfile pr{};
    pr.theta = crossing(v[j - 1], v[j], -s);
    pr.upsilon = last_above(v, j, 0.0);
    pr.iota = last_above(v, j, s);

    pr.outcome = traj.exploded_at_end ? ExcursionOutcome::Exploded : ExcursionOutcome::Returned;
    for (const auto& p : traj.samples) {
        if (p.t <= pr.theta) {
            continue;
        }
        if (p.event == SampleEvent::Explode) {
            pr.outcome = ExcursionOutcome::Exploded;
            break;
        }
        if (p.event == SampleEvent::None && p.x >= s) {
            pr.outcome = ExcursionOutcome::Returned;
            break;
        }
    }
    pr.tanh_deviation = heteroclinic_deviation(traj, a, pr.upsilon, pr.iota, pr.theta);
    pr.timing_residual = pr.theta - pr.upsilon - 0.375 * std::log(a) / s;
    return pr;
}

} // namespace anderson
