#include "anderson/errors.hpp"
#include "anderson/formulas.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace anderson;

// Reference values computed with 40-digit arbitrary-precision quadrature and,
// for |a| < 10, cross-checked against the power series
//   m(a) = sqrt(2 pi)/3 sum_n (2a)^n/n! 6^{(2n+1)/6} Gamma((2n+1)/6).

TEST_CASE("ln m(a) against reference values")
{
    struct Ref {
        double a;
        double log_m;
    };
    const Ref refs[] = {
        {0.0, 1.8356862578194793},   {1.0, 3.962123489764283},     {-1.0, 1.1186433933015212},
        {2.0, 8.38487072464398},     {3.0, 14.473609106061392},    {4.0, 21.79861634648248},
        {6.25, 41.9019409882768},    {9.0, 72.05003079728057},     {25.0, 332.86946115557219},
        {-25.0, -0.46471052644347642},
    };
    for (const auto& r : refs) {
        CAPTURE(r.a);
        CHECK(std::abs(log_mean_explosion_time(r.a) - r.log_m) <= 1e-10 * std::max(1.0, r.log_m));
    }
    CHECK(mean_explosion_time_at_zero() == doctest::Approx(6.269435118352459).epsilon(1e-14));
    CHECK(std::exp(log_mean_explosion_time(0.0)) ==
          doctest::Approx(mean_explosion_time_at_zero()).epsilon(1e-11));
}

TEST_CASE("ln m is increasing and convex")
{
    double prev2 = log_mean_explosion_time(-6.0);
    double prev1 = log_mean_explosion_time(-5.5);
    for (double a = -5.0; a <= 12.0; a += 0.5) {
        const double cur = log_mean_explosion_time(a);
        CHECK(cur > prev1);
        CHECK(cur - 2 * prev1 + prev2 >= -1e-8);
        prev2 = prev1;
        prev1 = cur;
    }
}

TEST_CASE("large-a ratio approaches 1 from above")
{
    auto ratio = [](double a) {
        return std::exp(log_mean_explosion_time(a) + 0.5 * std::log(a) - (8.0 / 3.0) * std::pow(a, 1.5)) /
               std::numbers::pi;
    };
    CHECK(ratio(4.0) == doctest::Approx(1.013795).epsilon(1e-5));
    CHECK(ratio(6.25) == doctest::Approx(1.006859).epsilon(1e-5));
    CHECK(ratio(9.0) == doctest::Approx(1.003921).epsilon(1e-5));
    CHECK(ratio(25.0) == doctest::Approx(1.000836).epsilon(1e-5));
}

TEST_CASE("a_of_L")
{
    struct Ref {
        double L;
        double a_L;
    };
    const Ref refs[] = {{100.0, 1.1815508312063874}, {200.0, 1.3563373083450936},
                        {2000.0, 1.8504624152754238}, {1e4, 2.1505251229304188},
                        {1e6, 2.9016160677218084}};
    for (const auto& r : refs) {
        const auto s = a_of_L(r.L);
        CHECK(s.a_L == doctest::Approx(r.a_L).epsilon(1e-9));
        CHECK(std::abs(std::exp(log_mean_explosion_time(s.a_L)) / r.L - 1.0) < 1e-8);
        CHECK(s.t_L == doctest::Approx(std::log(s.a_L) / std::sqrt(s.a_L)));
        CHECK(s.kappa_L > 0.0);
    }
    CHECK(std::abs(a_of_L(1e6).a_L / a_L_expansion(1e6) - 1.0) < 0.05);
    CHECK_THROWS_AS(a_of_L(6.0), OutOfRange);
    CHECK(a_of_L(300.0).a_L < a_of_L(301.0).a_L);
}

TEST_CASE("density of states")
{
    CHECK(density_of_states(25.0) == doctest::Approx(1.5915534095727391).epsilon(1e-9));
    CHECK(density_of_states(-1.0) == doctest::Approx(0.019022676912912973).epsilon(1e-9));
    CHECK(density_of_states(-30.0) < 1e-100);
    CHECK(std::abs(density_of_states(25.0) / (5.0 / std::numbers::pi) - 1.0) < 0.25);
}

TEST_CASE("invariant density")
{
    struct Ref {
        double a;
        double x;
        double f;
    };
    const Ref refs[] = {{4.0, 2.0, 1.120676010123563},     {4.0, 0.0, 2.61218644371759e-5},
                        {1.0, 1.0, 0.7369147132184316},    {25.0, 5.0, 1.7833786429175695},
                        {0.0, 0.0, 0.3260920149597983},    {0.0, -3.0, 0.01711951425493319}};
    for (const auto& r : refs) {
        CAPTURE(r.a);
        CAPTURE(r.x);
        CHECK(invariant_density(r.a, r.x) == doctest::Approx(r.f).epsilon(1e-8));
    }
    CHECK(invariant_mass(4.0, -13.0, 13.0) == doctest::Approx(0.9999999999471159).epsilon(1e-9));
    // band around the well bottom at a = 25, y = 2
    const double half = 2.0 / std::pow(25.0, 0.25);
    const double band = invariant_mass(25.0, 5.0 - half, 5.0 + half);
    CHECK(band == doctest::Approx(0.9999258848456511).epsilon(1e-8));
    CHECK(band >= 1.0 - std::exp(-4.0));
    for (double x = -30.0; x <= 30.0; x += 0.7) {
        CHECK(invariant_density(1.0, x) >= 0.0);
    }
}

TEST_CASE("invariant density normalization over the line")
{
    // tails decay like 1 / (m x^2): integrate the far tails analytically
    for (double a : {0.0, 1.0, 4.0, 25.0}) {
        CAPTURE(a);
        const double R = 400.0;
        const double core = invariant_mass(a, -R, R);
        const double m = std::exp(log_mean_explosion_time(a));
        const double tails = 2.0 / (m * R);
        CHECK(std::abs(core + tails - 1.0) <= 1e-6);
    }
}

TEST_CASE("hitting probabilities")
{
    CHECK(hitting_probability(1.0, 0.8, -2.0, 1.2) ==
          doctest::Approx(0.021145363706974208).epsilon(1e-9));
    CHECK(hitting_probability(1.0, -2.0 + 1e-9, -2.0, 1.2) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(hitting_probability(1.0, 1.2 - 1e-9, -2.0, 1.2) < 1e-6);
    double prev = 1.0;
    for (double x = -1.9; x < 1.2; x += 0.1) {
        const double p = hitting_probability(1.0, x, -2.0, 1.2);
        CHECK(p <= prev);
        prev = p;
    }
    CHECK_THROWS_AS(hitting_probability(1.0, 2.0, -2.0, 1.2), DomainError);
    // heavy barrier: still finite and tiny
    const double p = hitting_probability(25.0, 5.0, -5.0, 6.0);
    CHECK(p > 0.0);
    CHECK(p < 1e-50);
}

TEST_CASE("scaling table")
{
    const ScalingTable t(0.0, 4.0, 81);
    CHECK(t.order() == 3);
    for (std::size_t i = 1; i < t.log_m().size(); ++i) {
        CHECK(t.log_m()[i] > t.log_m()[i - 1]);
    }
    CHECK(t.interpolate_log_m(2.0) == doctest::Approx(8.38487072464398).epsilon(1e-12));
    CHECK(t.a_of_L(2000.0) == doctest::Approx(1.8504624152754238).epsilon(1e-4));
    CHECK_THROWS_AS(t.a_of_L(1e30), OutOfRange);
}
