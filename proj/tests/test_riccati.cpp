#include "anderson/eigen.hpp"
#include "anderson/errors.hpp"
#include "anderson/riccati.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace anderson;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("closed-form flow pieces")
{
    // x' = -4 - x^2 from 0 reaches -inf at pi/4
    CHECK(time_to_minus_infinity(-4.0, 0.0) == doctest::Approx(kPi / 4));
    CHECK(time_to_minus_infinity(0.0, -2.0) == doctest::Approx(0.5));
    CHECK(std::isinf(time_to_minus_infinity(4.0, -1.0)));
    CHECK(tail_half(4.0, 100.0) == doctest::Approx(std::atanh(2.0 / 100.0) / 2.0).epsilon(1e-12));
    CHECK(tail_time(1.0, 50.0) == doctest::Approx(2.0 * tail_half(1.0, 50.0)));
    for (double a : {-3.0, 0.0, 2.5}) {
        // flow maps compose
        const double x = 0.7;
        CHECK(drift_flow(a, drift_flow(a, x, 0.1), 0.2) ==
              doctest::Approx(drift_flow(a, x, 0.3)).epsilon(1e-12));
    }
}

TEST_CASE("zero noise explosions")
{
    const Grid g(3.0, 1e-3);
    const auto b = zero_path(g);
    const auto tr = integrate(-4.0, b, Start::PlusInfinity);
    REQUIRE(tr.count() == 1);
    CHECK(std::abs(tr.zeta[0] - kPi / 2) <= 2 * g.dx());
    CHECK(tr.restarts[0].t_restart - tr.restarts[0].t_explode ==
          doctest::Approx(tail_time(-4.0, tr.cfg.x_max)).epsilon(1e-12));
    CHECK(explosion_count(-4.0, b, Start::PlusInfinity) ==
          sturm_count(assemble(white_noise(b), BoundaryCondition::Dirichlet), 4.0));

    const auto many = integrate(-100.0, b, Start::PlusInfinity);
    CHECK(many.count() == 9);

    const auto calm = integrate(4.0, zero_path(Grid(20.0, 1e-3)), Start::PlusInfinity);
    CHECK(calm.count() == 0);
    const auto xs = calm.node_values();
    for (std::size_t i = 1; i < xs.size(); ++i) {
        REQUIRE(xs[i] <= xs[i - 1]);
    }
    CHECK(xs.back() == doctest::Approx(2.0).epsilon(1e-9));

    const auto flat = integrate(0.0, b, Start::Zero);
    for (double x : flat.node_values()) {
        REQUIRE(x == 0.0);
    }
}

TEST_CASE("step too coarse")
{
    const auto b = zero_path(Grid(10.0, 1e-2));
    RiccatiConfig cfg = RiccatiConfig::defaults(0.0);
    cfg.x_max = 60.0;
    CHECK_THROWS_AS(integrate(0.0, b, Start::PlusInfinity, cfg), StepTooCoarse);
}

TEST_CASE("sample bookkeeping")
{
    const auto b = sample_brownian(Grid(30.0, 1e-3), 3, 0);
    const auto tr = integrate(-1.0, b, Start::PlusInfinity);
    CHECK(tr.node_values().size() == b.n() + 1);
    double tails = 0.0;
    for (std::size_t i = 0; i < tr.count(); ++i) {
        CHECK(tr.restarts[i].t_restart >= tr.restarts[i].t_explode);
        tails += tr.restarts[i].t_restart - tr.restarts[i].t_explode;
        if (i > 0) {
            CHECK(tr.zeta[i] > tr.zeta[i - 1]);
        }
    }
    CHECK(tails == doctest::Approx(tr.count() * tail_time(-1.0, tr.cfg.x_max)));
    CHECK(tr.samples.back().t == 30.0);
}

TEST_CASE("Dirichlet and Neumann counts agree with the matrix")
{
    int agree_d = 0;
    int agree_n = 0;
    const int R = 10;
    for (int r = 0; r < R; ++r) {
        const auto b = sample_brownian(Grid(30.0, 1e-3), 41, static_cast<std::uint64_t>(r));
        const auto w = white_noise(b);
        const auto dop = assemble(w, BoundaryCondition::Dirichlet);
        const auto nop = assemble(w, BoundaryCondition::Neumann);
        for (double a : {-2.0, -0.5, 0.5}) {
            agree_d += eigenvalue_count(a, b, Start::PlusInfinity) == sturm_count(dop, -a);
            agree_n += eigenvalue_count(a, b, Start::Zero) == sturm_count(nop, -a);
        }
    }
    CHECK(agree_d >= 3 * R - 2);
    CHECK(agree_n >= 3 * R - 2);
}

TEST_CASE("eigenvalue bisection")
{
    const auto b = zero_path(Grid::from_points(kPi, 3000));
    const double a1 = eigenvalue_bisection(b, 1, Start::PlusInfinity, 1e-4);
    CHECK(std::abs(-a1 - 1.0) <= std::max(1e-4, 5 * b.grid.dx()));
    const double a2 = eigenvalue_bisection(b, 2, Start::PlusInfinity, 1e-4);
    CHECK(a1 > a2);
    CHECK(-a2 == doctest::Approx(4.0).epsilon(5e-3));

    const auto rb = sample_brownian(Grid(20.0, 1e-3), 2, 0);
    const auto pairs = bottom_eigenpairs(assemble(white_noise(rb), BoundaryCondition::Dirichlet), 2);
    for (std::size_t k = 1; k <= 2; ++k) {
        const double a = eigenvalue_bisection(rb, k, Start::PlusInfinity, 1e-4);
        CHECK(std::abs(-a - pairs[k - 1].lambda) <= 0.05);
    }
}

TEST_CASE("time reversal and interlacing")
{
    const auto z = zero_path(Grid(3.0, 1e-3));
    const auto f = integrate(-4.0, z, Start::PlusInfinity);
    const auto r = reversed_trajectory(-4.0, z);
    CHECK(f.count() == 1);
    CHECK(r.count() == 1);
    CHECK(check_interlacing(f, r, 3.0));
    CHECK(3.0 - r.zeta[0] >= 0.0);
    CHECK(3.0 - r.zeta[0] <= f.zeta[0]);

    int pass = 0;
    for (int i = 0; i < 20; ++i) {
        const auto b = sample_brownian(Grid(20.0, 1e-3), 5, static_cast<std::uint64_t>(i));
        pass += check_interlacing(integrate(-1.0, b, Start::PlusInfinity),
                                  reversed_trajectory(-1.0, b), 20.0);
    }
    CHECK(pass >= 19);

    auto g = f;
    g.zeta.push_back(2.9);
    CHECK_FALSE(check_interlacing(g, r, 3.0));
}

TEST_CASE("monotone coupling")
{
    const auto z = zero_path(Grid(10.0, 1e-3));
    CHECK(coupling_gap(1.0, 2.0, z) <= 0.0);
    const auto b = sample_brownian(Grid(10.0, 1e-3), 6, 0);
    CHECK(coupling_gap(0.5, 0.5, b) == 0.0);
    CHECK(coupling_gap(0.5, 0.501, b) <= 10 * 1e-3);
}

TEST_CASE("heteroclinic descent")
{
    // reflected flow without noise from sqrt(a) - delta follows the tanh profile
    const double a = 25.0;
    const double s = 5.0;
    const double delta = 1e-3;
    const auto z = zero_path(Grid(4.0, 1e-3));
    RiccatiConfig cfg = RiccatiConfig::defaults(a);
    const auto y = integrate_from(a, z, -s + delta, cfg);
    RiccatiTrajectory x = y;
    for (auto& p : x.samples) {
        p.x = -p.x;
    }
    // sqrt(a) tanh(-sqrt(a)(0 - upsilon)) = sqrt(a) - delta
    const double upsilon = std::atanh((s - delta) / s) / s;
    CHECK(heteroclinic_deviation(x, a, upsilon, 0.0, 4.0) < 1e-6);
    CHECK_THROWS_AS(excursion_profile(x, a), NoCrossing);
}

TEST_CASE("streaming explosions are deterministic")
{
    StreamingConfig cfg = StreamingConfig::defaults(0.0);
    const auto a = streaming_explosions(0.0, 50.0, 0, 9, 1, cfg);
    const auto b = streaming_explosions(0.0, 50.0, 0, 9, 1, cfg);
    CHECK(a == b);
    CHECK(!a.empty());
    for (std::size_t i = 1; i < a.size(); ++i) {
        CHECK(a[i] > a[i - 1]);
    }
    const auto first = streaming_explosions(0.0, 50.0, 1, 9, 1, cfg);
    REQUIRE(first.size() == 1);
    CHECK(first[0] == a[0]);
}
