#include "anderson/analysis.hpp"
#include "anderson/ensemble.hpp"
#include "anderson/errors.hpp"
#include "anderson/formulas.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace anderson;

TEST_CASE("shape grid")
{
    const auto t = shape_grid();
    REQUIRE(t.size() == kShapePoints);
    CHECK(t.front() == -kShapeHalfWidth);
    CHECK(t.back() == kShapeHalfWidth);
    CHECK(t[kShapePoints / 2] == 0.0);
}

TEST_CASE("report invariants")
{
    const SpectralReport r = run_realization(200.0, 1e-3, 4, BoundaryCondition::Dirichlet, 5, 2);
    REQUIRE(r.lambdas.size() == 4);
    CHECK(r.a_L == doctest::Approx(a_of_L(200.0).a_L).epsilon(1e-12));
    CHECK(std::is_sorted(r.lambdas.begin(), r.lambdas.end()));
    for (std::size_t j = 0; j < 4; ++j) {
        const double x = 4.0 * std::sqrt(r.a_L) * (r.lambdas[j] + r.a_L);
        CHECK(std::abs(x - r.rescaled[j]) <= 1e-12 * std::max(1.0, std::abs(x)));
        CHECK(r.centers[j] >= 0.0);
        CHECK(r.centers[j] <= r.L);
        CHECK(r.h[j].size() == kShapePoints);
        CHECK(r.b[j].size() == kShapePoints);
        CHECK(r.zeros[j].size() == j);
        if (r.decay_valid[j]) {
            CHECK(r.decay[j].slope < 0.0);
        }
    }
    CHECK(std::is_sorted(r.counts_below.begin(), r.counts_below.end()));
    for (std::size_t i = 2; i <= 4; ++i) {
        CHECK(zero_geometry(r, i).sign_alternates);
    }
    CHECK_THROWS_AS(zero_geometry(r, 1), DomainError);
    CHECK_THROWS_AS(run_realization(200.0, 1e-3, 33, BoundaryCondition::Dirichlet, 5, 2),
                    DomainError);
}

TEST_CASE("argmax is invariant under positive rescaling")
{
    const BrownianPath b = sample_brownian(Grid(50.0, 1e-3), 9, 0);
    auto pairs = bottom_eigenpairs(assemble(white_noise(b), BoundaryCondition::Dirichlet), 2);
    for (auto& p : pairs) {
        const LocalizationData before = localization_data(p);
        for (double c : {1e-3, 7.5}) {
            EigenPair q = p;
            for (std::size_t i = 0; i < q.phi.size(); ++i) {
                q.phi[i] *= c;
                q.log_abs[i] += std::log(c);
            }
            CHECK(localization_data(q).U == before.U);
        }
    }
}

TEST_CASE("zero noise Neumann shift")
{
    const double L = 10.0;
    const BrownianPath z = zero_path(Grid(L, 1e-3));
    RealizationOptions opt;
    opt.thresholds.clear();
    const auto d = spectral_report(z, BoundaryCondition::Dirichlet, 1, opt);
    const auto n = spectral_report(z, BoundaryCondition::Neumann, 1, opt);
    const double pi_L = std::numbers::pi / L;
    CHECK(std::abs(n.lambdas[0] - d.lambdas[0] + pi_L * pi_L) < 1e-3);
}

TEST_CASE("Neumann gap pairing")
{
    EnsembleConfig c;
    c.L = 50.0;
    c.k = 2;
    c.reps = 4;
    c.bc = BoundarySelection::Both;
    const EnsembleResult r = run_ensemble(c);
    const NeumannGap g = neumann_gap(r.dirichlet, r.neumann);
    CHECK(g.ground_violations == 0);
    REQUIRE(g.median_lambda_gap.size() == 2);
    for (std::size_t i = 0; i < r.dirichlet.size(); ++i) {
        CHECK(r.dirichlet[i].fingerprint == r.neumann[i].fingerprint);
    }
    c.seed = 2;
    const EnsembleResult other = run_ensemble(c);
    CHECK_THROWS_AS(neumann_gap(r.dirichlet, other.neumann), PairingMismatch);
}

TEST_CASE("merge is order independent")
{
    EnsembleConfig c;
    c.L = 40.0;
    c.k = 2;
    c.reps = 3;
    const EnsembleResult a = run_ensemble(c);
    c.first_replica = 3;
    const EnsembleResult b = run_ensemble(c);
    const EnsembleResult ab = merge(a, b);
    const EnsembleResult ba = merge(b, a);
    REQUIRE(ab.dirichlet.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(ab.dirichlet[i].replica == i);
        CHECK(ab.dirichlet[i].lambdas == ba.dirichlet[i].lambdas);
    }
    CHECK(ab.config.first_replica == 0);
    CHECK_THROWS_AS(merge(a, a), DomainError);

    const EnsembleSummary s1 = summarize(ab);
    const EnsembleSummary s2 = summarize(ba);
    REQUIRE(s1.tests.size() == s2.tests.size());
    for (std::size_t i = 0; i < s1.tests.size(); ++i) {
        CHECK(s1.tests[i].statistic == s2.tests[i].statistic);
    }
}

TEST_CASE("parallel ensemble matches the serial reference")
{
    EnsembleConfig c;
    c.L = 40.0;
    c.k = 3;
    c.reps = 4;
    c.bc = BoundarySelection::Both;
    const EnsembleResult p = run_ensemble(c);
    const EnsembleResult s = run_ensemble_serial(c);
    REQUIRE(p.dirichlet.size() == s.dirichlet.size());
    for (std::size_t i = 0; i < p.dirichlet.size(); ++i) {
        CHECK(p.dirichlet[i].lambdas == s.dirichlet[i].lambdas);
        CHECK(p.neumann[i].centers == s.neumann[i].centers);
        CHECK(p.dirichlet[i].counts_below == s.dirichlet[i].counts_below);
    }
}

TEST_CASE("statistics guards")
{
    EnsembleConfig c;
    c.L = 40.0;
    c.k = 1;
    c.reps = 2;
    const EnsembleResult r = run_ensemble(c);
    CHECK_THROWS_AS(gumbel_statistic(r.dirichlet), DomainError);
    CHECK_THROWS_AS(center_statistics(r.dirichlet), DomainError);
    CHECK_THROWS_AS(explosion_pp_test(1.5, 10), DomainError);
    c.reps = 0;
    CHECK_THROWS_AS(run_ensemble(c), DomainError);
}

TEST_CASE("explosion test on a small sample")
{
    ExplosionTestConfig cfg;
    cfg.horizon = 2.0;
    const ExplosionTest t = explosion_pp_test(2.0, 8, cfg);
    REQUIRE(t.first.size() == 8);
    CHECK(t.m == doctest::Approx(std::exp(log_mean_explosion_time(2.0))));
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(t.first[i] > 0.0);
        CHECK(t.counts[i] >= (t.first[i] <= 2.0 ? 1.0 : 0.0));
    }
    CHECK(t.ks >= 0.0);
    CHECK(t.ks <= 1.0);
}

TEST_CASE("hitting probability Monte Carlo")
{
    const HittingEstimate e = hitting_monte_carlo(0.5, 0.2, -1.0, 1.5, 4000, 1e-3, 3);
    const double exact = hitting_probability(0.5, 0.2, -1.0, 1.5);
    CHECK(e.standard_error > 0.0);
    CHECK(std::abs(e.p - exact) <= 4.0 * e.standard_error);
}

TEST_CASE("boundary gap identity")
{
    for (double L : {3.0, 6.0}) {
        CAPTURE(L);
        const BrownianPath b = sample_brownian(Grid(L, 1e-3), 12, 0);
        const auto xi = white_noise(b);
        const auto d = bottom_eigenpairs(assemble(xi, BoundaryCondition::Dirichlet), 2);
        const auto n = bottom_eigenpairs(assemble(xi, BoundaryCondition::Neumann), 2);
        for (std::size_t j = 0; j < 2; ++j) {
            const SignedLog g = boundary_gap(d[j], n[j]);
            const double plain = n[j].lambda - d[j].lambda;
            CHECK(g.sign * std::exp(g.log_abs) == doctest::Approx(plain).epsilon(1e-5));
        }
    }
    const auto [d, n] = spectral_report_pair(sample_brownian(Grid(200.0, 1e-3), 12, 0), 1);
    REQUIRE(n.log_dn_gap.size() == 1);
    CHECK(d.log_dn_gap == n.log_dn_gap);
    CHECK(n.dn_gap_sign[0] == -1);
    CHECK(std::isfinite(n.log_dn_gap[0]));
}
