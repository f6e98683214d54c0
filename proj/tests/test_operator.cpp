#include "anderson/eigen.hpp"
#include "anderson/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace anderson;

namespace {

constexpr double kPi = std::numbers::pi;

TridiagonalOperator random_operator(double L, double dx, std::uint64_t seed, BoundaryCondition bc,
                                    std::uint64_t replica = 0)
{
    return assemble(white_noise(sample_brownian(Grid(L, dx), seed, replica)), bc);
}

} // namespace

TEST_CASE("assembled matrix structure")
{
    const auto op = random_operator(10.0, 1e-2, 1, BoundaryCondition::Dirichlet);
    CHECK(op.m() == 999);
    CHECK(op.offdiag.size() == 998);
    for (double e : op.offdiag) {
        REQUIRE(e == -1e4);
    }
    const auto nb = random_operator(10.0, 1e-2, 1, BoundaryCondition::Neumann);
    CHECK(nb.m() == 1001);
    // Dirichlet matrix is the interior block of the Neumann one
    for (std::size_t j = 0; j < op.m(); ++j) {
        REQUIRE(op.diag[j] == nb.diag[j + 1]);
    }
    CHECK(nb.diag.front() == doctest::Approx(1e4 + node_noise(white_noise(sample_brownian(Grid(10.0, 1e-2), 1, 0)))[0]));
}

TEST_CASE("zero noise Dirichlet spectrum on (0, pi)")
{
    const Grid g = Grid::from_points(kPi, 2000);
    const auto op = assemble(white_noise(zero_path(g)), BoundaryCondition::Dirichlet);
    const auto pairs = bottom_eigenpairs(op, 3);
    REQUIRE(pairs.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const double exact = static_cast<double>((k + 1) * (k + 1));
        CHECK(std::abs(pairs[k].lambda - exact) / exact < 1e-4);
        CHECK(pairs[k].k == k + 1);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i <= g.n(); ++i) {
        worst = std::max(worst, std::abs(pairs[0].phi[i] - std::sqrt(2.0 / kPi) * std::sin(g.x(i))));
    }
    CHECK(worst < 1e-4);
    CHECK(pairs[0].phi[0] == 0.0);
    CHECK(pairs[0].phi[g.n()] == 0.0);

    const auto loc = localization_data(pairs[0]);
    CHECK(std::abs(loc.U - kPi / 2) <= g.dx() + 1e-12);
    const auto loc2 = localization_data(pairs[1]);
    REQUIRE(loc2.zeros.size() == 3);
    CHECK(loc2.zeros[0] == 0.0);
    CHECK(std::abs(loc2.zeros[1] - kPi / 2) <= g.dx());
    CHECK(loc2.zeros[2] == doctest::Approx(kPi));
}

TEST_CASE("zero noise Neumann ground state is constant")
{
    const Grid g(5.0, 1e-2);
    const auto op = assemble(white_noise(zero_path(g)), BoundaryCondition::Neumann);
    const auto pairs = bottom_eigenpairs(op, 2);
    CHECK(std::abs(pairs[0].lambda) < 1e-8);
    CHECK(pairs[0].phi[0] > 0.0);
    CHECK(rescaled_measure_mass(pairs[0], 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    // the mirrored ghost nodes put the reflecting walls half a cell outside
    CHECK(pairs[1].lambda == doctest::Approx(std::pow(kPi / (5.0 + g.dx()), 2)).epsilon(1e-4));
}

TEST_CASE("sturm_count")
{
    const Grid g(3.0, 1e-3);
    const auto zero = assemble(white_noise(zero_path(g)), BoundaryCondition::Dirichlet);
    CHECK(sturm_count(zero, 4.0) == 1);
    CHECK(sturm_count(zero, (2 * kPi / 3) * (2 * kPi / 3) + 0.01) == 2);

    const auto op = random_operator(20.0, 1e-3, 5, BoundaryCondition::Dirichlet);
    const auto [lo, hi] = op.gershgorin();
    CHECK(sturm_count(op, lo - 1.0) == 0);
    CHECK(sturm_count(op, hi + 1.0) == op.m());

    std::vector<double> shifts;
    for (int i = 0; i < 37; ++i) {
        shifts.push_back(-40.0 + 2.0 * i);
    }
    std::vector<std::size_t> fast(shifts.size());
    std::vector<std::size_t> slow(shifts.size());
    sturm_count_multi(op, shifts, fast);
    sturm_count_multi_serial(op, shifts, slow);
    CHECK(fast == slow);
    for (std::size_t i = 1; i < slow.size(); ++i) {
        REQUIRE(slow[i] >= slow[i - 1]);
    }
}

TEST_CASE("random operator eigenpairs")
{
    for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
        CAPTURE(to_string(bc));
        const auto op = random_operator(100.0, 1e-3, 21, bc);
        const std::size_t k = 6;
        const double tol = default_tolerance(op);
        const auto pairs = bottom_eigenpairs(op, k);
        for (std::size_t i = 0; i < k; ++i) {
            const auto& p = pairs[i];
            CHECK(eigen_residual(op, p) <= 1e-8 * (std::abs(p.lambda) + op.diag_norm()));
            if (i > 0) {
                CHECK(p.lambda > pairs[i - 1].lambda);
            }
            CHECK(sturm_count(op, p.lambda + tol) - sturm_count(op, p.lambda - tol) == 1);
            for (std::size_t j = 0; j <= i; ++j) {
                const double ip = inner_product(p, pairs[j]);
                CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-8);
            }
            const auto loc = localization_data(p);
            if (bc == BoundaryCondition::Dirichlet) {
                CHECK(loc.zeros.size() == i + 2);
                CHECK(rescaled_measure_mass(p, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
            } else {
                CHECK(loc.zeros.size() == i);
                CHECK(rescaled_measure_mass(p, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
            }
            CHECK(loc.maxima.size() == i + 1);
            for (std::size_t z = 1; z < loc.zeros.size(); ++z) {
                REQUIRE(loc.zeros[z] > loc.zeros[z - 1]);
            }
            // first nonzero value is positive
            std::size_t first = 0;
            while (p.sign[first] == 0) {
                ++first;
            }
            CHECK(p.sign[first] == 1);
        }
    }
}

TEST_CASE("log-domain eigenvectors survive underflow")
{
    const auto op = random_operator(1500.0, 1e-2, 8, BoundaryCondition::Dirichlet);
    const auto pairs = bottom_eigenpairs(op, 3);
    for (const auto& p : pairs) {
        const auto loc = localization_data(p);
        CHECK(loc.zeros.size() == p.k + 1);
        double lo = 0.0;
        for (double l : p.log_abs) {
            lo = std::min(lo, l);
        }
        CHECK(lo < -745.0); // far tail is below the double range
    }
    CHECK(std::abs(inner_product(pairs[0], pairs[1])) < 1e-8);
}

TEST_CASE("U is invariant under positive rescaling")
{
    const auto op = random_operator(50.0, 1e-3, 4, BoundaryCondition::Dirichlet);
    auto p = bottom_eigenpairs(op, 1).front();
    const auto before = localization_data(p);
    for (auto& l : p.log_abs) {
        l += std::log(3.7);
    }
    for (auto& v : p.phi) {
        v *= 3.7;
    }
    CHECK(localization_data(p).U == before.U);
}

TEST_CASE("rescaled measure window")
{
    const auto op = random_operator(50.0, 1e-3, 4, BoundaryCondition::Dirichlet);
    const auto p = bottom_eigenpairs(op, 1).front();
    CHECK_THROWS_AS(rescaled_measure_mass(p, 0.3, 0.3), DomainError);
    const double a = rescaled_measure_mass(p, 0.0, 0.37);
    const double b = rescaled_measure_mass(p, 0.37, 1.0);
    CHECK(a + b == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mesh refinement on fixed noise")
{
    // the change of lambda_1 shrinks under dx halving; pooled over paths
    double coarse = 0.0;
    double fine = 0.0;
    for (std::uint64_t r = 0; r < 6; ++r) {
        const auto b0 = sample_brownian(Grid(20.0, 4e-3), 77, r);
        const auto b1 = refine_brownian(b0);
        const auto b2 = refine_brownian(b1);
        auto lam = [](const BrownianPath& b) {
            return bottom_eigenpairs(assemble(white_noise(b), BoundaryCondition::Dirichlet), 1)
                .front()
                .lambda;
        };
        const double l0 = lam(b0);
        const double l1 = lam(b1);
        const double l2 = lam(b2);
        coarse += std::abs(l0 - l1);
        fine += std::abs(l1 - l2);
    }
    CHECK(coarse / fine >= 1.5);
}

TEST_CASE("Neumann ground energy is below Dirichlet")
{
    for (std::uint64_t r = 0; r < 10; ++r) {
        const auto w = white_noise(sample_brownian(Grid(40.0, 1e-3), 13, r));
        const double d = bottom_eigenpairs(assemble(w, BoundaryCondition::Dirichlet), 1)[0].lambda;
        const double n = bottom_eigenpairs(assemble(w, BoundaryCondition::Neumann), 1)[0].lambda;
        CHECK(n <= d);
    }
    const Grid g(10.0, 1e-3);
    const auto z = white_noise(zero_path(g));
    const double d = bottom_eigenpairs(assemble(z, BoundaryCondition::Dirichlet), 1)[0].lambda;
    const double n = bottom_eigenpairs(assemble(z, BoundaryCondition::Neumann), 1)[0].lambda;
    CHECK(n - d == doctest::Approx(-std::pow(kPi / 10.0, 2)).epsilon(1e-2));
}
