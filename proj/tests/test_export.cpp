#include "anderson/acceptance.hpp"
#include "anderson/export.hpp"

#include <doctest.h>

#include <clocale>
#include <sstream>
#include <string>

using namespace anderson;

namespace {

std::size_t count_lines(const std::string& s)
{
    std::size_t n = 0;
    for (char c : s) {
        n += c == '\n' ? 1 : 0;
    }
    return n;
}

} // namespace

TEST_CASE("number formatting round-trips")
{
    for (double v : {0.1, -2.5e-300, 1.0 / 3.0, 6.02214076e23, 0.0}) {
        CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 0.0) == "inf");
    CHECK(format_number(std::stod("nan")) == "nan");
}

TEST_CASE("formula tables")
{
    std::vector<double> a;
    for (int i = 0; i <= 20; ++i) {
        a.push_back(0.5 * i);
    }
    std::ostringstream os;
    write_log_m_csv(os, a);
    const std::string s = os.str();
    CHECK(count_lines(s) == 22);
    CHECK(s.rfind("a,log_m\n", 0) == 0);
}

TEST_CASE("eigenpair and trajectory tables")
{
    const BrownianPath b = sample_brownian(Grid(20.0, 1e-2), 4, 0);
    const auto pairs = bottom_eigenpairs(assemble(white_noise(b), BoundaryCondition::Dirichlet), 3);
    std::ostringstream e;
    write_eigenpairs_csv(e, pairs);
    CHECK(count_lines(e.str()) == 4);
    CHECK(e.str().rfind("k,lambda,U,peak,n_zeros\n", 0) == 0);

    std::ostringstream p;
    write_phi_csv(p, pairs[0]);
    CHECK(count_lines(p.str()) == b.grid.n() + 2);

    const auto traj = integrate(-4.0, zero_path(Grid(3.0, 1e-3)), Start::PlusInfinity);
    std::ostringstream t;
    write_trajectory_csv(t, traj);
    CHECK(t.str().find(",explode\n") != std::string::npos);
    CHECK(t.str().find(",restart\n") != std::string::npos);

    std::ostringstream z;
    write_explosion_times_csv(z, 0, -4.0, traj.zeta);
    CHECK(count_lines(z.str()) == 2);
}

TEST_CASE("summary JSON schema")
{
    EnsembleConfig c;
    c.L = 40.0;
    c.k = 2;
    c.reps = 3;
    const auto j = summary_json(summarize(run_ensemble(c)));
    CHECK(j["schema"] == "anderson1d/1");
    CHECK(j["run"]["replicas"] == 3);
    REQUIRE(j["tests"].is_array());
    for (const auto& t : j["tests"]) {
        CHECK(t.contains("name"));
        CHECK(t.contains("statistic"));
        CHECK(t["band"].size() == 2);
        CHECK(t["pass"].is_boolean());
    }
}

TEST_CASE("acceptance JSON lists failures")
{
    std::vector<CriterionResult> r{{1, "a", true, "", 0.1}, {2, "b", false, "", 0.2}};
    const auto j = acceptance_json(r, Profile::Quick);
    CHECK(j["pass"] == false);
    CHECK(j["failures"].size() == 1);
    CHECK(j["failures"][0] == 2);
    CHECK(j["profile"] == "quick");
}
