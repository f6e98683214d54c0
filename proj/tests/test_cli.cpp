#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args)
{
    const std::string cmd = std::string(ANDERSON1D_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) {
        out.append(buf, n);
    }
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& f)
{
    std::ifstream in(f, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const char* name)
{
    const fs::path d = fs::temp_directory_path() / ("anderson1d_test_" + std::string(name));
    fs::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("usage errors exit with 2")
{
    CHECK(run("spectrum --dx 10 --L 100").code == 2);
    CHECK(run("spectrum --k 0").code == 2);
    CHECK(run("spectrum --reps 0").code == 2);
    CHECK(run("spectrum --bc periodic").code == 2);
    CHECK(run("--no-such-flag formulas").code == 2);
    CHECK(run("riccati --L 10").code == 2);
    CHECK(run("").code == 2);
}

TEST_CASE("formula grid")
{
    const Run r = run("formulas --a-grid 0:10:0.5");
    CHECK(r.code == 0);
    std::size_t lines = 0;
    for (char c : r.out) {
        lines += c == '\n' ? 1 : 0;
    }
    CHECK(lines == 22);
}

TEST_CASE("config file with flag override")
{
    const fs::path d = scratch("config");
    fs::create_directories(d);
    {
        std::ofstream f(d / "run.toml");
        f << "L = 20\ndx = 0.01\nk = 2\nreps = 1\n";
    }
    const Run r = run("spectrum --config " + (d / "run.toml").string() + " --reps 2");
    CHECK(r.code == 0);
    // one header per replica
    std::size_t headers = 0;
    for (std::size_t pos = 0; (pos = r.out.find("k,lambda", pos)) != std::string::npos; ++pos) {
        ++headers;
    }
    CHECK(headers == 2);
    {
        std::ofstream f(d / "bad.toml");
        f << "L = 20\nunknown_key = 3\n";
    }
    CHECK(run("spectrum --config " + (d / "bad.toml").string()).code == 2);
    fs::remove_all(d);
}

TEST_CASE("--out keeps stdout empty and reruns are byte-identical")
{
    const fs::path d1 = scratch("out1");
    const fs::path d2 = scratch("out2");
    const std::string common = "ensemble --L 30 --dx 0.01 --k 2 --reps 3 --bc both --seed 7 --out ";
    const Run a = run(common + d1.string());
    const Run b = run(common + d2.string());
    CHECK(a.out.empty());
    CHECK(b.out.empty());
    CHECK(a.code == b.code);
    for (const char* f : {"reports_dirichlet.csv", "reports_neumann.csv", "summary.json"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(d1 / f));
        CHECK(slurp(d1 / f) == slurp(d2 / f));
    }
    const Run t = run("riccati --L 10 --dx 0.001 --a 1 --out " + d1.string());
    CHECK(t.code == 0);
    CHECK(t.out.empty());
    CHECK(fs::exists(d1 / "trajectory_r0.csv"));
    CHECK(fs::exists(d1 / "explosions.csv"));
    fs::remove_all(d1);
    fs::remove_all(d2);
}
