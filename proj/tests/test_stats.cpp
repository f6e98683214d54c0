#include "anderson/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace anderson;

TEST_CASE("moments and order statistics")
{
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    CHECK(stats::mean(x) == 2.5);
    CHECK(stats::variance(x) == doctest::Approx(5.0 / 3.0));
    CHECK(stats::median(x) == 2.5);
    CHECK(stats::median({3.0, 1.0, 2.0}) == 2.0);
    const std::vector<double> y{2.0, 4.0, 6.0, 8.0};
    CHECK(stats::pearson(x, y) == doctest::Approx(1.0));
    const std::vector<double> c{1.0, 1.0, 1.0};
    CHECK(stats::dispersion_index(c) == 0.0);
}

TEST_CASE("Kolmogorov-Smirnov")
{
    CHECK(stats::ks_statistic({0.5}, stats::uniform_cdf) == doctest::Approx(0.5));
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(2000);
    for (double& v : s) {
        v = u(gen);
    }
    const double d = stats::ks_statistic(s, stats::uniform_cdf);
    CHECK(stats::ks_pvalue(d, s.size()) > 0.001);
    std::vector<double> shifted = s;
    for (double& v : shifted) {
        v = v * 0.8;
    }
    const double d2 = stats::ks_statistic(shifted, stats::uniform_cdf);
    CHECK(stats::ks_pvalue(d2, s.size()) < 1e-6);
    CHECK(stats::ks_two_sample(s, s) == 0.0);
    // the 5% critical value for large n is 1.358 / sqrt(n)
    CHECK(stats::ks_pvalue(1.358 / std::sqrt(1e6), 1000000) == doctest::Approx(0.05).epsilon(0.01));
}

TEST_CASE("reference distributions")
{
    CHECK(stats::gumbel_cdf(0.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(stats::exponential_cdf(1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK(stats::exponential_cdf(-1.0) == 0.0);
    CHECK(stats::uniform_cdf(1.5) == 1.0);
}
