#pragma once

#include <functional>
#include <span>
#include <vector>

namespace anderson::stats {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
double median(std::vector<double> x);
double quantile(std::vector<double> x, double q);
double pearson(std::span<const double> x, std::span<const double> y);
/// Variance over mean of a count sample.
double dispersion_index(std::span<const double> counts);

/// sup |F_n - F| of a one-sample Kolmogorov-Smirnov test.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
/// Asymptotic p-value of the one-sample statistic d at sample size n, with
/// Stephens' small-sample correction.
double ks_pvalue(double d, std::size_t n);

double gumbel_cdf(double y) noexcept;
double exponential_cdf(double y) noexcept;
double uniform_cdf(double y) noexcept;

inline constexpr double kEulerGamma = 0.57721566490153286061;

} // namespace anderson::stats
