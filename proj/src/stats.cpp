#include "anderson/stats.hpp"

#include "anderson/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anderson::stats {

double mean(std::span<const double> x)
{
    if (x.empty()) {
        throw DomainError("mean: empty sample");
    }
    double s = 0.0;
    for (double v : x) {
        s += v;
    }
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x)
{
    if (x.size() < 2) {
        throw DomainError("variance: need at least two values");
    }
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) {
        s += (v - m) * (v - m);
    }
    return s / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> x, double q)
{
    if (x.empty()) {
        throw DomainError("quantile: empty sample");
    }
    std::sort(x.begin(), x.end());
    const double pos = q * static_cast<double>(x.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= x.size()) {
        return x.back();
    }
    const double w = pos - static_cast<double>(i);
    return x[i] + w * (x[i + 1] - x[i]);
}

double median(std::vector<double> x)
{
    return quantile(std::move(x), 0.5);
}

double pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw DomainError("pearson: need two samples of equal length >= 2");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

double dispersion_index(std::span<const double> counts)
{
    const double m = mean(counts);
    if (m == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return variance(counts) / m;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf)
{
    if (sample.empty()) {
        throw DomainError("ks_statistic: empty sample");
    }
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) {
        throw DomainError("ks_two_sample: empty sample");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) {
            ++i;
        }
        while (j < b.size() && b[j] == v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_pvalue(double d, std::size_t n)
{
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 0.2) {
        return 1.0;
    }
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        p += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) {
            break;
        }
    }
    return std::clamp(p, 0.0, 1.0);
}

double gumbel_cdf(double y) noexcept
{
    return std::exp(-std::exp(-y));
}

double exponential_cdf(double y) noexcept
{
    return y <= 0.0 ? 0.0 : -std::expm1(-y);
}

double uniform_cdf(double y) noexcept
{
    return std::clamp(y, 0.0, 1.0);
}

} // namespace anderson::stats
