#pragma once

// Counter-based Gaussian source (Philox4x32-10, Salmon et al. 2011).
// Every draw is a pure function of (seed, stream, replica, index), so any
// increment of any replica can be regenerated without replaying a stream.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace anderson::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr Counter philox_round(Counter c, Key k) noexcept
{
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
}

constexpr Counter philox4x32_10(Counter c, Key k) noexcept
{
#pragma GCC unroll 10
    for (int r = 0; r < 10; ++r) {
        c = philox_round(c, k);
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
    return c;
}

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Independent named streams derived from one user seed.
enum class Stream : std::uint32_t {
    Path = 0,       ///< increments of a sampled Brownian path
    Bridge = 1,     ///< Brownian-bridge midpoints (refinement level is added)
    Streaming = 64, ///< on-the-fly increments for long explosion-time runs
    Hitting = 65,   ///< Monte-Carlo hitting probabilities
};

class Gaussian {
public:
    Gaussian(std::uint64_t seed, std::uint32_t stream) noexcept
    {
        const std::uint64_t k = splitmix64(seed ^ splitmix64(0x5851F42D4C957F2Dull + stream));
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }

    /// Standard normal draw number `index` of `replica`. Draws 2j and 2j+1
    /// share one Philox block (the two Box-Muller outputs).
    double operator()(std::uint64_t replica, std::uint64_t index) const noexcept
    {
        const auto [c, s] = pair(replica, index >> 1);
        return (index & 1u) ? s : c;
    }

    /// Draws first, first+1, ... of `replica` into out; identical to
    /// calling operator() for each index.
    void fill(std::uint64_t replica, std::uint64_t first, std::span<double> out) const noexcept
    {
        std::size_t i = 0;
        std::uint64_t index = first;
        if ((index & 1u) && i < out.size()) {
            out[i++] = (*this)(replica, index++);
        }
        for (; i + 1 < out.size(); i += 2, index += 2) {
            const auto [c, s] = pair(replica, index >> 1);
            out[i] = c;
            out[i + 1] = s;
        }
        if (i < out.size()) {
            out[i] = (*this)(replica, index);
        }
    }

private:
    std::array<double, 2> pair(std::uint64_t replica, std::uint64_t block) const noexcept
    {
        const Counter out = philox4x32_10(
            {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
             static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32)},
            key_);
        const std::uint64_t u = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
        const std::uint64_t v = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        // u1 in (0, 1], u2 in [0, 1)
        const double u1 = (static_cast<double>(u >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(v >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(angle), r * std::sin(angle)};
    }

    Key key_{};
};

} // namespace anderson::rng
