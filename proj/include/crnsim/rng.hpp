#ifndef CRNSIM_RNG_HPP
#define CRNSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "crnsim/errors.hpp"

namespace crnsim {

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

// xoshiro256++ with splitmix64 seeding. Every trial gets its own substream
// derived from (seed, index), so estimates are independent of batch size and
// thread count.
class Rng {
public:
    using result_type = std::uint64_t;

    Rng() : Rng(0x853C49E6748FEA9BULL) {}

    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_)
            word = detail::splitmix64_next(x);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
            state_[0] = 0x9E3779B97F4A7C15ULL;
    }

    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t state_[4];
};

// Uniform on [0, 1) with 53 random bits.
inline double uniform_double(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double exponential_draw(Rng& rng, double rate) {
    detail::check_positive(rate, "rate");
    return -std::log1p(-uniform_double(rng)) / rate;
}

inline double normal_draw(Rng& rng) {
    const double u1 = uniform_double(rng);
    const double u2 = uniform_double(rng);
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

// Marsaglia-Tsang squeeze method; shapes below one are lifted by the
// boosting identity G(a) = G(a+1) * U^(1/a).
inline double gamma_draw(Rng& rng, double shape) {
    detail::check_positive(shape, "shape");
    if (shape < 1.0) {
        const double u = 1.0 - uniform_double(rng);
        return gamma_draw(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal_draw(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_double(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x)
            return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

namespace detail {

inline long long poisson_inversion(Rng& rng, double mean) {
    const double floor_p = std::exp(-mean);
    long long k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform_double(rng);
    } while (p > floor_p);
    return k - 1;
}

// Hormann's PTRS transformed-rejection sampler for large means.
inline long long poisson_ptrs(Rng& rng, double mean) {
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform_double(rng) - 0.5;
        const double v = uniform_double(rng);
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r)
            return static_cast<long long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us))
            continue;
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = -mean + kf * log_mean - std::lgamma(kf + 1.0);
        if (lhs <= rhs)
            return static_cast<long long>(kf);
    }
}

} // namespace detail

inline long long poisson_draw(Rng& rng, double mean) {
    detail::check_non_negative(mean, "mean");
    if (mean == 0.0)
        return 0;
    if (mean < 30.0)
        return detail::poisson_inversion(rng, mean);
    return detail::poisson_ptrs(rng, mean);
}

} // namespace crnsim

#endif
