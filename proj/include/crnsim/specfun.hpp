#ifndef CRNSIM_SPECFUN_HPP
#define CRNSIM_SPECFUN_HPP

#include <cmath>
#include <complex>
#include <limits>

namespace crnsim {
namespace detail {

inline constexpr double pi_const = 3.141592653589793238462643383279503;

// log(sin(pi z)) without overflow for large |Im z|. The imaginary part may
// differ from the principal branch by multiples of 2*pi, which is harmless
// because callers only exponentiate sums containing this value.
inline std::complex<double> log_sin_pi(std::complex<double> z) {
    if (z.imag() < 0.0)
        return std::conj(log_sin_pi(std::conj(z)));
    if (z.imag() <= 1.0)
        return std::log(std::sin(pi_const * z));
    const std::complex<double> i_unit(0.0, 1.0);
    const std::complex<double> log_2i(0.6931471805599453094, 0.5 * pi_const);
    const std::complex<double> tail = std::log(1.0 - std::exp(2.0 * i_unit * pi_const * z));
    return -i_unit * pi_const * z + std::complex<double>(0.0, pi_const) + tail - log_2i;
}

// Lanczos approximation, g = 7, nine coefficients.
inline std::complex<double> lgamma_complex(std::complex<double> z) {
    static const double coeff[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    if (z.real() < 0.5) {
        const double log_pi = 1.1447298858494001741;
        return std::complex<double>(log_pi, 0.0) - log_sin_pi(z) - lgamma_complex(1.0 - z);
    }
    const std::complex<double> zm1 = z - 1.0;
    std::complex<double> acc(coeff[0], 0.0);
    for (int i = 1; i < 9; ++i)
        acc += coeff[i] / (zm1 + static_cast<double>(i));
    const std::complex<double> t = zm1 + 7.5;
    const double log_sqrt_2pi = 0.91893853320467274178;
    return log_sqrt_2pi + (zm1 + 0.5) * std::log(t) - t + std::log(acc);
}

inline double binomial_coefficient(int n, int k) {
    if (k < 0 || k > n)
        return 0.0;
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

inline double log_poisson_pmf(double mean, long long count) {
    if (mean == 0.0)
        return count == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return -mean + static_cast<double>(count) * std::log(mean) - std::lgamma(count + 1.0);
}

} // namespace detail
} // namespace crnsim

#endif
