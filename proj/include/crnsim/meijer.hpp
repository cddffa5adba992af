#ifndef CRNSIM_MEIJER_HPP
#define CRNSIM_MEIJER_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "crnsim/errors.hpp"
#include "crnsim/specfun.hpp"

namespace crnsim {

struct MeijerGSpec {
    int m = 0;
    int n = 0;
    int p = 0;
    int q = 0;
    std::vector<double> a_params;
    std::vector<double> b_params;

    void validate() const {
        if (p < 0 || q < 0 || m < 0 || n < 0 || m > q || n > p)
            throw unsupported_parameters("meijer order indices out of range");
        if (static_cast<int>(a_params.size()) != p || static_cast<int>(b_params.size()) != q)
            throw unsupported_parameters("meijer parameter lists do not match declared order");
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < m; ++i) {
                const double diff = a_params[j] - b_params[i];
                const double nearest = std::round(diff);
                if (nearest >= 1.0 && std::fabs(diff - nearest) < 1e-9) {
                    std::ostringstream msg;
                    msg << "meijer pole collision: a[" << j << "] - b[" << i
                        << "] = " << diff << " is a positive integer";
                    throw unsupported_parameters(msg.str());
                }
            }
        }
    }
};

struct SeriesBudget {
    double rel_tol = 1e-8;
    int max_index_per_sum = 60;
};

struct NestedSumResult {
    double value = 0.0;
    bool converged = false;
    long terms_used = 0;
};

namespace detail {

// Mellin-Barnes contour evaluation on a vertical line. The abscissa is
// chosen by scanning candidates for the smallest integrand magnitude at
// t = 0, which keeps cancellation in check for very small and very large
// arguments alike. log_scale is subtracted inside the exponent so callers
// can fold in large log-prefactors without overflow.
inline double meijer_contour(const MeijerGSpec& g, double x, double log_scale = 0.0) {
    const int m = g.m, n = g.n, p = g.p, q = g.q;
    const auto& a = g.a_params;
    const auto& b = g.b_params;

    const double cstar = m + n - 0.5 * (p + q);
    if (cstar <= 0.0)
        throw convergence_error("meijer contour does not converge for this order class");

    const double lnx = std::log(x);

    bool has_left = m > 0;
    bool has_right = n > 0;
    double left_sup = -std::numeric_limits<double>::infinity();
    double right_inf = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j)
        left_sup = std::max(left_sup, -b[j]);
    for (int j = 0; j < n; ++j)
        right_inf = std::min(right_inf, 1.0 - a[j]);

    // A kernel with poles on one side only has a convex t = 0 magnitude in
    // the abscissa, and its minimiser is the steepest-descent saddle (near
    // x^{1/q} for a pure Gamma product). The window must reach that far or
    // the line sits off the saddle and the quadrature cancels catastrophically.
    const bool pure_left = (n == 0 && p == 0);
    const bool pure_right = (m == 0 && q == 0);
    double lo = has_left ? left_sup : right_inf - 3.0 - std::fabs(lnx);
    double hi = has_right ? right_inf : left_sup + 3.0 + std::fabs(lnx) + 2.0 * (q - p);
    if (pure_left && x > 1.0)
        hi += 2.0 * std::pow(x, 1.0 / q);
    if (pure_right && x < 1.0)
        lo -= 2.0 * std::pow(1.0 / x, 1.0 / p);
    if (lo >= hi)
        throw unsupported_parameters("meijer left and right pole sets overlap");

    const auto log_magnitude = [&](double sigma) {
        double acc = -sigma * lnx - log_scale;
        for (int j = 0; j < m; ++j)
            acc += std::lgamma(b[j] + sigma);
        for (int j = 0; j < n; ++j)
            acc += std::lgamma(1.0 - a[j] - sigma);
        for (int j = m; j < q; ++j)
            acc -= std::lgamma(1.0 - b[j] - sigma);
        for (int j = n; j < p; ++j)
            acc -= std::lgamma(a[j] + sigma);
        return acc;
    };

    const double margin = std::min(0.49 * (hi - lo),
                                   std::max(0.05, 1.0 / (4.0 + std::fabs(lnx))));
    double sigma0 = 0.5 * (lo + hi);
    double best = std::numeric_limits<double>::infinity();
    constexpr int candidates = 17;
    for (int i = 0; i < candidates; ++i) {
        const double frac = static_cast<double>(i) / (candidates - 1);
        const double sigma = (lo + margin) + frac * ((hi - margin) - (lo + margin));
        if (sigma <= lo || sigma >= hi)
            continue;
        const double mag = log_magnitude(sigma);
        if (mag < best) {
            best = mag;
            sigma0 = sigma;
        }
    }
    if (pure_left || pure_right) {
        double ta = pure_left ? lo + margin : lo;
        double tb = pure_left ? hi : hi - margin;
        for (int it = 0; it < 200 && tb - ta > 1e-10 * (1.0 + std::fabs(ta)); ++it) {
            const double m1 = ta + (tb - ta) / 3.0;
            const double m2 = tb - (tb - ta) / 3.0;
            if (log_magnitude(m1) < log_magnitude(m2))
                tb = m2;
            else
                ta = m1;
        }
        const double refined = 0.5 * (ta + tb);
        if (refined > lo && refined < hi && log_magnitude(refined) < best)
            sigma0 = refined;
    }

    const double strip = (has_left && has_right)
                             ? std::min(sigma0 - lo, hi - sigma0)
                             : std::max(0.25, std::min(sigma0 - lo, hi - sigma0));

    const auto integrand = [&](double t) {
        const std::complex<double> s(sigma0, t);
        std::complex<double> w = -s * lnx - log_scale;
        for (int j = 0; j < m; ++j)
            w += lgamma_complex(b[j] + s);
        for (int j = 0; j < n; ++j)
            w += lgamma_complex(1.0 - a[j] - s);
        for (int j = m; j < q; ++j)
            w -= lgamma_complex(1.0 - b[j] - s);
        for (int j = n; j < p; ++j)
            w -= lgamma_complex(a[j] + s);
        if (w.real() > 700.0)
            throw convergence_error("meijer contour integrand overflow");
        return std::exp(w).real();
    };

    const double center = integrand(0.0);
    const double floor_mag = 1e-18 * (std::fabs(center) + 1e-300);
    double t_max = std::max(46.0 / (cstar * pi_const), 6.0);
    while (std::fabs(integrand(t_max)) > floor_mag && t_max < 600.0)
        t_max *= 1.4;

    double h = std::min({0.5, strip, 2.0 * pi_const / (4.0 * (1.0 + std::fabs(lnx)))});

    // Trapezoid refinement: halving h only adds odd multiples of the new
    // spacing, so earlier sums are reused.
    double sum = 0.5 * center;
    for (long k = 1; k * h < t_max; ++k)
        sum += integrand(k * h);
    double value = sum * h / pi_const;

    for (int level = 0; level < 22; ++level) {
        const double h2 = 0.5 * h;
        double extra = 0.0;
        for (long k = 1; k * h2 < t_max; k += 2)
            extra += integrand(k * h2);
        sum += extra;
        h = h2;
        const double refined = sum * h / pi_const;
        const double prev = value;
        value = refined;
        if (std::fabs(refined - prev) <= 1e-11 * std::max(std::fabs(refined), 1e-300))
            return value;
    }
    throw convergence_error("meijer contour quadrature failed to settle");
}

} // namespace detail

inline double meijer_g(const MeijerGSpec& g, double x) {
    g.validate();
    detail::check_positive(x, "argument");

    if (g.m == 1 && g.n == 0 && g.p == 0 && g.q == 1)
        return std::pow(x, g.b_params[0]) * std::exp(-x);

    if (g.m == 1 && g.n == 1 && g.p == 1 && g.q == 1) {
        const double a0 = g.a_params[0];
        const double b0 = g.b_params[0];
        return std::tgamma(1.0 - a0 + b0) * std::pow(x, b0) * std::pow(1.0 + x, a0 - b0 - 1.0);
    }

    if (g.m == 2 && g.n == 0 && g.p == 0 && g.q == 2) {
        const double b1 = g.b_params[0];
        const double b2 = g.b_params[1];
        return 2.0 * std::pow(x, 0.5 * (b1 + b2))
               * std::cyl_bessel_k(std::fabs(b1 - b2), 2.0 * std::sqrt(x));
    }

    return detail::meijer_contour(g, x);
}

namespace detail {

template <typename Fn>
inline bool for_each_composition(int total, int depth, std::vector<int>& idx, int pos,
                                 int cap, const Fn& fn) {
    if (pos == depth - 1) {
        if (total > cap)
            return true;
        idx[pos] = total;
        return fn(idx);
    }
    for (int v = 0; v <= std::min(total, cap); ++v) {
        idx[pos] = v;
        if (!for_each_composition(total - v, depth, idx, pos + 1, cap, fn))
            return false;
    }
    return true;
}

} // namespace detail

// Sums term(idx) over all non-negative index vectors of the given depth,
// grouped into shells of equal total order. Stops once three consecutive
// shells are each negligible against the running total.
inline NestedSumResult truncated_nested_sum(const std::function<double(const std::vector<int>&)>& term,
                                            int depth, const SeriesBudget& budget = {}) {
    if (depth < 1)
        throw unsupported_parameters("nested sum depth must be at least 1");
    detail::check_positive(budget.rel_tol, "rel_tol");
    detail::check_at_least_one(budget.max_index_per_sum, "max_index_per_sum");

    NestedSumResult result;
    std::vector<int> idx(static_cast<std::size_t>(depth), 0);
    int quiet_shells = 0;
    const int max_total = depth * budget.max_index_per_sum;

    for (int total = 0; total <= max_total; ++total) {
        double shell = 0.0;
        const bool completed = detail::for_each_composition(
            total, depth, idx, 0, budget.max_index_per_sum,
            [&](const std::vector<int>& v) {
                const double t = term(v);
                if (!std::isfinite(t)) {
                    std::ostringstream msg;
                    msg << "nested sum term is not finite at index (";
                    for (std::size_t i = 0; i < v.size(); ++i)
                        msg << (i ? "," : "") << v[i];
                    msg << ")";
                    throw evaluation_error(msg.str());
                }
                shell += t;
                ++result.terms_used;
                return true;
            });
        (void)completed;
        result.value += shell;
        const double scale = std::max(std::fabs(result.value), 1e-300);
        if (std::fabs(shell) < budget.rel_tol * scale) {
            if (++quiet_shells >= 3) {
                result.converged = true;
                return result;
            }
        } else {
            quiet_shells = 0;
        }
    }
    result.converged = false;
    return result;
}

} // namespace crnsim

#endif
