#ifndef CRNSIM_FADING_HPP
#define CRNSIM_FADING_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "crnsim/errors.hpp"
#include "crnsim/meijer.hpp"
#include "crnsim/rng.hpp"
#include "crnsim/specfun.hpp"

namespace crnsim {

struct KappaMuSpec {
    double kappa = 0.0;
    double mu = 1.0;
    double mean_power = 1.0;

    void validate() const {
        detail::check_non_negative(kappa, "kappa");
        detail::check_positive(mu, "mu");
        detail::check_positive(mean_power, "mean_power");
    }
};

struct CascadeSpec {
    std::vector<KappaMuSpec> stages;

    void validate() const {
        if (stages.empty())
            throw std::domain_error("cascade needs at least one stage");
        for (const auto& s : stages)
            s.validate();
    }

    int cascade_level() const { return static_cast<int>(stages.size()); }
};

struct ExpMrcSpec {
    double rate = 1.0;
    int branches = 1;

    void validate() const {
        detail::check_positive(rate, "rate");
        detail::check_at_least_one(branches, "branches");
    }
};

// Power envelope of a kappa-mu channel: the shape is a Poisson mixture of
// Gamma variates, so a conditional two-step draw is exact.
inline double sample_kappa_mu_power(const KappaMuSpec& spec, Rng& rng) {
    spec.validate();
    long long boost = 0;
    if (spec.kappa > 0.0)
        boost = poisson_draw(rng, spec.kappa * spec.mu);
    const double g = gamma_draw(rng, spec.mu + static_cast<double>(boost));
    return spec.mean_power * g / (spec.mu * (1.0 + spec.kappa));
}

inline double sample_cascaded_power(const CascadeSpec& spec, Rng& rng) {
    spec.validate();
    if (spec.stages.size() <= 4) {
        double product = 1.0;
        for (const auto& s : spec.stages)
            product *= sample_kappa_mu_power(s, rng);
        return product;
    }
    double log_sum = 0.0;
    for (const auto& s : spec.stages)
        log_sum += std::log(sample_kappa_mu_power(s, rng));
    return std::exp(log_sum);
}

inline double sample_mrc_power_sum(const CascadeSpec& spec, int branches, Rng& rng) {
    detail::check_at_least_one(branches, "branches");
    double sum = 0.0;
    for (int i = 0; i < branches; ++i)
        sum += sample_cascaded_power(spec, rng);
    return sum;
}

inline double pdf_kappa_mu_power(double x, const KappaMuSpec& spec) {
    spec.validate();
    if (x < 0.0)
        throw std::domain_error("power argument must be non-negative");
    if (x == 0.0)
        return spec.mu < 1.0 ? std::numeric_limits<double>::infinity()
                             : (spec.mu == 1.0 ? spec.mu * (1.0 + spec.kappa)
                                                     * std::exp(-spec.mu * spec.kappa)
                                                     / spec.mean_power
                                               : 0.0);
    const double mu = spec.mu;
    const double kappa = spec.kappa;
    const double omega = spec.mean_power;
    const double rate = mu * (1.0 + kappa) / omega;
    if (kappa < 1e-12)
        return std::exp(mu * std::log(rate) + (mu - 1.0) * std::log(x) - rate * x
                        - std::lgamma(mu));
    const double nu = mu - 1.0;
    const double arg = 2.0 * mu * std::sqrt(kappa * (1.0 + kappa) * x / omega);
    const double bessel = nu >= 0.0
                              ? std::cyl_bessel_i(nu, arg)
                              : std::cyl_bessel_i(-nu, arg)
                                    + 2.0 / detail::pi_const * std::sin(-nu * detail::pi_const)
                                          * std::cyl_bessel_k(-nu, arg);
    const double front = mu * std::pow(1.0 + kappa, 0.5 * (mu + 1.0))
                         / (std::pow(kappa, 0.5 * (mu - 1.0)) * std::exp(mu * kappa) * omega);
    return front * std::pow(x / omega, 0.5 * (mu - 1.0))
           * std::exp(-mu * (1.0 + kappa) * x / omega) * bessel;
}

// Density of a product of independent kappa-mu powers: a Poisson mixture of
// Gamma-product kernels, each kernel a G^{n,0}_{0,n}.
inline NestedSumResult pdf_cascaded_power(double x, const CascadeSpec& spec,
                                          const SeriesBudget& budget = {}) {
    spec.validate();
    detail::check_positive(x, "power argument");
    const int n = spec.cascade_level();

    double rate = 1.0;
    std::vector<double> pois_mean(static_cast<std::size_t>(n));
    std::vector<double> base_shape(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto& s = spec.stages[static_cast<std::size_t>(j)];
        rate *= s.mu * (1.0 + s.kappa) / s.mean_power;
        pois_mean[static_cast<std::size_t>(j)] = s.kappa * s.mu;
        base_shape[static_cast<std::size_t>(j)] = s.mu;
    }
    const double log_rate = std::log(rate);

    const auto term = [&](const std::vector<int>& idx) {
        double log_coef = log_rate;
        MeijerGSpec g;
        g.m = n;
        g.q = n;
        g.b_params.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const double shape = base_shape[static_cast<std::size_t>(j)] + idx[static_cast<std::size_t>(j)];
            log_coef += detail::log_poisson_pmf(pois_mean[static_cast<std::size_t>(j)],
                                                idx[static_cast<std::size_t>(j)])
                        - std::lgamma(shape);
            g.b_params[static_cast<std::size_t>(j)] = shape - 1.0;
        }
        if (!std::isfinite(log_coef))
            return 0.0;
        if (n == 1)
            return std::exp(log_coef + g.b_params[0] * std::log(rate * x) - rate * x);
        return std::exp(log_coef) * meijer_g(g, rate * x);
    };

    return truncated_nested_sum(term, n, budget);
}

inline double pdf_exp_mrc(double x, const ExpMrcSpec& spec) {
    spec.validate();
    if (x < 0.0)
        throw std::domain_error("power argument must be non-negative");
    const int L = spec.branches;
    const double lam = spec.rate;
    if (x == 0.0)
        return L == 1 ? lam : 0.0;
    return std::exp(L * std::log(lam) + (L - 1) * std::log(x) - lam * x
                    - std::lgamma(static_cast<double>(L)));
}

inline double cdf_exp_mrc(double x, const ExpMrcSpec& spec) {
    spec.validate();
    if (x < 0.0)
        throw std::domain_error("power argument must be non-negative");
    const double lam_x = spec.rate * x;
    double tail = 0.0;
    double term = 1.0;
    for (int i = 0; i < spec.branches; ++i) {
        if (i > 0)
            term *= lam_x / i;
        tail += term;
    }
    return 1.0 - tail * std::exp(-lam_x);
}

} // namespace crnsim

#endif
