#ifndef CRNSIM_ANALYSIS_HPP
#define CRNSIM_ANALYSIS_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "crnsim/errors.hpp"
#include "crnsim/linkmodel.hpp"
#include "crnsim/meijer.hpp"

namespace crnsim {

struct OutageResult {
    double value = 1.0;
    bool converged = false;
    long shells_used = 0;
    bool feasible = true;
};

struct ThroughputResult {
    double tau_p = 0.0;
    double tau_s = 0.0;
    double tau = 0.0;
};

namespace detail {

// Mixture representation shared by the cascade and MRC-sum laws: the channel
// power is a Poisson-weighted Gamma product with per-stage shapes
// base_shape[j] + r[j] and a single product rate constant.
struct SeriesLaw {
    std::vector<double> pois_mean;
    std::vector<double> base_shape;
    double rate = 1.0;
    int n = 1;
};

inline SeriesLaw cascade_law(const CascadeSpec& spec) {
    spec.validate();
    SeriesLaw law;
    law.n = spec.cascade_level();
    for (const auto& s : spec.stages) {
        law.pois_mean.push_back(s.kappa * s.mu);
        law.base_shape.push_back(s.mu);
        law.rate *= s.mu * (1.0 + s.kappa) / s.mean_power;
    }
    return law;
}

// Sum of `branches` independent cascades folded into a single product law
// with mu scaled by the branch count. Exact for single-stage cascades,
// mean-preserving otherwise.
inline SeriesLaw mrc_law(const CascadeSpec& spec, int branches) {
    spec.validate();
    check_at_least_one(branches, "branches");
    SeriesLaw law;
    law.n = spec.cascade_level();
    law.rate = std::pow(static_cast<double>(branches), law.n - 1);
    for (const auto& s : spec.stages) {
        law.pois_mean.push_back(s.kappa * s.mu * branches);
        law.base_shape.push_back(s.mu * branches);
        law.rate *= s.mu * (1.0 + s.kappa) / s.mean_power;
    }
    return law;
}

struct OutageProblem {
    SeriesLaw law;
    int erlang_branches = 1;
    double erlang_rate = 1.0;
    double cz = 0.0;
    double cr = 0.0;
    double k = 1.0;
    double effective_area = 1.0;
    double delta = 1.0;
};

inline OutageResult outage_series_unit_delta(const OutageProblem& prob,
                                             const SeriesBudget& budget) {
    const auto& law = prob.law;
    const int n = law.n;
    const int L = prob.erlang_branches;
    const double lam = prob.erlang_rate;
    const double k = prob.k;
    const double area = prob.effective_area;

    const double A = area + lam * prob.cz;
    const double B = lam * prob.cr;
    const double log_A = std::log(A);
    const double log_B = std::log(B);
    const double log_cz = std::log(prob.cz);
    const double log_cr = std::log(prob.cr);
    const double log_lam = std::log(lam);
    const double log_rate = std::log(law.rate);
    const double log_pref = k * std::log(area) - std::lgamma(k);
    const double x_arg = law.rate * B / A;

    const auto term = [&](const std::vector<int>& idx) {
        double log_coef = log_pref + log_rate;
        MeijerGSpec g;
        g.m = n + 1;
        g.n = 1;
        g.p = 1;
        g.q = n + 1;
        g.b_params.resize(static_cast<std::size_t>(n) + 1);
        for (int j = 0; j < n; ++j) {
            const double shape = law.base_shape[static_cast<std::size_t>(j)]
                                 + idx[static_cast<std::size_t>(j)];
            log_coef += log_poisson_pmf(law.pois_mean[static_cast<std::size_t>(j)],
                                        idx[static_cast<std::size_t>(j)])
                        - std::lgamma(shape);
            g.b_params[static_cast<std::size_t>(j)] = shape - 1.0;
        }
        if (!std::isfinite(log_coef))
            return 0.0;
        double total = 0.0;
        for (int i = 0; i < L; ++i) {
            for (int j = 0; j <= i; ++j) {
                const double log_w = i * log_lam - std::lgamma(i + 1.0)
                                     + std::log(binomial_coefficient(i, j))
                                     + (j > 0 ? j * log_cz : 0.0)
                                     + (i - j > 0 ? (i - j) * log_cr : 0.0)
                                     - (k + i) * log_B + (k + j + 1.0) * (log_B - log_A);
                g.a_params = {-k - j};
                g.b_params[static_cast<std::size_t>(n)] = i - j - 1.0;
                total += meijer_contour(g, x_arg, -(log_coef + log_w));
            }
        }
        return total;
    };

    const NestedSumResult sum = truncated_nested_sum(term, n, budget);
    OutageResult out;
    out.value = 1.0 - sum.value;
    out.converged = sum.converged;
    out.shells_used = sum.terms_used;
    out.feasible = true;
    return out;
}

inline const std::array<std::pair<double, double>, 32>& gauss_legendre_32() {
    static const auto table = [] {
        std::array<std::pair<double, double>, 32> nodes{};
        constexpr int n = 32;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(pi_const * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (int j = 2; j <= n; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double step = p1 / dp;
                x -= step;
                if (std::fabs(step) < 1e-15)
                    break;
            }
            nodes[static_cast<std::size_t>(n - 1 - i)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
        }
        return nodes;
    }();
    return table;
}

// General-delta route: one-dimensional quadrature over the path-loss power,
// with the cascade expectation under the integral. Covers delta = 2; the
// unit-delta series above is preferred where it applies.
inline OutageResult outage_quadrature(const OutageProblem& prob, const SeriesBudget& budget) {
    const auto& law = prob.law;
    const int n = law.n;
    const int L = prob.erlang_branches;
    const double lam = prob.erlang_rate;
    const double k = prob.k;
    const double area = prob.effective_area;
    const double delta = prob.delta;
    const double log_rate = std::log(law.rate);
    const double log_lam = std::log(lam);
    const double log_cz = std::log(prob.cz);
    const double log_cr = std::log(prob.cr);

    const double z_hi = std::max(std::pow(60.0 / area, 1.0 / delta), 60.0 / (lam * prob.cz));
    constexpr double z_lo = 1e-7;
    constexpr int grid_points = 20;
    const double ratio = std::log(z_hi / z_lo) / (grid_points - 1);

    std::vector<double> z_nodes;
    std::vector<double> z_weights;
    z_nodes.reserve(32 * (grid_points - 1));
    z_weights.reserve(32 * (grid_points - 1));
    const auto& gl = gauss_legendre_32();
    for (int seg = 0; seg + 1 < grid_points; ++seg) {
        const double s0 = z_lo * std::exp(ratio * seg);
        const double s1 = z_lo * std::exp(ratio * (seg + 1));
        const double half = 0.5 * (s1 - s0);
        const double mid = 0.5 * (s1 + s0);
        for (const auto& [gx, gw] : gl) {
            z_nodes.push_back(mid + half * gx);
            z_weights.push_back(half * gw);
        }
    }

    std::vector<double> envelope(z_nodes.size());
    for (std::size_t i = 0; i < z_nodes.size(); ++i) {
        const double z = z_nodes[i];
        const double log_fz = std::log(delta) + k * std::log(area)
                              + (delta * k - 1.0) * std::log(z)
                              - area * std::pow(z, delta) - std::lgamma(k);
        envelope[i] = std::exp(log_fz - lam * prob.cz * z);
    }

    const auto term = [&](const std::vector<int>& idx) {
        double log_coef = log_rate;
        MeijerGSpec g;
        g.m = n + 1;
        g.q = n + 1;
        g.b_params.resize(static_cast<std::size_t>(n) + 1);
        for (int j = 0; j < n; ++j) {
            const double shape = law.base_shape[static_cast<std::size_t>(j)]
                                 + idx[static_cast<std::size_t>(j)];
            log_coef += log_poisson_pmf(law.pois_mean[static_cast<std::size_t>(j)],
                                        idx[static_cast<std::size_t>(j)])
                        - std::lgamma(shape);
            g.b_params[static_cast<std::size_t>(j)] = shape - 1.0;
        }
        if (!std::isfinite(log_coef))
            return 0.0;
        double total = 0.0;
        for (int i = 0; i < L; ++i) {
            for (int j = 0; j <= i; ++j) {
                const int m = i - j;
                const double log_w = (1.0 + j) * log_lam + (j > 0 ? j * log_cz : 0.0)
                                     + log_cr + std::log(binomial_coefficient(i, j))
                                     - std::lgamma(i + 1.0);
                g.b_params[static_cast<std::size_t>(n)] = m - 1.0;
                double integral = 0.0;
                for (std::size_t node = 0; node < z_nodes.size(); ++node) {
                    const double z = z_nodes[node];
                    const double x = law.rate * lam * prob.cr * z;
                    const double scaled_g = meijer_contour(g, x, -(log_coef + log_w));
                    integral += z_weights[node] * envelope[node]
                                * std::pow(z, 1.0 + j) * scaled_g;
                }
                total += integral;
            }
        }
        return total;
    };

    const NestedSumResult sum = truncated_nested_sum(term, n, budget);
    OutageResult out;
    out.value = 1.0 - sum.value;
    out.converged = sum.converged;
    out.shells_used = sum.terms_used;
    out.feasible = true;
    return out;
}

inline OutageResult outage_from_problem(const OutageProblem& prob, const SeriesBudget& budget) {
    if (prob.cz == 0.0 && prob.cr == 0.0) {
        OutageResult out;
        out.value = 0.0;
        out.converged = true;
        out.feasible = true;
        return out;
    }
    if (std::fabs(prob.delta - 1.0) < 1e-9) {
        OutageProblem unit = prob;
        unit.delta = 1.0;
        return outage_series_unit_delta(unit, budget);
    }
    if (std::fabs(prob.delta - 2.0) < 1e-9) {
        OutageProblem two = prob;
        two.delta = 2.0;
        return outage_quadrature(two, budget);
    }
    throw unsupported_parameters(
        "closed-form outage supports delta of 1 or 2; use the simulation engine otherwise");
}

inline OutageProblem pu_problem(const SystemParams& p, const DerivedConstants& dc) {
    OutageProblem prob;
    prob.law = cascade_law(p.rp_channel);
    prob.erlang_branches = p.L_R;
    prob.erlang_rate = p.pr_channel.rate;
    prob.cz = dc.c1;
    prob.cr = dc.c2;
    prob.k = p.geometry.order;
    prob.effective_area = p.geometry.effective_area();
    prob.delta = p.geometry.delta();
    if (dc.J == 0.0) {
        prob.cz = 0.0;
        prob.cr = 0.0;
    }
    return prob;
}

inline OutageProblem su_problem(const SystemParams& p, const DerivedConstants& dc) {
    OutageProblem prob;
    prob.law = mrc_law(p.rs_channel, p.L_S);
    prob.erlang_branches = p.L_R;
    prob.erlang_rate = p.pr_channel.rate;
    prob.cz = dc.d2;
    prob.cr = dc.d1;
    prob.k = p.geometry.order;
    prob.effective_area = p.geometry.effective_area();
    prob.delta = p.geometry.delta();
    if (dc.eps_e == 0.0) {
        prob.cz = 0.0;
        prob.cr = 0.0;
    }
    return prob;
}

inline OutageResult infeasible_outage() {
    OutageResult out;
    out.value = 1.0;
    out.converged = true;
    out.shells_used = 0;
    out.feasible = false;
    return out;
}

} // namespace detail

inline OutageResult outage_pu_closed_form(const SystemParams& p, const SeriesBudget& budget = {}) {
    const DerivedConstants dc = derive(p);
    if (!dc.pu_feasible)
        return detail::infeasible_outage();
    return detail::outage_from_problem(detail::pu_problem(p, dc), budget);
}

inline OutageResult outage_su_closed_form(const SystemParams& p, const SeriesBudget& budget = {}) {
    const DerivedConstants dc = derive(p);
    if (!dc.su_feasible)
        return detail::infeasible_outage();
    return detail::outage_from_problem(detail::su_problem(p, dc), budget);
}

namespace detail {

// Variant that factorises the path-loss and cascade averages instead of
// carrying them jointly. Kept for structural comparison; it is biased at low
// transmit power and only defined for unit delta.
inline OutageResult outage_factored(const OutageProblem& prob, const SeriesBudget& budget) {
    if (std::fabs(prob.delta - 1.0) >= 1e-9)
        throw unsupported_parameters("factored outage form requires delta = 1");
    if (prob.cz == 0.0 && prob.cr == 0.0) {
        OutageResult out;
        out.value = 0.0;
        out.converged = true;
        out.feasible = true;
        return out;
    }
    const auto& law = prob.law;
    const int n = law.n;
    const int L = prob.erlang_branches;
    const double lam = prob.erlang_rate;
    const double k = prob.k;
    const double area = prob.effective_area;
    const double B = lam * prob.cr;
    const double log_B = std::log(B);
    const double log_area = std::log(area);
    const double log_rate = std::log(law.rate);
    const double x_arg = law.rate * B / area;

    const auto z1 = [&](int j) {
        return std::exp(std::lgamma(k + j) - std::lgamma(k) + k * log_area
                        - (k + j) * std::log(area + lam * prob.cz));
    };

    std::map<int, NestedSumResult> z2_cache;
    const auto z2 = [&](int m) -> const NestedSumResult& {
        const auto found = z2_cache.find(m);
        if (found != z2_cache.end())
            return found->second;
        const auto term = [&](const std::vector<int>& idx) {
            double log_coef = log_rate + k * log_area - std::lgamma(k)
                              - (k + m) * log_B + (k + 1.0) * (log_B - log_area);
            MeijerGSpec g;
            g.m = n + 1;
            g.n = 1;
            g.p = 1;
            g.q = n + 1;
            g.a_params = {-k};
            g.b_params.resize(static_cast<std::size_t>(n) + 1);
            for (int jj = 0; jj < n; ++jj) {
                const double shape = law.base_shape[static_cast<std::size_t>(jj)]
                                     + idx[static_cast<std::size_t>(jj)];
                log_coef += log_poisson_pmf(law.pois_mean[static_cast<std::size_t>(jj)],
                                            idx[static_cast<std::size_t>(jj)])
                            - std::lgamma(shape);
                g.b_params[static_cast<std::size_t>(jj)] = shape - 1.0;
            }
            g.b_params[static_cast<std::size_t>(n)] = m - 1.0;
            if (!std::isfinite(log_coef))
                return 0.0;
            return meijer_contour(g, x_arg, -log_coef);
        };
        return z2_cache.emplace(m, truncated_nested_sum(term, n, budget)).first->second;
    };

    double total = 0.0;
    bool converged = true;
    long shells = 0;
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j <= i; ++j) {
            const int m = i - j;
            const auto& inner = z2(m);
            converged = converged && inner.converged;
            const double w = std::exp(i * std::log(lam) - std::lgamma(i + 1.0)
                                      + std::log(binomial_coefficient(i, j))
                                      + (j > 0 ? j * std::log(prob.cz) : 0.0)
                                      + (m > 0 ? m * std::log(prob.cr) : 0.0));
            total += w * z1(j) * inner.value;
        }
    }
    for (const auto& [m, inner] : z2_cache)
        shells += inner.terms_used;

    OutageResult out;
    out.value = 1.0 - total;
    out.converged = converged;
    out.shells_used = shells;
    out.feasible = true;
    return out;
}

} // namespace detail

inline OutageResult outage_pu_factored(const SystemParams& p, const SeriesBudget& budget = {}) {
    const DerivedConstants dc = derive(p);
    if (!dc.pu_feasible)
        return detail::infeasible_outage();
    return detail::outage_factored(detail::pu_problem(p, dc), budget);
}

inline OutageResult outage_su_factored(const SystemParams& p, const SeriesBudget& budget = {}) {
    const DerivedConstants dc = derive(p);
    if (!dc.su_feasible)
        return detail::infeasible_outage();
    return detail::outage_factored(detail::su_problem(p, dc), budget);
}

inline ThroughputResult throughput(const SystemParams& p, double op_p, double op_s) {
    p.validate();
    const auto check_prob = [](double v, const char* name) {
        if (!(v >= -1e-9 && v <= 1.0 + 1e-9))
            throw std::domain_error(std::string(name) + " must be a probability");
    };
    check_prob(op_p, "op_p");
    check_prob(op_s, "op_s");
    const double sp = std::min(std::max(1.0 - op_p, 0.0), 1.0);
    const double ss = std::min(std::max(1.0 - op_s, 0.0), 1.0);
    ThroughputResult tr;
    tr.tau_p = sp * p.R_thp * (1.0 - p.rho);
    tr.tau_s = ss * p.R_ths * (1.0 - p.rho);
    tr.tau = tr.tau_p + tr.tau_s;
    return tr;
}

inline double energy_efficiency(const SystemParams& p, double tau) {
    p.validate();
    detail::check_non_negative(tau, "tau");
    const double drain = (p.rho + p.nu_p + p.nu_s) * p.P_T;
    if (drain <= 0.0)
        throw std::domain_error("energy drain is zero; efficiency undefined");
    return tau / drain;
}

} // namespace crnsim

#endif
