#ifndef CRNSIM_OPTIMIZE_HPP
#define CRNSIM_OPTIMIZE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "crnsim/errors.hpp"
#include "crnsim/linkmodel.hpp"

namespace crnsim {

struct OptConfig {
    double rho0 = 0.5;
    double af0 = 0.5;
    double fd_h = 1e-5;
    double tol_obj = 1e-6;
    double tol_kkt = 1e-4;
    int max_outer = 50;
    int max_inner = 500;
    double box_margin = 1e-3;

    void validate() const {
        detail::check_open_unit(rho0, "rho0");
        detail::check_open_unit(af0, "af0");
        detail::check_positive(fd_h, "fd_h");
        detail::check_positive(tol_obj, "tol_obj");
        detail::check_positive(tol_kkt, "tol_kkt");
        detail::check_at_least_one(max_outer, "max_outer");
        detail::check_at_least_one(max_inner, "max_inner");
        if (box_margin <= 0.0 || box_margin >= 0.5)
            throw std::domain_error("box_margin must lie in (0, 0.5)");
    }
};

// duals[0]: upper box edge, duals[1]: lower box edge, duals[2]: rate floor.
struct InnerResult {
    double x_star = 0.0;
    double objective = 0.0;
    std::array<double, 3> duals{0.0, 0.0, 0.0};
    bool converged = false;
    double constraint_residual = 0.0;
};

struct OptResult {
    double rho_star = 0.0;
    double af_star = 0.0;
    double objective = 0.0;
    std::array<double, 3> duals{0.0, 0.0, 0.0};
    int outer_iters = 0;
    bool converged = false;
    double constraint_residual = 0.0;
    bool feasible = true;
};

namespace detail {

// Deterministic surrogate channel: every random quantity replaced by its
// mean, so the design objective is smooth in (rho, A_f).
inline ChannelRealization mean_channel(const SystemParams& p) {
    ChannelRealization r;
    r.G_PR = p.pr_channel.branches / p.pr_channel.rate;
    r.g_RP = 1.0;
    for (const auto& s : p.rp_channel.stages)
        r.g_RP *= s.mean_power;
    double rs_mean = 1.0;
    for (const auto& s : p.rs_channel.stages)
        rs_mean *= s.mean_power;
    r.G_RS = p.L_S * rs_mean;
    const double k = p.geometry.order;
    const double d = p.geometry.delta();
    r.d_alpha = std::exp(std::lgamma(k + 1.0 / d) - std::lgamma(k)
                         - std::log(p.geometry.effective_area()) / d);
    return r;
}

inline SystemParams with_design(const SystemParams& p, double rho, double af) {
    SystemParams q = p;
    q.rho = rho;
    q.A_f = af;
    return q;
}

inline double surrogate_rate_su(const SystemParams& p, double rho, double af) {
    const SystemParams q = with_design(p, rho, af);
    const DerivedConstants dc = derive(q);
    const ChannelRealization r = mean_channel(q);
    return rate(sinr_su(dc, r, q.N_0), rho, q.T);
}

inline double surrogate_rate_pu(const SystemParams& p, double rho, double af) {
    const SystemParams q = with_design(p, rho, af);
    const DerivedConstants dc = derive(q);
    const ChannelRealization r = mean_channel(q);
    return rate(sinr_pu(dc, r, q.N_0), rho, q.T);
}

inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double tol) {
    const double inv_phi = 0.6180339887498948482;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Locates the point where g crosses level inside [a, b]; g(a) and g(b) must
// lie on opposite sides. Returns a point on the feasible (g >= level) side.
inline double refine_crossing(const std::function<double(double)>& g, double level,
                              double a, double b) {
    bool a_feasible = g(a) >= level;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (a + b);
        if ((g(mid) >= level) == a_feasible)
            a = mid;
        else
            b = mid;
    }
    return a_feasible ? a : b;
}

// One coordinate of the alternating scheme: maximize the secondary rate over
// x in [margin, 1-margin] subject to the primary rate floor. The solve is
// primal: the feasible set is recovered as a union of intervals from a grid
// scan with bisection-refined boundaries, the objective is maximized inside
// each interval, and the floor multiplier is read off the stationarity
// condition at the winner.
inline InnerResult solve_coordinate(const std::function<double(double)>& objective,
                                    const std::function<double(double)>& primary_rate,
                                    double R_pt, const OptConfig& cfg) {
    cfg.validate();
    const double lo = cfg.box_margin;
    const double hi = 1.0 - cfg.box_margin;
    const int n = std::max(cfg.max_inner, 64);

    std::vector<double> xs(static_cast<std::size_t>(n) + 1);
    std::vector<double> gs(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n;
        gs[static_cast<std::size_t>(i)] = primary_rate(xs[static_cast<std::size_t>(i)]);
    }

    InnerResult res;

    // Least-infeasible fallback: no grid node satisfies the floor.
    const auto feasible_at = [&](int i) { return gs[static_cast<std::size_t>(i)] >= R_pt; };
    bool any = false;
    for (int i = 0; i <= n; ++i)
        any = any || feasible_at(i);
    if (!any) {
        int m = 0;
        for (int i = 1; i <= n; ++i)
            if (gs[static_cast<std::size_t>(i)] > gs[static_cast<std::size_t>(m)])
                m = i;
        const double bl = xs[static_cast<std::size_t>(std::max(m - 1, 0))];
        const double br = xs[static_cast<std::size_t>(std::min(m + 1, n))];
        const double x = golden_max(primary_rate, bl, br, 1e-10);
        res.x_star = x;
        res.objective = objective(x);
        res.constraint_residual = R_pt - primary_rate(x);
        res.converged = false;
        return res;
    }

    // Feasible intervals, boundaries refined where the floor is crossed.
    struct Interval {
        double a;
        double b;
        bool a_active;
        bool b_active;
    };
    std::vector<Interval> intervals;
    int i = 0;
    while (i <= n) {
        if (!feasible_at(i)) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 <= n && feasible_at(j + 1))
            ++j;
        Interval iv{xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)], false,
                    false};
        if (i > 0) {
            iv.a = refine_crossing(primary_rate, R_pt, xs[static_cast<std::size_t>(i - 1)],
                                   xs[static_cast<std::size_t>(i)]);
            iv.a_active = true;
        }
        if (j < n) {
            iv.b = refine_crossing(primary_rate, R_pt, xs[static_cast<std::size_t>(j + 1)],
                                   xs[static_cast<std::size_t>(j)]);
            iv.b_active = true;
        }
        intervals.push_back(iv);
        i = j + 1;
    }

    double best_x = intervals.front().a;
    double best_f = -std::numeric_limits<double>::infinity();
    bool best_boundary = false;
    for (const Interval& iv : intervals) {
        // Coarse pass inside the interval, then golden refinement around the
        // best node; boundary values checked explicitly since the maximum of
        // a monotone piece sits there.
        const int m = 64;
        double node_x = iv.a;
        double node_f = objective(iv.a);
        for (int t = 1; t <= m; ++t) {
            const double x = iv.a + (iv.b - iv.a) * t / m;
            const double fx = objective(x);
            if (fx > node_f) {
                node_f = fx;
                node_x = x;
            }
        }
        const double span = (iv.b - iv.a) / m;
        const double gl = std::max(iv.a, node_x - span);
        const double gr = std::min(iv.b, node_x + span);
        double cand_x = gr > gl ? golden_max(objective, gl, gr, 1e-12) : node_x;
        double cand_f = objective(cand_x);
        if (node_f > cand_f) {
            cand_x = node_x;
            cand_f = node_f;
        }
        for (const double edge : {iv.a, iv.b}) {
            const double fe = objective(edge);
            if (fe > cand_f) {
                cand_f = fe;
                cand_x = edge;
            }
        }
        if (cand_f > best_f) {
            best_f = cand_f;
            best_x = cand_x;
            best_boundary = (iv.a_active && std::fabs(cand_x - iv.a) <= 1e-9)
                            || (iv.b_active && std::fabs(cand_x - iv.b) <= 1e-9);
        }
    }

    res.x_star = best_x;
    res.objective = best_f;
    res.constraint_residual = std::max(R_pt - primary_rate(best_x), 0.0);

    const double h = cfg.fd_h;
    const double xp = std::min(best_x + h, hi);
    const double xm = std::max(best_x - h, lo);
    const double fgrad = (objective(xp) - objective(xm)) / (xp - xm);
    const double ggrad = (primary_rate(xp) - primary_rate(xm)) / (xp - xm);
    double u3 = 0.0;
    if (best_boundary && std::fabs(ggrad) > 1e-12)
        u3 = std::max(-fgrad / ggrad, 0.0);
    res.duals[2] = u3;
    const double lgrad = fgrad + u3 * ggrad;
    if (best_x >= hi - 1e-9)
        res.duals[0] = std::max(lgrad, 0.0);
    else if (best_x <= lo + 1e-9)
        res.duals[1] = std::max(-lgrad, 0.0);
    res.converged = res.constraint_residual <= cfg.tol_kkt;
    return res;
}

} // namespace detail

inline double objective(const SystemParams& p, double rho, double af) {
    p.validate();
    if (!(rho > 0.0 && rho < 1.0))
        throw std::domain_error("rho must lie strictly inside (0, 1)");
    if (!(af > 0.0 && af < 1.0))
        throw std::domain_error("A_f must lie strictly inside (0, 1)");
    return detail::surrogate_rate_su(p, rho, af);
}

inline double primary_rate_surrogate(const SystemParams& p, double rho, double af) {
    p.validate();
    if (!(rho > 0.0 && rho < 1.0))
        throw std::domain_error("rho must lie strictly inside (0, 1)");
    if (!(af > 0.0 && af < 1.0))
        throw std::domain_error("A_f must lie strictly inside (0, 1)");
    return detail::surrogate_rate_pu(p, rho, af);
}

inline InnerResult solve_inner_fixed_rho(const SystemParams& p, double rho,
                                         const OptConfig& cfg = {}) {
    p.validate();
    detail::check_open_unit(rho, "rho");
    return detail::solve_coordinate(
        [&](double af) { return detail::surrogate_rate_su(p, rho, af); },
        [&](double af) { return detail::surrogate_rate_pu(p, rho, af); }, p.R_pt, cfg);
}

inline InnerResult solve_inner_fixed_af(const SystemParams& p, double af,
                                        const OptConfig& cfg = {}) {
    p.validate();
    detail::check_open_unit(af, "A_f");
    return detail::solve_coordinate(
        [&](double rho) { return detail::surrogate_rate_su(p, rho, af); },
        [&](double rho) { return detail::surrogate_rate_pu(p, rho, af); }, p.R_pt, cfg);
}

// Joint design search. The coupled problem is solved as a nested response:
// for each candidate rho the inner solve returns the best feasible A_f, and
// the envelope value is maximized over rho; a short alternating sweep then
// confirms that neither coordinate can improve the point, which keeps the
// ascent monotone and the reported multipliers consistent with the final
// point.
inline OptResult solve_biconvex(const SystemParams& p, const OptConfig& cfg = {}) {
    p.validate();
    cfg.validate();
    const double lo = cfg.box_margin;
    const double hi = 1.0 - cfg.box_margin;

    OptResult res;

    const auto inner_at_rho = [&](double rho) { return solve_inner_fixed_rho(p, rho, cfg); };

    constexpr int scan = 64;
    double best_value = -std::numeric_limits<double>::infinity();
    double best_rho = std::clamp(cfg.rho0, lo, hi);
    InnerResult best_inner;
    bool any_feasible = false;
    double least_infeasible = std::numeric_limits<double>::infinity();
    double least_rho = best_rho;
    InnerResult least_inner;
    for (int i = 0; i <= scan; ++i) {
        const double rho = lo + (hi - lo) * i / scan;
        const InnerResult inner = inner_at_rho(rho);
        if (inner.constraint_residual <= cfg.tol_kkt) {
            any_feasible = true;
            if (inner.objective > best_value) {
                best_value = inner.objective;
                best_rho = rho;
                best_inner = inner;
            }
        } else if (inner.constraint_residual < least_infeasible) {
            least_infeasible = inner.constraint_residual;
            least_rho = rho;
            least_inner = inner;
        }
    }

    if (!any_feasible) {
        res.feasible = false;
        res.converged = false;
        res.rho_star = least_rho;
        res.af_star = least_inner.x_star;
        res.objective = least_inner.objective;
        res.duals = least_inner.duals;
        res.constraint_residual = least_infeasible;
        res.outer_iters = 1;
        return res;
    }

    const auto envelope = [&](double rho) {
        const InnerResult inner = inner_at_rho(rho);
        if (inner.constraint_residual > cfg.tol_kkt)
            return -std::numeric_limits<double>::infinity();
        return inner.objective;
    };
    const double span = (hi - lo) / scan;
    const double gl = std::max(lo, best_rho - span);
    const double gr = std::min(hi, best_rho + span);
    const double refined = detail::golden_max(envelope, gl, gr, 1e-9);
    {
        const InnerResult inner = inner_at_rho(refined);
        if (inner.constraint_residual <= cfg.tol_kkt && inner.objective >= best_value) {
            best_value = inner.objective;
            best_rho = refined;
            best_inner = inner;
        }
    }

    res.rho_star = best_rho;
    res.af_star = best_inner.x_star;
    InnerResult last_inner = best_inner;
    double current = best_value;

    // Alternating settle: accept a coordinate move only if it keeps the floor
    // and does not lower the objective.
    int quiet = 0;
    for (int outer = 1; outer <= cfg.max_outer; ++outer) {
        res.outer_iters = outer;
        const double before = current;

        const InnerResult rho_step = solve_inner_fixed_af(p, res.af_star, cfg);
        if (rho_step.constraint_residual <= cfg.tol_kkt && rho_step.objective >= current) {
            res.rho_star = rho_step.x_star;
            current = rho_step.objective;
            last_inner = rho_step;
        }
        const InnerResult af_step = solve_inner_fixed_rho(p, res.rho_star, cfg);
        if (af_step.constraint_residual <= cfg.tol_kkt && af_step.objective >= current) {
            res.af_star = af_step.x_star;
            current = af_step.objective;
            last_inner = af_step;
        }

        if (current - before < cfg.tol_obj) {
            if (++quiet >= 2) {
                res.converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }

    res.objective = current;
    res.duals = last_inner.duals;
    res.constraint_residual =
        std::max(p.R_pt - detail::surrogate_rate_pu(p, res.rho_star, res.af_star), 0.0);
    if (res.constraint_residual > cfg.tol_kkt)
        res.converged = false;
    return res;
}

} // namespace crnsim

#endif
