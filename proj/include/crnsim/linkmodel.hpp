#ifndef CRNSIM_LINKMODEL_HPP
#define CRNSIM_LINKMODEL_HPP

#include <cmath>
#include <limits>

#include "crnsim/errors.hpp"
#include "crnsim/fading.hpp"
#include "crnsim/geometry.hpp"

namespace crnsim {

struct SystemParams {
    double P_T = 1.0;
    double rho = 0.5;
    double eta = 0.8;
    double T = 1.0;
    double A_f = 0.5;
    double nu_p = 0.0;
    double nu_s = 0.0;
    double N_0 = 1.0;
    int L_R = 1;
    int L_S = 1;
    double R_thp = 1.0;
    double R_ths = 1.0;
    double R_pt = 0.0;
    GeometrySpec geometry;
    ExpMrcSpec pr_channel;
    CascadeSpec rp_channel;
    CascadeSpec rs_channel;

    void validate() const {
        detail::check_positive(P_T, "P_T");
        detail::check_open_unit(rho, "rho");
        detail::check_positive(eta, "eta");
        if (eta > 1.0)
            throw std::domain_error("eta must not exceed 1");
        detail::check_positive(T, "T");
        detail::check_open_unit(A_f, "A_f");
        detail::check_fraction(nu_p, "nu_p");
        detail::check_fraction(nu_s, "nu_s");
        detail::check_positive(N_0, "N_0");
        detail::check_at_least_one(L_R, "L_R");
        detail::check_at_least_one(L_S, "L_S");
        detail::check_non_negative(R_thp, "R_thp");
        detail::check_non_negative(R_ths, "R_ths");
        detail::check_non_negative(R_pt, "R_pt");
        geometry.validate();
        pr_channel.validate();
        rp_channel.validate();
        rs_channel.validate();
        if (pr_channel.branches != L_R)
            throw std::domain_error("pr_channel branches must equal L_R");
    }
};

// Constants of the two SINR expressions. c1/c2 and d1/d2 are the outage-event
// coefficients; they are infinite when the corresponding SINR ceiling sits at
// or below the decoding threshold, which forces outage probability one.
struct DerivedConstants {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double q = 0.0;
    double e = 0.0;
    double w = 0.0;
    double J = 0.0;
    double eps_e = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    bool pu_feasible = false;
    bool su_feasible = false;
};

inline DerivedConstants derive(const SystemParams& p) {
    p.validate();
    DerivedConstants dc;
    const double gain = p.rho * p.eta / (1.0 - p.rho);
    dc.a = (1.0 - p.nu_p) * p.A_f * gain * p.P_T;
    dc.b = p.N_0 * p.A_f * gain;
    dc.c = (1.0 - p.A_f) * gain * p.P_T;
    dc.q = (1.0 - p.nu_s) * (1.0 - p.A_f) * gain * p.P_T;
    dc.e = dc.b;
    dc.w = p.A_f * gain * p.P_T;
    dc.J = std::exp2(p.R_thp / ((1.0 - p.rho) * p.T)) - 1.0;
    dc.eps_e = std::exp2(p.R_ths / ((1.0 - p.rho) * p.T)) - 1.0;

    const double inf = std::numeric_limits<double>::infinity();
    const double pu_gate = dc.a - dc.J * dc.c;
    dc.pu_feasible = pu_gate > 0.0;
    dc.c1 = dc.pu_feasible ? dc.b * dc.J / pu_gate : inf;
    dc.c2 = dc.pu_feasible ? p.N_0 * dc.J / pu_gate : inf;

    const double su_gate = dc.q - dc.eps_e * dc.w;
    dc.su_feasible = su_gate > 0.0;
    dc.d1 = dc.su_feasible ? dc.eps_e * p.N_0 / su_gate : inf;
    dc.d2 = dc.su_feasible ? dc.eps_e * dc.e / su_gate : inf;
    return dc;
}

struct ChannelRealization {
    double G_PR = 0.0;
    double g_RP = 0.0;
    double G_RS = 0.0;
    double d_alpha = 1.0;
};

inline double harvested_energy(const SystemParams& p, double h, double d_alpha) {
    p.validate();
    detail::check_non_negative(h, "channel power");
    detail::check_positive(d_alpha, "d_alpha");
    return p.rho * p.eta * p.P_T * p.T * h / d_alpha;
}

inline double relay_power(const SystemParams& p, double h, double d_alpha) {
    return harvested_energy(p, h, d_alpha) / ((1.0 - p.rho) * p.T);
}

inline double amplification_factor(const SystemParams& p, double P_k, double G_PR,
                                   double d_alpha, bool approximate = false) {
    p.validate();
    detail::check_non_negative(P_k, "P_k");
    detail::check_positive(d_alpha, "d_alpha");
    if (approximate) {
        if (G_PR <= 0.0)
            throw std::domain_error("approximate amplification needs G_PR > 0");
        return std::sqrt(p.A_f * P_k * d_alpha / (p.P_T * G_PR));
    }
    detail::check_non_negative(G_PR, "G_PR");
    return std::sqrt(p.A_f * P_k / (p.P_T * G_PR / d_alpha + p.N_0));
}

inline double sinr_pu(const DerivedConstants& dc, const ChannelRealization& r, double N_0) {
    const double path = r.g_RP * r.G_PR / r.d_alpha;
    return dc.a * path / (dc.b * r.g_RP + dc.c * path + N_0);
}

inline double sinr_su(const DerivedConstants& dc, const ChannelRealization& r, double N_0) {
    const double path = r.G_RS * r.G_PR / r.d_alpha;
    return dc.q * path / (dc.e * r.G_RS + dc.w * path + N_0);
}

inline double rate(double sinr, double rho, double T) {
    detail::check_open_unit(rho, "rho");
    detail::check_positive(T, "T");
    detail::check_non_negative(sinr, "sinr");
    return (1.0 - rho) * T * std::log2(1.0 + sinr);
}

} // namespace crnsim

#endif
