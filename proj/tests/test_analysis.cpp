#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "crnsim/analysis.hpp"
#include "crnsim/errors.hpp"

using crnsim::OutageResult;
using crnsim::SeriesBudget;
using crnsim::SystemParams;

namespace {

SystemParams pu_base(int n, double kappa, int k, double pt_db) {
    SystemParams p;
    p.P_T = std::pow(10.0, pt_db / 10.0);
    p.rho = 0.6;
    p.eta = 0.8;
    p.A_f = 0.8;
    p.nu_p = 0.0;
    p.nu_s = 0.0;
    p.L_R = 2;
    p.L_S = 2;
    p.R_thp = 0.5;
    p.R_ths = 1.0;
    p.geometry.density = 1.0;
    p.geometry.dimension = 2;
    p.geometry.pathloss_exp = 2.0;
    p.geometry.order = k;
    p.pr_channel.rate = 0.5;
    p.pr_channel.branches = 2;
    crnsim::KappaMuSpec stage;
    stage.kappa = kappa;
    stage.mu = 1.0;
    p.rp_channel.stages.assign(static_cast<std::size_t>(n), stage);
    p.rs_channel.stages.assign(static_cast<std::size_t>(n), stage);
    return p;
}

SystemParams su_base(int n, double kappa, int k, double pt_db) {
    SystemParams p = pu_base(n, kappa, k, pt_db);
    p.rho = 0.2;
    p.A_f = 0.2;
    p.nu_p = 0.2;
    p.nu_s = 0.2;
    p.L_S = 1;
    p.R_thp = 1.0;
    p.R_ths = 1.0;
    return p;
}

struct Frozen {
    int n;
    double kappa;
    int k;
    double pt_db;
    double value;
};

} // namespace

TEST_CASE("primary outage closed form matches reference values") {
    const Frozen rows[] = {
        {1, 0.0, 1, 0.0, 0.288057722323243},   {1, 0.0, 1, 10.0, 0.0357245322700968},
        {1, 1.0, 1, 0.0, 0.26699117322307},    {1, 1.0, 1, 10.0, 0.02872201420933},
        {2, 0.0, 1, 0.0, 0.393614780449046},   {2, 0.0, 1, 10.0, 0.0922773275635229},
        {2, 1.0, 1, 0.0, 0.357104059096698},   {2, 1.0, 1, 10.0, 0.0710923306055157},
        {2, 1.0, 2, 0.0, 0.563987345703317},   {2, 1.0, 2, 10.0, 0.126220422597246},
        {1, 0.0, 2, 0.0, 0.499709976245338},   {1, 0.0, 2, 10.0, 0.0713353449455307},
    };
    for (const Frozen& row : rows) {
        const OutageResult res =
            crnsim::outage_pu_closed_form(pu_base(row.n, row.kappa, row.k, row.pt_db));
        INFO("n=" << row.n << " kappa=" << row.kappa << " k=" << row.k
                  << " pt=" << row.pt_db);
        REQUIRE(res.converged);
        REQUIRE(res.feasible);
        REQUIRE(res.value == Catch::Approx(row.value).epsilon(1e-7));
    }
}

TEST_CASE("secondary outage closed form matches reference values") {
    const Frozen rows[] = {
        {1, 0.0, 1, 0.0, 0.651785814844989},  {1, 0.0, 1, 10.0, 0.193094263268992},
        {1, 1.0, 1, 0.0, 0.638317865571887},  {1, 1.0, 1, 10.0, 0.169721139490195},
        {2, 0.0, 1, 0.0, 0.712751616523176},  {2, 0.0, 1, 10.0, 0.311470564334022},
        {2, 1.0, 1, 0.0, 0.691300575571259},  {2, 1.0, 1, 10.0, 0.270540862706392},
        {2, 1.0, 2, 0.0, 0.867963208367326},  {2, 1.0, 2, 10.0, 0.419759845860448},
        {1, 0.0, 2, 0.0, 0.858331990956699},  {1, 0.0, 2, 10.0, 0.332996968317987},
    };
    for (const Frozen& row : rows) {
        const OutageResult res =
            crnsim::outage_su_closed_form(su_base(row.n, row.kappa, row.k, row.pt_db));
        INFO("n=" << row.n << " kappa=" << row.kappa << " k=" << row.k
                  << " pt=" << row.pt_db);
        REQUIRE(res.converged);
        REQUIRE(res.feasible);
        REQUIRE(res.value == Catch::Approx(row.value).epsilon(1e-7));
    }
}

TEST_CASE("quadrature engine handles quadratic pathloss order") {
    struct Quad {
        bool primary;
        double kappa;
        int k;
        double pt_db;
        double value;
    };
    const Quad rows[] = {
        {true, 0.0, 1, 0.0, 0.447547890038},  {true, 0.0, 2, 0.0, 0.603498220422},
        {true, 1.0, 1, 5.0, 0.150207597800},  {false, 0.0, 1, 0.0, 0.848656931760},
        {false, 1.0, 1, 10.0, 0.262304753198},
    };
    for (const Quad& row : rows) {
        SystemParams p = row.primary ? pu_base(1, row.kappa, row.k, row.pt_db)
                                     : su_base(1, row.kappa, row.k, row.pt_db);
        p.geometry.dimension = 4;
        const OutageResult res = row.primary ? crnsim::outage_pu_closed_form(p)
                                             : crnsim::outage_su_closed_form(p);
        INFO((row.primary ? "pu" : "su") << " kappa=" << row.kappa << " k=" << row.k
                                         << " pt=" << row.pt_db);
        REQUIRE(res.converged);
        REQUIRE(res.value == Catch::Approx(row.value).margin(1e-5));
    }
}

TEST_CASE("series and quadrature engines agree at unit delta") {
    for (const bool primary : {true, false}) {
        const SystemParams p = primary ? pu_base(1, 0.0, 1, 0.0) : su_base(1, 0.0, 1, 0.0);
        const crnsim::DerivedConstants dc = crnsim::derive(p);
        const auto prob = primary ? crnsim::detail::pu_problem(p, dc)
                                  : crnsim::detail::su_problem(p, dc);
        const SeriesBudget budget;
        const OutageResult series = crnsim::detail::outage_series_unit_delta(prob, budget);
        const OutageResult quad = crnsim::detail::outage_quadrature(prob, budget);
        REQUIRE(series.converged);
        REQUIRE(quad.converged);
        REQUIRE(series.value == Catch::Approx(quad.value).margin(1e-5));
    }
}

TEST_CASE("factored series variant matches reference values and stays biased high") {
    const OutageResult pu0 = crnsim::outage_pu_factored(pu_base(2, 1.0, 1, 0.0));
    REQUIRE(pu0.converged);
    REQUIRE(pu0.value == Catch::Approx(0.367086050107927).epsilon(1e-7));
    const OutageResult pu20 = crnsim::outage_pu_factored(pu_base(2, 1.0, 1, 20.0));
    REQUIRE(pu20.value == Catch::Approx(0.0109665315532057).epsilon(1e-7));
    const OutageResult su0 = crnsim::outage_su_factored(su_base(2, 1.0, 1, 0.0));
    REQUIRE(su0.value == Catch::Approx(0.698185185581474).epsilon(1e-7));
    const OutageResult su_k2 = crnsim::outage_su_factored(su_base(1, 1.0, 2, 0.0));
    REQUIRE(su_k2.value == Catch::Approx(0.865294793296771).epsilon(1e-7));

    // The factored rearrangement overshoots the exact series by a small,
    // documented margin at low transmit power.
    const double exact_pu = crnsim::outage_pu_closed_form(pu_base(2, 1.0, 1, 0.0)).value;
    REQUIRE(pu0.value >= exact_pu - 1e-9);
    REQUIRE(pu0.value - exact_pu < 0.03);
    const double exact_su = crnsim::outage_su_closed_form(su_base(1, 1.0, 2, 0.0)).value;
    REQUIRE(su_k2.value >= exact_su - 1e-9);
    REQUIRE(su_k2.value - exact_su < 0.03);
}

TEST_CASE("closed gates yield certain outage") {
    // The secondary ceiling at the primary-favouring operating point is
    // below its threshold, so outage is certain no matter the power.
    SystemParams p = pu_base(2, 1.0, 1, 10.0);
    const OutageResult su = crnsim::outage_su_closed_form(p);
    REQUIRE(su.value == 1.0);
    REQUIRE(su.converged);
    REQUIRE_FALSE(su.feasible);

    SystemParams q = su_base(2, 1.0, 1, 10.0);
    const OutageResult pu = crnsim::outage_pu_closed_form(q);
    REQUIRE(pu.value == 1.0);
    REQUIRE(pu.converged);
    REQUIRE_FALSE(pu.feasible);
}

TEST_CASE("vanishing harvest time drives outage toward one") {
    SystemParams p = pu_base(1, 0.0, 1, 0.0);
    p.rho = 1e-4;
    const OutageResult res = crnsim::outage_pu_closed_form(p);
    REQUIRE(res.converged);
    REQUIRE(res.value >= 0.99);
}

TEST_CASE("extreme power split or receiver split closes the secondary gate") {
    SystemParams p = su_base(1, 0.0, 1, 10.0);
    p.A_f = 0.999;
    const OutageResult res = crnsim::outage_su_closed_form(p);
    REQUIRE(res.value == 1.0);
    REQUIRE_FALSE(res.feasible);

    SystemParams q = su_base(1, 0.0, 1, 10.0);
    q.nu_s = 1.0 - 1e-9;
    const OutageResult res2 = crnsim::outage_su_closed_form(q);
    REQUIRE(res2.value == 1.0);
    REQUIRE_FALSE(res2.feasible);
}

TEST_CASE("zero thresholds mean no outage") {
    SystemParams p = pu_base(1, 0.0, 1, 0.0);
    p.R_thp = 0.0;
    const OutageResult pu = crnsim::outage_pu_closed_form(p);
    REQUIRE(pu.converged);
    REQUIRE(pu.value == 0.0);

    SystemParams q = su_base(1, 0.0, 1, 0.0);
    q.R_ths = 0.0;
    const OutageResult su = crnsim::outage_su_closed_form(q);
    REQUIRE(su.converged);
    REQUIRE(su.value == 0.0);
}

TEST_CASE("unsupported pathloss shape is refused, not approximated") {
    SystemParams p = pu_base(1, 0.0, 1, 0.0);
    p.geometry.delta_override = 0.7;
    REQUIRE_THROWS_AS(crnsim::outage_pu_closed_form(p), crnsim::unsupported_parameters);
    REQUIRE_THROWS_WITH(crnsim::outage_pu_closed_form(p),
                        Catch::Matchers::ContainsSubstring("delta"));
}

TEST_CASE("starved series budget is reported as unconverged") {
    SeriesBudget tiny;
    tiny.max_index_per_sum = 1;
    const OutageResult res = crnsim::outage_pu_closed_form(pu_base(2, 1.0, 1, 0.0), tiny);
    REQUIRE_FALSE(res.converged);
    REQUIRE(res.value >= 0.0);
    REQUIRE(res.value <= 1.0);
}

TEST_CASE("closed form is monotone in power and direct-link order") {
    double prev = 1.1;
    for (const double pt : {0.0, 5.0, 10.0, 15.0}) {
        const double v = crnsim::outage_pu_closed_form(pu_base(2, 1.0, 1, pt)).value;
        REQUIRE(v < prev);
        prev = v;
    }
    prev = 1.1;
    for (const int branches : {1, 2, 3}) {
        SystemParams p = pu_base(1, 0.0, 1, 5.0);
        p.L_R = branches;
        p.pr_channel.branches = branches;
        const double v = crnsim::outage_pu_closed_form(p).value;
        REQUIRE(v < prev);
        prev = v;
    }
    const double ls1 = crnsim::outage_su_closed_form(su_base(1, 0.0, 1, 5.0)).value;
    SystemParams p2 = su_base(1, 0.0, 1, 5.0);
    p2.L_S = 2;
    const double ls2 = crnsim::outage_su_closed_form(p2).value;
    REQUIRE(ls2 < ls1);
}

TEST_CASE("throughput and energy-efficiency arithmetic") {
    SystemParams p = su_base(1, 0.0, 1, 3.0103);
    p.P_T = 2.0;
    p.rho = 0.2;
    p.R_thp = 1.0;
    p.R_ths = 2.0;
    p.nu_p = 0.1;
    p.nu_s = 0.1;
    const crnsim::ThroughputResult tr = crnsim::throughput(p, 0.6, 0.5);
    REQUIRE(tr.tau_p == Catch::Approx(0.32).epsilon(1e-14));
    REQUIRE(tr.tau_s == Catch::Approx(0.8).epsilon(1e-14));
    REQUIRE(tr.tau == Catch::Approx(1.12).epsilon(1e-14));
    REQUIRE(crnsim::energy_efficiency(p, tr.tau) == Catch::Approx(1.4).epsilon(1e-13));

    REQUIRE_THROWS_AS(crnsim::throughput(p, 1.2, 0.5), std::domain_error);
    REQUIRE_THROWS_AS(crnsim::throughput(p, 0.5, -0.2), std::domain_error);
    REQUIRE_NOTHROW(crnsim::throughput(p, 1.0 + 1e-12, 0.5));
}
