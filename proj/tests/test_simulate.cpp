#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "crnsim/analysis.hpp"
#include "crnsim/simulate.hpp"

using crnsim::McConfig;
using crnsim::McEstimate;
using crnsim::SystemParams;

namespace {

SystemParams pu_base(int n, double kappa, int k, double pt_db) {
    SystemParams p;
    p.P_T = std::pow(10.0, pt_db / 10.0);
    p.rho = 0.6;
    p.eta = 0.8;
    p.A_f = 0.8;
    p.L_R = 2;
    p.L_S = 2;
    p.R_thp = 0.5;
    p.R_ths = 1.0;
    p.geometry.density = 1.0;
    p.geometry.order = k;
    p.pr_channel.rate = 0.5;
    p.pr_channel.branches = 2;
    crnsim::KappaMuSpec stage;
    stage.kappa = kappa;
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

McConfig small(std::uint64_t trials, std::uint64_t seed) {
    McConfig cfg;
    cfg.trials = trials;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("identical seeds reproduce estimates bit for bit") {
    const SystemParams p = pu_base(1, 1.0, 1, 5.0);
    const McEstimate a = crnsim::estimate_outage(p, small(20000, 42));
    const McEstimate b = crnsim::estimate_outage(p, small(20000, 42));
    REQUIRE(a.op_p_hat == b.op_p_hat);
    REQUIRE(a.op_s_hat == b.op_s_hat);
    REQUIRE(a.se_p == b.se_p);
    const McEstimate c = crnsim::estimate_outage(p, small(20000, 43));
    REQUIRE(a.op_p_hat != c.op_p_hat);
}

TEST_CASE("batch size and thread count do not change the estimate") {
    const SystemParams p = su_base(2, 1.0, 1, 5.0);
    McConfig coarse = small(30000, 7);
    coarse.batch = 1000;
    McConfig fine = small(30000, 7);
    fine.batch = 64;
    const McEstimate a = crnsim::estimate_outage(p, coarse);
    const McEstimate b = crnsim::estimate_outage(p, fine);
    REQUIRE(a.op_p_hat == b.op_p_hat);
    REQUIRE(a.op_s_hat == b.op_s_hat);

    McConfig threaded = small(30000, 7);
    threaded.threads = 2;
    threaded.batch = 1000;
    const McEstimate c = crnsim::estimate_outage(p, threaded);
    REQUIRE(a.op_p_hat == c.op_p_hat);
    REQUIRE(a.op_s_hat == c.op_s_hat);
}

TEST_CASE("zero threshold never registers primary outage") {
    SystemParams p = pu_base(1, 0.0, 1, 0.0);
    p.R_thp = 0.0;
    const McEstimate est = crnsim::estimate_outage(p, small(5000, 3));
    REQUIRE(est.op_p_hat == 0.0);
    REQUIRE(est.se_p == 0.0);
}

TEST_CASE("closed secondary gate is certain outage in simulation too") {
    const SystemParams p = pu_base(2, 1.0, 1, 15.0);
    const McEstimate est = crnsim::estimate_outage(p, small(5000, 3));
    REQUIRE(est.op_s_hat == 1.0);
}

TEST_CASE("draining the primary receiver branch suppresses its signal") {
    SystemParams p = pu_base(1, 0.0, 1, 20.0);
    p.nu_p = 1.0 - 1e-9;
    crnsim::Rng rng = crnsim::Rng::substream(11, 0);
    for (int i = 0; i < 100; ++i) {
        const crnsim::TrialOutcome out = crnsim::run_trial(p, rng);
        REQUIRE(out.gamma_p < 1e-3);
    }
}

TEST_CASE("simulation agrees with the closed form") {
    struct Case {
        bool primary;
        SystemParams p;
    };
    const Case cases[] = {
        {true, pu_base(1, 0.0, 1, 0.0)},
        {true, pu_base(1, 0.0, 1, 10.0)},
        {false, su_base(2, 1.0, 1, 0.0)},
    };
    for (const Case& c : cases) {
        const McEstimate est = crnsim::estimate_outage(c.p, small(200000, 9));
        const crnsim::OutageResult cf = c.primary ? crnsim::outage_pu_closed_form(c.p)
                                                  : crnsim::outage_su_closed_form(c.p);
        const double mc = c.primary ? est.op_p_hat : est.op_s_hat;
        const double se = c.primary ? est.se_p : est.se_s;
        REQUIRE(cf.converged);
        REQUIRE(std::abs(mc - cf.value) <= std::max(4.0 * se, 0.01));
    }
}

TEST_CASE("metric estimates compose the outage estimates exactly") {
    const SystemParams p = su_base(1, 0.0, 1, 5.0);
    const McConfig cfg = small(20000, 21);
    const crnsim::McMetrics metrics = crnsim::estimate_metrics(p, cfg);
    const McEstimate est = crnsim::estimate_outage(p, cfg);
    REQUIRE(metrics.outage.op_p_hat == est.op_p_hat);
    REQUIRE(metrics.outage.op_s_hat == est.op_s_hat);
    const crnsim::ThroughputResult tr =
        crnsim::throughput(p, est.op_p_hat, est.op_s_hat);
    REQUIRE(metrics.tau == tr.tau);
    REQUIRE(metrics.ee == crnsim::energy_efficiency(p, tr.tau));
}

TEST_CASE("simulation configuration is validated") {
    const SystemParams p = pu_base(1, 0.0, 1, 0.0);
    McConfig cfg = small(0, 1);
    REQUIRE_THROWS_AS(crnsim::estimate_outage(p, cfg), std::domain_error);
    McConfig cfg2 = small(100, 1);
    cfg2.batch = 0;
    REQUIRE_THROWS_AS(crnsim::estimate_outage(p, cfg2), std::domain_error);
}
