#ifndef CRNSIM_SIMULATE_HPP
#define CRNSIM_SIMULATE_HPP

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "crnsim/analysis.hpp"
#include "crnsim/linkmodel.hpp"
#include "crnsim/rng.hpp"

namespace crnsim {

struct McConfig {
    long long trials = 1000000;
    std::uint64_t seed = 1;
    int batch = 65536;
    int threads = 1;

    void validate() const {
        if (trials < 1)
            throw std::domain_error("trials must be at least 1");
        detail::check_at_least_one(batch, "batch");
        detail::check_at_least_one(threads, "threads");
    }
};

struct McEstimate {
    double op_p_hat = 0.0;
    double op_s_hat = 0.0;
    double se_p = 0.0;
    double se_s = 0.0;
    long long trials = 0;
};

struct McMetrics {
    double tau = 0.0;
    double ee = 0.0;
    McEstimate outage;
};

struct TrialOutcome {
    double gamma_p = 0.0;
    double gamma_s = 0.0;
    double r_p = 0.0;
    double r_s = 0.0;
};

namespace detail {

// Fixed draw order: path-loss power, then the L_R direct-link exponentials,
// then the relay-to-primary cascade, then the relay-to-secondary MRC sum.
// Changing this order changes every seeded result, so it is part of the
// reproducibility contract.
inline TrialOutcome run_trial_with(const SystemParams& p, const DerivedConstants& dc,
                                   Rng& rng) {
    ChannelRealization r;
    r.d_alpha = sample_kth_pathloss(p.geometry, rng);
    double direct = 0.0;
    for (int i = 0; i < p.pr_channel.branches; ++i)
        direct += exponential_draw(rng, p.pr_channel.rate);
    r.G_PR = direct;
    r.g_RP = sample_cascaded_power(p.rp_channel, rng);
    r.G_RS = sample_mrc_power_sum(p.rs_channel, p.L_S, rng);

    TrialOutcome out;
    out.gamma_p = sinr_pu(dc, r, p.N_0);
    out.gamma_s = sinr_su(dc, r, p.N_0);
    out.r_p = rate(out.gamma_p, p.rho, p.T);
    out.r_s = rate(out.gamma_s, p.rho, p.T);
    return out;
}

} // namespace detail

inline TrialOutcome run_trial(const SystemParams& p, Rng& rng) {
    const DerivedConstants dc = derive(p);
    return detail::run_trial_with(p, dc, rng);
}

inline McEstimate estimate_outage(const SystemParams& p, const McConfig& cfg) {
    cfg.validate();
    const DerivedConstants dc = derive(p);

    const long long trials = cfg.trials;
    const auto count_range = [&](long long begin, long long end, long long& outage_p,
                                 long long& outage_s) {
        long long cp = 0;
        long long cs = 0;
        for (long long t = begin; t < end; ++t) {
            Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(t));
            const TrialOutcome out = detail::run_trial_with(p, dc, rng);
            if (out.r_p <= p.R_thp)
                ++cp;
            if (out.r_s <= p.R_ths)
                ++cs;
        }
        outage_p = cp;
        outage_s = cs;
    };

    long long count_p = 0;
    long long count_s = 0;
    if (cfg.threads <= 1) {
        count_range(0, trials, count_p, count_s);
    } else {
        const int workers = cfg.threads;
        std::vector<long long> partial_p(static_cast<std::size_t>(workers), 0);
        std::vector<long long> partial_s(static_cast<std::size_t>(workers), 0);
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                long long cp_total = 0;
                long long cs_total = 0;
                for (long long chunk = w * cfg.batch; chunk < trials;
                     chunk += static_cast<long long>(workers) * cfg.batch) {
                    long long cp = 0;
                    long long cs = 0;
                    count_range(chunk, std::min(trials, chunk + cfg.batch), cp, cs);
                    cp_total += cp;
                    cs_total += cs;
                }
                partial_p[static_cast<std::size_t>(w)] = cp_total;
                partial_s[static_cast<std::size_t>(w)] = cs_total;
            });
        }
        for (auto& th : pool)
            th.join();
        for (int w = 0; w < workers; ++w) {
            count_p += partial_p[static_cast<std::size_t>(w)];
            count_s += partial_s[static_cast<std::size_t>(w)];
        }
    }

    McEstimate est;
    est.trials = trials;
    est.op_p_hat = static_cast<double>(count_p) / static_cast<double>(trials);
    est.op_s_hat = static_cast<double>(count_s) / static_cast<double>(trials);
    est.se_p = std::sqrt(est.op_p_hat * (1.0 - est.op_p_hat) / static_cast<double>(trials));
    est.se_s = std::sqrt(est.op_s_hat * (1.0 - est.op_s_hat) / static_cast<double>(trials));
    return est;
}

inline McMetrics estimate_metrics(const SystemParams& p, const McConfig& cfg) {
    McMetrics metrics;
    metrics.outage = estimate_outage(p, cfg);
    const ThroughputResult tr = throughput(p, metrics.outage.op_p_hat, metrics.outage.op_s_hat);
    metrics.tau = tr.tau;
    metrics.ee = energy_efficiency(p, tr.tau);
    return metrics;
}

} // namespace crnsim

#endif
