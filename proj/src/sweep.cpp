#include "kams/sweep.hpp"

#include <atomic>
#include <thread>

#include "kams/errors.hpp"

namespace kams {

std::uint64_t point_seed(std::uint64_t master, std::size_t rtt_idx, std::size_t buf_idx,
                         int replication, std::uint64_t role) {
    const std::uint64_t coord = (static_cast<std::uint64_t>(rtt_idx) << 20) |
                                static_cast<std::uint64_t>(buf_idx);
    return derive_seed(master, coord, (static_cast<std::uint64_t>(replication) << 3) | role);
}

PacketSimConfig packet_point_config(const SweepSpec& spec, int buffer_pkts, double rtt,
                                    std::uint64_t seed) {
    PacketSimConfig c;
    c.n_flows = spec.n_flows;
    c.bottleneck_rate = spec.bottleneck_pps();
    c.access_rate = spec.access_pps();
    c.buffer_size = buffer_pkts;
    c.rtt = rtt;
    c.sim_duration = spec.sim_duration;
    c.seed = seed;
    c.warmup_fraction = spec.warmup_fraction;
    c.ai_increment = spec.ai_increment;
    c.md_factor = spec.md_factor;
    c.cwnd_cap = spec.cwnd_cap;
    c.packet_size = spec.packet_size_bytes;
    return c;
}

KamsConfig fluid_point_config(const SweepSpec& spec, int buffer_pkts, double rtt,
                              const BurstLaw& law, std::uint64_t seed) {
    KamsConfig c;
    c.n_sources = spec.n_flows;
    c.service_rate = spec.bottleneck_pps();
    c.peak_rate = spec.access_pps();
    c.buffer_size = buffer_pkts;
    c.rtt = rtt;
    c.cwnd_law = law;
    c.off_law = ConstantOff{};
    c.sim_duration = spec.sim_duration;
    c.warmup_fraction = spec.warmup_fraction;
    c.seed = seed;
    c.packet_size = spec.packet_size_bytes;
    return c;
}

namespace {

// Replications are pooled, not metric-averaged: the window histograms merge
// before the fit, the per-replication CDFs average into one distribution per
// side, and loss counts add up. Pooling shrinks the sampling noise of the
// reference CDF (a few thousand correlated per-RTT samples per run) instead
// of baking it into every replication's error statistic.
struct CdfAverage {
    std::vector<double> values;
    int n = 0;

    void add(const EmpiricalCdf& cdf) {
        if (values.empty()) values.assign(cdf.values.size(), 0.0);
        for (std::size_t i = 0; i < cdf.values.size(); ++i) values[i] += cdf.values[i];
        ++n;
    }
    EmpiricalCdf mean(int buffer) const {
        EmpiricalCdf cdf;
        cdf.buffer_size = buffer;
        cdf.values = values;
        for (auto& v : cdf.values) v /= n;
        return cdf;
    }
};

PointResult run_point(const SweepSpec& spec, std::size_t ri, std::size_t bi) {
    const int buffer = spec.buffer_values[bi];
    const double rtt = spec.rtt_values[ri];
    PointResult pr;
    pr.buffer_pkts = buffer;
    pr.rtt_s = rtt;
    pr.report.rtt_s = rtt;
    pr.report.buffer_pkts = buffer;

    std::string notes;
    auto note = [&notes](const std::string& s) {
        if (notes.find(s) != std::string::npos) return;
        if (!notes.empty()) notes += "; ";
        notes += s;
    };

    try {
        const int reps = spec.replications;
        CdfAverage ref_cdf;
        EmpiricalPmf pooled_pmf;
        double p_ref = 0.0;
        double spik_sum = 0.0;
        int spik_n = 0;
        std::uint64_t drops = 0, sent = 0;

        for (int rep = 0; rep < reps; ++rep) {
            const auto pkt = run_packet_sim(packet_point_config(
                spec, buffer, rtt, point_seed(spec.seed, ri, bi, rep, kSeedRolePacket)));
            ref_cdf.add(build_cdf(pkt.trace, buffer, spec.warmup_fraction));
            p_ref += full_buffer_probability(pkt.trace, buffer, spec.warmup_fraction) / reps;
            drops += pkt.dropped_stationary;
            sent += pkt.sent_stationary;
            for (const auto& [b, c] : pkt.cwnd_pmf.counts) pooled_pmf.add(b, c);

            const double bin_w = (spec.loss_bin_width > 0) ? spec.loss_bin_width : rtt;
            const auto losses =
                aggregate_losses(pkt.drop_times, bin_w,
                                 spec.warmup_fraction * spec.sim_duration, spec.sim_duration);
            try {
                spik_sum += spikiness(losses);
                ++spik_n;
            } catch (const DegenerateSpectrum&) {
                note("constant loss series, spikiness undefined");
            }
        }

        // one fit on the pooled histogram; undercapacity points have too few
        // occupied bins and fall back to the empirical law
        BurstLaw law = ExponentialLaw(1.0);
        try {
            const auto fit = fit_truncated_normal(pooled_pmf);
            pr.fitted_mu = fit.params.mu;
            pr.fitted_sigma = fit.params.sigma;
            pr.fit_at_lower_bound = fit.at_lower_bound;
            law = fit.params;
        } catch (const TooFewBins& e) {
            note(std::string("window histogram too thin for a fit (") + e.what() +
                 "); compared with the empirical law");
            std::vector<double> values, weights;
            for (const auto& [b, c] : pooled_pmf.counts) {
                values.push_back(static_cast<double>(b));
                weights.push_back(static_cast<double>(c));
            }
            law = DiscreteLaw(values, weights);
        }

        CdfAverage tn_cdf, exp_cdf, exp_both_cdf;
        double p_model = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
            const auto fluid = run_kams(fluid_point_config(
                spec, buffer, rtt, law, point_seed(spec.seed, ri, bi, rep, kSeedRoleFluid)));
            tn_cdf.add(build_cdf(fluid, buffer, spec.warmup_fraction));
            p_model += full_buffer_probability(fluid, buffer, spec.warmup_fraction) / reps;

            if (spec.exp_sensitivity) {
                const ExponentialLaw exp_law(burst_mean(law));
                auto exp_cfg = fluid_point_config(
                    spec, buffer, rtt, exp_law,
                    point_seed(spec.seed, ri, bi, rep, kSeedRoleFluidExp));
                exp_cdf.add(build_cdf(run_kams(exp_cfg), buffer, spec.warmup_fraction));
                exp_cfg.off_law = ExponentialOff{};
                exp_cfg.seed = point_seed(spec.seed, ri, bi, rep, kSeedRoleFluidExpBoth);
                exp_both_cdf.add(build_cdf(run_kams(exp_cfg), buffer, spec.warmup_fraction));
            }
        }

        const auto ref = ref_cdf.mean(buffer);
        pr.report.nrmse = nrmse(tn_cdf.mean(buffer), ref);
        if (spec.exp_sensitivity) {
            pr.nrmse_exp = nrmse(exp_cdf.mean(buffer), ref);
            pr.nrmse_exp_both = nrmse(exp_both_cdf.mean(buffer), ref);
        }
        pr.report.full_buffer_prob_model = p_model;
        pr.report.full_buffer_prob_ref = p_ref;
        pr.loss_rate = sent ? static_cast<double>(drops) / static_cast<double>(sent) : 0.0;
        pr.report.spikiness = spik_n ? spik_sum / spik_n : std::nan("");

        if (p_ref > 0) {
            pr.report.multiplicative_error = p_model / p_ref;
            pr.report.loss_overflow_ratio = loss_overflow_ratio(pr.loss_rate, p_ref);
        } else {
            pr.report.multiplicative_error = std::nan("");
            pr.report.loss_overflow_ratio = std::nan("");
            note("reference full-buffer probability is zero");
        }
    } catch (const Error& e) {
        pr.status = std::string("failed: ") + e.what();
        return pr;
    }

    if (!notes.empty()) pr.status = "degenerate: " + notes;
    return pr;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult result;
    result.spec = spec;
    const std::size_t n_rtt = spec.rtt_values.size();
    const std::size_t n_buf = spec.buffer_values.size();
    const std::size_t n_points = n_rtt * n_buf;
    result.points.resize(n_points);

    // fixed slot per grid point: worker scheduling cannot affect the output
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= n_points) return;
            const std::size_t ri = idx / n_buf;
            const std::size_t bi = idx % n_buf;
            result.points[idx] = run_point(spec, ri, bi);
        }
    };
    const int n_workers = std::max(1, std::min<int>(spec.workers, static_cast<int>(n_points)));
    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::vector<RatioPoint> ratio_points;
    for (const auto& p : result.points) {
        if (!p.ok()) continue;
        ratio_points.push_back({p.rtt_s, p.report.full_buffer_prob_model,
                                p.report.full_buffer_prob_ref});
    }
    try {
        result.correction_factor = correction_factor(ratio_points);
    } catch (const NoQualifyingPoints&) {
        // nothing to rescale against; corrected errors stay NaN
    }
    for (auto& p : result.points) {
        if (!p.ok() || std::isnan(result.correction_factor) ||
            !(p.report.full_buffer_prob_ref > 0)) {
            p.report.corrected_multiplicative_error = std::nan("");
            continue;
        }
        p.report.corrected_multiplicative_error = corrected_multiplicative_error(
            p.report.full_buffer_prob_model, p.report.full_buffer_prob_ref,
            result.correction_factor);
    }
    return result;
}

}  // namespace kams
