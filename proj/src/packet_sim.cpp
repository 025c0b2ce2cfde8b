#include "kams/packet_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <sstream>

#include "kams/errors.hpp"

namespace kams {

void PacketSimConfig::validate() const {
    std::ostringstream problems;
    auto bad = [&problems](const char* msg) { problems << "\n  - " << msg; };
    if (n_flows <= 0) bad("n_flows must be positive");
    if (!(bottleneck_rate > 0)) bad("bottleneck_rate must be > 0");
    if (!(access_rate > 0)) bad("access_rate must be > 0");
    if (buffer_size < 1) bad("buffer_size must be >= 1 packet");
    if (!(rtt > 0)) bad("rtt must be > 0");
    if (!(sim_duration > 0)) bad("sim_duration must be > 0");
    if (!(warmup_fraction >= 0 && warmup_fraction < 1)) bad("warmup_fraction must lie in [0,1)");
    if (!(ai_increment > 0)) bad("ai_increment must be > 0");
    if (!(md_factor > 0 && md_factor < 1)) bad("md_factor must lie in (0,1)");
    if (cwnd_cap < 0) bad("cwnd_cap must be >= 0 (0 selects access_rate*rtt)");
    if (!(sample_phase >= 0 && sample_phase < 1)) bad("sample_phase must lie in [0,1)");
    if (packet_size <= 0) bad("packet_size must be positive");
    const std::string s = problems.str();
    if (!s.empty()) throw ValidationError("invalid PacketSimConfig:" + s);
}

double PacketSimConfig::effective_cwnd_cap() const {
    const double cap = (cwnd_cap > 0) ? cwnd_cap : access_rate * rtt;
    return std::max(1.0, cap);
}

double PacketSimResult::loss_rate() const {
    if (sent_stationary == 0) return 0.0;
    return static_cast<double>(dropped_stationary) / static_cast<double>(sent_stationary);
}

namespace {

struct Flow {
    double cwnd = 1.0;
    double next_time = 0;    // next burst start, or next packet if mid-burst
    int burst_left = 0;      // packets still to emit in the current burst
    int burst_size = 0;
    bool burst_lost = false;      // any drop in the burst being emitted
    bool prev_burst_lost = false; // what the next window decision will see
    double last_departure = 0;    // bottleneck departure of the newest
                                  // surviving packet of this burst
};

// heap entry: packet arrival or queue sample, earliest first
struct Event {
    double t;
    int flow;  // -1 = sampler
    bool operator>(const Event& o) const {
        if (t != o.t) return t > o.t;
        return flow > o.flow;
    }
};

}  // namespace

PacketSimResult run_packet_sim(const PacketSimConfig& cfg) {
    cfg.validate();
    const double service = 1.0 / cfg.bottleneck_rate;  // seconds per packet
    const double gap = 1.0 / cfg.access_rate;          // spacing within a burst
    const double cap = cfg.effective_cwnd_cap();
    const double warmup_end = cfg.warmup_fraction * cfg.sim_duration;

    PacketSimResult res;
    res.trace.source = QueueTrace::Source::Packet;
    res.trace.duration = cfg.sim_duration;
    if (cfg.record_cwnd_series) res.cwnd_series.resize(cfg.n_flows);

    std::vector<Flow> flows(cfg.n_flows);
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    {
        Rng init(derive_seed(cfg.seed, 0x0ffe));
        for (int i = 0; i < cfg.n_flows; ++i) {
            flows[i].next_time = init.uniform() * cfg.rtt;  // desynchronized start
            events.push({flows[i].next_time, i});
        }
    }
    events.push({cfg.sample_phase * cfg.rtt, -1});

    // FIFO bottleneck: departure times of packets now in the system. The
    // front departs first; size is the queue length including service.
    std::deque<double> departures;
    double last_busy_end = 0;

    auto drain_until = [&](double t) {
        while (!departures.empty() && departures.front() <= t) {
            departures.pop_front();
            ++res.delivered;
        }
    };

    const std::uint64_t n_samples =
        static_cast<std::uint64_t>(std::floor(cfg.sim_duration / cfg.rtt)) + 1;
    res.trace.samples.reserve(n_samples);
    std::uint64_t sample_idx = 0;

    while (!events.empty()) {
        const Event ev = events.top();
        if (ev.t > cfg.sim_duration) break;
        events.pop();
        drain_until(ev.t);

        if (ev.flow < 0) {
            // queue sample at a fixed phase of every round trip
            std::uint32_t mid_burst = 0;
            for (const auto& f : flows) mid_burst += (f.burst_left > 0);
            res.trace.samples.push_back(
                {ev.t, static_cast<double>(departures.size()), mid_burst});
            ++sample_idx;
            const double next =
                (static_cast<double>(sample_idx) + cfg.sample_phase) * cfg.rtt;
            if (next <= cfg.sim_duration) events.push({next, -1});
            continue;
        }

        Flow& f = flows[static_cast<std::size_t>(ev.flow)];
        if (f.burst_left == 0) {
            // burst epoch: apply the window decision owed from one RTT ago,
            // then emit the whole window back to back
            if (f.burst_size > 0) {
                if (f.prev_burst_lost) {
                    f.cwnd = std::max(1.0, cfg.md_factor * f.cwnd);
                } else {
                    f.cwnd = std::min(cap, f.cwnd + cfg.ai_increment);
                }
            }
            f.burst_size = static_cast<int>(std::lround(f.cwnd));
            f.burst_left = f.burst_size;
            f.burst_lost = false;
            if (ev.t >= warmup_end) res.cwnd_pmf.add(f.burst_size);
            if (cfg.record_cwnd_series) {
                res.cwnd_series[static_cast<std::size_t>(ev.flow)].push_back(f.cwnd);
            }
        }

        // one packet of the burst arrives at the router
        ++res.sent;
        if (ev.t >= warmup_end) ++res.sent_stationary;
        if (cfg.record_arrivals) res.arrivals.emplace_back(ev.flow, ev.t);
        if (static_cast<int>(departures.size()) < cfg.buffer_size) {
            last_busy_end = std::max(last_busy_end, ev.t) + service;
            departures.push_back(last_busy_end);
            f.last_departure = last_busy_end;
        } else {
            f.burst_lost = true;
            ++res.dropped;
            if (ev.t >= warmup_end) ++res.dropped_stationary;
            res.drop_times.push_back(ev.t);
        }

        --f.burst_left;
        if (f.burst_left > 0) {
            f.next_time = ev.t + gap;
        } else {
            // ack clock: the window slides one round trip after the last
            // surviving packet clears the bottleneck, so queueing delay
            // keeps flow phases mixing instead of freezing into cohorts
            f.prev_burst_lost = f.burst_lost;
            if (f.burst_lost && ev.t >= warmup_end) {
                ++res.loss_events_stationary;
                res.cwnd_at_loss_sum += f.burst_size;
            }
            f.next_time = std::max(f.last_departure, ev.t) + cfg.rtt;
        }
        events.push({f.next_time, ev.flow});
    }

    drain_until(cfg.sim_duration);
    res.in_flight_end = departures.size();
    return res;
}

LossSeries aggregate_losses(std::span<const double> drop_times, double bin_width,
                            double window_start, double window_end) {
    if (!(bin_width > 0)) throw InvalidParams("aggregate_losses: bin_width must be > 0");
    if (!(window_end > window_start)) {
        throw EmptyWindow("aggregate_losses: observation window is empty");
    }
    LossSeries s;
    s.bin_width = bin_width;
    s.window_start = window_start;
    const auto n_bins =
        static_cast<std::size_t>(std::ceil((window_end - window_start) / bin_width));
    s.bins.assign(n_bins, 0);
    for (const double t : drop_times) {
        if (t < window_start || t >= window_end) continue;
        auto idx = static_cast<std::size_t>((t - window_start) / bin_width);
        if (idx >= n_bins) idx = n_bins - 1;  // guard the right edge
        ++s.bins[idx];
    }
    return s;
}

}  // namespace kams
