#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kams/cwnd_fit.hpp"
#include "kams/fluid_sim.hpp"

namespace kams {

// Simplified packet-level reference: AIMD flows emitting whole-window bursts
// through one drop-tail FIFO bottleneck. No slow start, no timeouts, no fast
// recovery; the target is equilibrium congestion avoidance.
struct PacketSimConfig {
    int n_flows = 0;
    double bottleneck_rate = 0;  // packets/s
    double access_rate = 0;      // packets/s
    int buffer_size = 0;         // packets, counting the one in service
    double rtt = 0;              // seconds
    double sim_duration = 0;     // seconds
    std::uint64_t seed = 1;
    double warmup_fraction = 0.2;
    double ai_increment = 1.0;   // packets per round trip
    double md_factor = 0.5;
    double cwnd_cap = 0;         // packets; 0 = access_rate * rtt
    double sample_phase = 0;     // queue sampled at (j + phase) * rtt
    int packet_size = 1500;      // bytes, config-boundary unit conversion only

    bool record_arrivals = false;     // test support: per-packet arrival log
    bool record_cwnd_series = false;  // test support: per-flow window history

    void validate() const;
    double effective_cwnd_cap() const;
};

// Aggregate packet-loss counts per fixed time bin.
struct LossSeries {
    std::vector<std::uint64_t> bins;
    double bin_width = 0;
    double window_start = 0;
};

struct PacketSimResult {
    QueueTrace trace;                // sampled once per rtt at phase 0
    std::vector<double> drop_times;  // every drop, whole run
    EmpiricalPmf cwnd_pmf;           // burst sizes emitted after warm-up

    std::uint64_t sent = 0;       // arrivals offered to the router
    std::uint64_t delivered = 0;  // departures by end of run
    std::uint64_t dropped = 0;
    std::uint64_t in_flight_end = 0;
    std::uint64_t sent_stationary = 0;
    std::uint64_t dropped_stationary = 0;
    std::uint64_t loss_events_stationary = 0;  // bursts that lost >= 1 packet
    double cwnd_at_loss_sum = 0;               // burst sizes of those bursts

    // mean loss rate over the stationary window, drops / packets sent
    double loss_rate() const;

    // test-support recordings, empty unless enabled in the config
    std::vector<std::pair<int, double>> arrivals;       // (flow, time)
    std::vector<std::vector<double>> cwnd_series;       // per flow, per burst
};

PacketSimResult run_packet_sim(const PacketSimConfig& cfg);

// Drop counts per bin over [window_start, window_end). Throws EmptyWindow.
LossSeries aggregate_losses(std::span<const double> drop_times, double bin_width,
                            double window_start, double window_end);

}  // namespace kams
