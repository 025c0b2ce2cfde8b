#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kams/truncated_normal.hpp"

namespace kams {

// Full parameterization of one fluid run. All rates are in packets/second;
// packet_size only matters when configs are built from link speeds in bits/s.
struct KamsConfig {
    int n_sources = 0;          // N
    double service_rate = 0;    // C, packets/s
    double peak_rate = 0;       // nu, packets/s
    double buffer_size = 0;     // B, packets
    double rtt = 0;             // off-period scale, seconds
    BurstLaw cwnd_law = ExponentialLaw(1.0);
    OffLaw off_law = ConstantOff{};
    double sim_duration = 0;    // seconds
    double warmup_fraction = 0.2;
    std::uint64_t seed = 1;
    int packet_size = 1500;     // bytes, config-boundary unit conversion only

    void validate() const;  // throws ValidationError listing every violation
};

struct OverflowInterval {
    double start;
    double end;
};

// Queue-level trace from either engine. Fluid traces are sampled at source
// state-change epochs and carry the exact overflow measure; packet traces are
// sampled once per RTT and leave the interval list empty.
struct QueueTrace {
    enum class Source { Fluid, Packet };

    struct Sample {
        double t;
        double q;          // packets; 0 <= q <= B
        std::uint32_t k;   // active sources (fluid) / flows mid-burst (packet)
        bool operator==(const Sample&) const = default;
    };

    Source source = Source::Fluid;
    double duration = 0;
    std::vector<Sample> samples;
    std::vector<OverflowInterval> overflow_intervals;
    double discarded_fluid = 0;  // packets lost to overflow
    double total_inflow = 0;     // fluid only, exact from the trajectory
    double total_outflow = 0;    // fluid only
};

// On-period duration: burst size drawn from the law, emitted at peak rate.
// Draws below 1e-6 packets are re-drawn (bounded) so events have length.
double on_duration(const BurstLaw& law, double peak_rate, Rng& rng);

// Off-period duration: rtt exactly under the constant law, exponential with
// mean rtt otherwise.
double off_duration(const OffLaw& law, double rtt, Rng& rng);

struct StepResult {
    double q;         // level after the interval
    double overflow;  // fluid discarded during the interval, packets
};

// Advance the queue level over an interval with k active sources, with exact
// piecewise handling of the 0 and B boundaries. Throws NegativeDt.
StepResult advance_queue(double q, int k, double dt, const KamsConfig& cfg);

QueueTrace run_kams(const KamsConfig& cfg);

// Exact stationary-window tail probabilities P(Q > x) from the
// piecewise-linear trajectory (time-weighted, not epoch-sampled).
std::vector<double> fluid_tail_probabilities(const QueueTrace& trace, const KamsConfig& cfg,
                                             std::span<const double> levels,
                                             double warmup_fraction);

// Exact time spent with floor(q) == b over the stationary window, for
// b = 0..floor(B). The time-weighted counterpart of the epoch histogram.
std::vector<double> fluid_time_in_bin(const QueueTrace& trace, const KamsConfig& cfg,
                                      double warmup_fraction);

}  // namespace kams
