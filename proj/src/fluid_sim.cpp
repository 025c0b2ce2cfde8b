#include "kams/fluid_sim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <sstream>

#include "kams/errors.hpp"

namespace kams {

namespace {

constexpr double kMinBurstPkts = 1e-6;
constexpr int kMaxRedraws = 100;

// Piecewise-exact step: level, overflow, served fluid and the instant the
// trajectory pins to B (relative to interval start), if it does.
struct DetailedStep {
    double q;
    double overflow;
    double outflow;
    std::optional<double> pinned_from;
};

DetailedStep step_queue(double q, int k, double dt, double peak_rate, double service_rate,
                        double buffer_size) {
    if (dt < 0.0) throw NegativeDt("advance_queue: dt must be >= 0");
    const double inflow_rate = k * peak_rate;
    const double net = inflow_rate - service_rate;
    DetailedStep r{q, 0.0, 0.0, std::nullopt};
    if (dt == 0.0) return r;

    if (net > 0.0) {
        r.outflow = service_rate * dt;  // server busy throughout
        const double q_lin = q + net * dt;
        if (q_lin < buffer_size) {
            r.q = q_lin;
        } else {
            const double t_hit = (buffer_size - q) / net;
            r.q = buffer_size;
            r.overflow = net * (dt - t_hit);
            r.pinned_from = t_hit;
        }
    } else if (net == 0.0) {
        // k*nu == C; anything arriving is served at the arrival rate
        r.outflow = inflow_rate * dt;
        if (q >= buffer_size) r.pinned_from = 0.0;
    } else {
        if (q <= 0.0) {
            r.q = 0.0;
            r.outflow = inflow_rate * dt;  // pass-through
        } else {
            const double t_empty = q / -net;
            if (t_empty >= dt) {
                r.q = q + net * dt;
                r.outflow = service_rate * dt;
            } else {
                r.q = 0.0;
                r.outflow = service_rate * t_empty + inflow_rate * (dt - t_empty);
            }
        }
    }
    return r;
}

struct SourceEvent {
    double t;
    int src;
    bool operator>(const SourceEvent& o) const {
        if (t != o.t) return t > o.t;
        return src > o.src;
    }
};

}  // namespace

void KamsConfig::validate() const {
    std::ostringstream problems;
    auto bad = [&problems](const char* msg) { problems << "\n  - " << msg; };
    if (n_sources <= 0) bad("n_sources must be positive");
    if (!(service_rate > 0)) bad("service_rate must be > 0");
    if (!(peak_rate > 0)) bad("peak_rate must be > 0");
    if (!(buffer_size > 0)) bad("buffer_size must be > 0");
    if (!(rtt > 0)) bad("rtt must be > 0");
    if (!(sim_duration > 0)) bad("sim_duration must be > 0");
    if (!(warmup_fraction >= 0 && warmup_fraction < 1)) bad("warmup_fraction must lie in [0,1)");
    if (packet_size <= 0) bad("packet_size must be positive");
    const std::string s = problems.str();
    if (!s.empty()) throw ValidationError("invalid KamsConfig:" + s);
}

double on_duration(const BurstLaw& law, double peak_rate, Rng& rng) {
    if (!(peak_rate > 0)) throw InvalidParams("on_duration: peak_rate must be > 0");
    double w = draw_burst(law, rng);
    for (int i = 0; w < kMinBurstPkts && i < kMaxRedraws; ++i) w = draw_burst(law, rng);
    if (w < kMinBurstPkts) w = kMinBurstPkts;  // law is degenerate near zero
    return w / peak_rate;
}

double off_duration(const OffLaw& law, double rtt, Rng& rng) {
    if (!(rtt > 0)) throw InvalidParams("off_duration: rtt must be > 0");
    if (std::holds_alternative<ConstantOff>(law)) return rtt;
    double d = rng.exponential(rtt);
    for (int i = 0; d <= 0.0 && i < kMaxRedraws; ++i) d = rng.exponential(rtt);
    return d > 0.0 ? d : rtt * 1e-12;
}

StepResult advance_queue(double q, int k, double dt, const KamsConfig& cfg) {
    if (q < 0.0 || q > cfg.buffer_size) {
        throw InvalidParams("advance_queue: q must lie in [0, buffer_size]");
    }
    const auto r = step_queue(q, k, dt, cfg.peak_rate, cfg.service_rate, cfg.buffer_size);
    return {r.q, r.overflow};
}

QueueTrace run_kams(const KamsConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_sources;
    const double duration = cfg.sim_duration;

    std::vector<Rng> streams;
    streams.reserve(n);
    for (int i = 0; i < n; ++i) streams.emplace_back(derive_seed(cfg.seed, i));

    // phase flag per source; next transition times live in the heap
    std::vector<char> is_on(n, 0);
    std::priority_queue<SourceEvent, std::vector<SourceEvent>, std::greater<>> schedule;
    for (int i = 0; i < n; ++i) {
        // start everyone off with a uniform residual so t=0 carries no
        // artificial alignment; the warm-up discard absorbs the rest
        schedule.push({streams[i].uniform() * cfg.rtt, i});
    }

    QueueTrace trace;
    trace.source = QueueTrace::Source::Fluid;
    trace.duration = duration;
    trace.samples.reserve(static_cast<std::size_t>(
        std::min(1e6, 64.0 + 4.0 * n * duration / cfg.rtt)));
    trace.samples.push_back({0.0, 0.0, 0});

    double t_now = 0.0;
    double q = 0.0;
    int active = 0;
    std::optional<double> open_pin;

    auto advance_to = [&](double t_next) {
        const double dt = t_next - t_now;
        if (dt <= 0) {
            t_now = t_next;
            return;  // no time passed; the pin state cannot change
        }
        const auto r = step_queue(q, active, dt, cfg.peak_rate, cfg.service_rate,
                                  cfg.buffer_size);
        trace.total_inflow += active * cfg.peak_rate * dt;
        trace.total_outflow += r.outflow;
        trace.discarded_fluid += r.overflow;
        if (r.pinned_from) {
            if (!open_pin) open_pin = t_now + *r.pinned_from;
        } else if (open_pin) {
            if (t_now > *open_pin) trace.overflow_intervals.push_back({*open_pin, t_now});
            open_pin.reset();
        }
        q = r.q;
        t_now = t_next;
    };

    while (!schedule.empty()) {
        const auto ev = schedule.top();
        if (ev.t >= duration) break;
        schedule.pop();
        advance_to(ev.t);

        if (is_on[ev.src]) {
            is_on[ev.src] = 0;
            --active;
            schedule.push({t_now + off_duration(cfg.off_law, cfg.rtt, streams[ev.src]), ev.src});
        } else {
            is_on[ev.src] = 1;
            ++active;
            schedule.push({t_now + on_duration(cfg.cwnd_law, cfg.peak_rate, streams[ev.src]),
                           ev.src});
        }

        const QueueTrace::Sample s{t_now, q, static_cast<std::uint32_t>(active)};
        if (!trace.samples.empty() && trace.samples.back().t == t_now) {
            trace.samples.back() = s;  // simultaneous transitions collapse
        } else {
            trace.samples.push_back(s);
        }
    }
    advance_to(duration);
    if (open_pin && duration > *open_pin) {
        trace.overflow_intervals.push_back({*open_pin, duration});
    }
    if (trace.samples.back().t < duration) {
        trace.samples.push_back({duration, q, static_cast<std::uint32_t>(active)});
    }
    return trace;
}

namespace {

// Hands one linear piece (t0, dt, q0, slope) to the visitor, clipped to
// start no earlier than t_from.
template <typename Visit>
void emit_piece(Visit& visit, double t_from, double t0, double dt, double q0, double slope) {
    if (dt <= 0) return;
    if (t0 + dt <= t_from) return;
    if (t0 < t_from) {
        const double cut = t_from - t0;
        visit(t_from, dt - cut, q0 + slope * cut, slope);
    } else {
        visit(t0, dt, q0, slope);
    }
}

// Replays the piecewise-linear trajectory between consecutive samples,
// splitting each inter-event segment at the boundary it clamps to.
template <typename Visit>
void for_each_linear_piece(const QueueTrace& trace, const KamsConfig& cfg, double t_from,
                           Visit&& visit) {
    const double B = cfg.buffer_size;
    for (std::size_t i = 0; i + 1 < trace.samples.size(); ++i) {
        const auto& s0 = trace.samples[i];
        const double t0 = s0.t;
        const double dt = trace.samples[i + 1].t - t0;
        if (dt <= 0) continue;
        const double q0 = s0.q;
        const double net = s0.k * cfg.peak_rate - cfg.service_rate;
        if (net == 0.0) {
            emit_piece(visit, t_from, t0, dt, q0, 0.0);
        } else if (net > 0.0) {
            if (q0 >= B) {
                emit_piece(visit, t_from, t0, dt, B, 0.0);
            } else {
                const double t_hit = std::min(dt, (B - q0) / net);
                emit_piece(visit, t_from, t0, t_hit, q0, net);
                emit_piece(visit, t_from, t0 + t_hit, dt - t_hit, B, 0.0);
            }
        } else {
            if (q0 <= 0.0) {
                emit_piece(visit, t_from, t0, dt, 0.0, 0.0);
            } else {
                const double t_empty = std::min(dt, q0 / -net);
                emit_piece(visit, t_from, t0, t_empty, q0, net);
                emit_piece(visit, t_from, t0 + t_empty, dt - t_empty, 0.0, 0.0);
            }
        }
    }
}

}  // namespace

std::vector<double> fluid_tail_probabilities(const QueueTrace& trace, const KamsConfig& cfg,
                                             std::span<const double> levels,
                                             double warmup_fraction) {
    const double t_from = warmup_fraction * trace.duration;
    const double window = trace.duration - t_from;
    if (!(window > 0)) throw EmptyAfterWarmup("fluid_tail_probabilities: empty window");
    std::vector<double> time_above(levels.size(), 0.0);
    for_each_linear_piece(trace, cfg, t_from, [&](double, double dt, double q0, double slope) {
        const double q1 = q0 + slope * dt;
        const double lo = std::min(q0, q1);
        const double hi = std::max(q0, q1);
        for (std::size_t j = 0; j < levels.size(); ++j) {
            const double x = levels[j];
            if (hi <= x) continue;
            if (lo > x) {
                time_above[j] += dt;
            } else {
                // linear piece crosses x exactly once
                time_above[j] += dt * (hi - x) / (hi - lo);
            }
        }
    });
    for (auto& v : time_above) v /= window;
    return time_above;
}

std::vector<double> fluid_time_in_bin(const QueueTrace& trace, const KamsConfig& cfg,
                                      double warmup_fraction) {
    const double t_from = warmup_fraction * trace.duration;
    if (!(trace.duration - t_from > 0)) throw EmptyAfterWarmup("fluid_time_in_bin: empty window");
    const int nbins = static_cast<int>(std::floor(cfg.buffer_size)) + 1;
    std::vector<double> time_in(nbins, 0.0);
    auto bin_of = [&](double q) {
        int b = static_cast<int>(std::floor(q));
        return std::clamp(b, 0, nbins - 1);
    };
    for_each_linear_piece(trace, cfg, t_from, [&](double, double dt, double q0, double slope) {
        if (slope == 0.0) {
            time_in[bin_of(q0)] += dt;
            return;
        }
        const double q1 = q0 + slope * dt;
        const double lo = std::min(q0, q1);
        const double hi = std::max(q0, q1);
        const double inv_speed = 1.0 / std::fabs(slope);
        for (int b = bin_of(lo); b <= bin_of(hi); ++b) {
            const double seg_lo = std::max(lo, static_cast<double>(b));
            const double seg_hi = std::min(hi, static_cast<double>(b + 1));
            if (seg_hi > seg_lo) time_in[b] += (seg_hi - seg_lo) * inv_speed;
        }
    });
    return time_in;
}

}  // namespace kams
