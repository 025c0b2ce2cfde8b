#include <doctest.h>

#include <cmath>
#include <map>

#include "kams/analysis.hpp"
#include "kams/errors.hpp"
#include "kams/packet_sim.hpp"

using namespace kams;

TEST_SUITE_BEGIN("packet");

namespace {

PacketSimConfig desk_cfg(int buffer, double rtt) {
    PacketSimConfig cfg;
    cfg.n_flows = 100;
    cfg.bottleneck_rate = 8333.3333333333339;
    cfg.access_rate = 833.33333333333337;
    cfg.buffer_size = buffer;
    cfg.rtt = rtt;
    cfg.sim_duration = 600.0;
    cfg.seed = 404;
    return cfg;
}

}  // namespace

TEST_CASE("window-limited single flow: full window per round trip, no loss") {
    PacketSimConfig cfg;
    cfg.n_flows = 1;
    cfg.bottleneck_rate = 10000.0;
    cfg.access_rate = 1e7;  // burst duration negligible next to the rtt
    cfg.buffer_size = 1000;
    cfg.rtt = 0.1;
    cfg.sim_duration = 200.0;
    cfg.cwnd_cap = 10.0;
    const auto res = run_packet_sim(cfg);
    CHECK(res.dropped == 0);
    // cwnd climbs to the cap and stays; throughput settles at cap per rtt
    const double rate = static_cast<double>(res.delivered) / cfg.sim_duration;
    CHECK(rate == doctest::Approx(10.0 / cfg.rtt).epsilon(0.02));
}

TEST_CASE("aggregate under capacity with unit windows never queues deep") {
    PacketSimConfig cfg;
    cfg.n_flows = 20;
    cfg.bottleneck_rate = 1000.0;
    cfg.access_rate = 1000.0;
    cfg.buffer_size = 50;
    cfg.rtt = 0.1;           // demand = 20 pkts / 0.1 s = 200 pkt/s << 1000
    cfg.sim_duration = 100.0;
    cfg.cwnd_cap = 1.0;
    const auto res = run_packet_sim(cfg);
    CHECK(res.dropped == 0);
    for (const auto& s : res.trace.samples) CHECK(s.q <= 20.0);
}

TEST_CASE("packets are conserved exactly") {
    const auto res = run_packet_sim(desk_cfg(30, 0.1));
    CHECK(res.sent == res.delivered + res.dropped + res.in_flight_end);
    CHECK(res.dropped > 0);  // congested config must actually lose packets
}

TEST_CASE("queue samples stay within the buffer") {
    auto cfg = desk_cfg(25, 0.15);
    cfg.sim_duration = 120.0;
    const auto res = run_packet_sim(cfg);
    REQUIRE(res.trace.samples.size() == 801);  // once per rtt incl. t=0
    for (const auto& s : res.trace.samples) {
        CHECK(s.q >= 0.0);
        CHECK(s.q <= 25.0);
        CHECK(s.q == std::floor(s.q));  // whole packets
    }
}

TEST_CASE("within a burst, arrivals are spaced by exactly the access gap") {
    auto cfg = desk_cfg(30, 0.1);
    cfg.sim_duration = 30.0;
    cfg.record_arrivals = true;
    const auto res = run_packet_sim(cfg);
    const double gap = 1.0 / cfg.access_rate;
    std::map<int, double> last_arrival;
    int checked = 0;
    for (const auto& [flow, t] : res.arrivals) {
        const auto it = last_arrival.find(flow);
        if (it != last_arrival.end()) {
            const double dt = t - it->second;
            // either the next packet of the burst or a fresh burst
            if (dt < 2.0 * gap) {
                CHECK(dt == doctest::Approx(gap).epsilon(1e-12));
                ++checked;
            }
        }
        last_arrival[flow] = t;
    }
    CHECK(checked > 100000);
}

TEST_CASE("window trajectories are additive up, multiplicative down") {
    auto cfg = desk_cfg(20, 0.1);
    cfg.sim_duration = 120.0;
    cfg.record_cwnd_series = true;
    const auto res = run_packet_sim(cfg);
    const double cap = cfg.effective_cwnd_cap();
    std::uint64_t ups = 0, downs = 0;
    for (const auto& series : res.cwnd_series) {
        for (std::size_t i = 1; i < series.size(); ++i) {
            const double prev = series[i - 1];
            const double next = series[i];
            const bool additive = next == doctest::Approx(std::min(cap, prev + 1.0));
            const bool halved = next == doctest::Approx(std::max(1.0, 0.5 * prev));
            CHECK((additive || halved));
            ups += additive;
            downs += halved;
        }
    }
    CHECK(ups > 1000);
    CHECK(downs > 100);
}

TEST_CASE("loss events balance the AIMD fixed point") {
    // renewal consistency: in equilibrium one additive increment per clean
    // burst balances one halving per lossy burst, so the loss-event rate per
    // packet is 2 / (wbar * (E[w at loss] + 2))
    auto cfg = desk_cfg(100, 0.1);
    const auto res = run_packet_sim(cfg);
    REQUIRE(res.loss_events_stationary > 100);
    double wbar = 0, n = 0;
    for (const auto& [b, c] : res.cwnd_pmf.counts) {
        wbar += static_cast<double>(b) * static_cast<double>(c);
        n += static_cast<double>(c);
    }
    wbar /= n;
    const double w_ev =
        res.cwnd_at_loss_sum / static_cast<double>(res.loss_events_stationary);
    const double predicted = 2.0 / (wbar * (w_ev + 2.0));
    const double measured = static_cast<double>(res.loss_events_stationary) /
                            static_cast<double>(res.sent_stationary);
    CHECK(std::fabs(measured / predicted - 1.0) < 0.25);
}

TEST_CASE("same seed, same run") {
    auto cfg = desk_cfg(15, 0.1);
    cfg.sim_duration = 60.0;
    const auto a = run_packet_sim(cfg);
    const auto b = run_packet_sim(cfg);
    CHECK(a.trace.samples == b.trace.samples);
    CHECK(a.drop_times == b.drop_times);
    CHECK(a.sent == b.sent);
    CHECK(a.cwnd_pmf.counts == b.cwnd_pmf.counts);
}

TEST_CASE("aggregate_losses counts drops per bin") {
    SUBCASE("no drops") {
        const auto s = aggregate_losses({}, 1.0, 0.0, 5.0);
        REQUIRE(s.bins.size() == 5);
        for (const auto b : s.bins) CHECK(b == 0);
    }
    SUBCASE("direct counting") {
        const std::vector<double> drops{0.01, 0.02, 1.5};
        const auto s = aggregate_losses(drops, 1.0, 0.0, 2.0);
        REQUIRE(s.bins.size() == 2);
        CHECK(s.bins[0] == 2);
        CHECK(s.bins[1] == 1);
    }
    SUBCASE("drops outside the window are ignored") {
        const std::vector<double> drops{-0.5, 0.5, 2.5};
        const auto s = aggregate_losses(drops, 1.0, 0.0, 2.0);
        CHECK(s.bins[0] == 1);
        CHECK(s.bins[1] == 0);
    }
    SUBCASE("empty window") {
        CHECK_THROWS_AS(aggregate_losses({}, 1.0, 5.0, 5.0), EmptyWindow);
        CHECK_THROWS_AS(aggregate_losses({}, 0.0, 0.0, 5.0), InvalidParams);
    }
}

TEST_CASE("periodic drops make a spiky loss spectrum") {
    std::vector<double> drops;
    for (double t = 0.0; t < 600.0; t += 0.5) drops.push_back(t);
    const auto s = aggregate_losses(drops, 0.1, 0.0, 600.0);
    REQUIRE(s.bins.size() >= 1000);
    CHECK(spikiness(s) >= 10.0);
}

TEST_CASE("sampling phase shifts the sample instants") {
    auto cfg = desk_cfg(20, 0.1);
    cfg.sim_duration = 30.0;
    cfg.sample_phase = 0.25;
    const auto res = run_packet_sim(cfg);
    REQUIRE_FALSE(res.trace.samples.empty());
    for (std::size_t i = 0; i < res.trace.samples.size(); ++i) {
        CHECK(res.trace.samples[i].t ==
              doctest::Approx((i + 0.25) * cfg.rtt).epsilon(1e-12));
    }
    cfg.sample_phase = 1.0;
    CHECK_THROWS_AS(run_packet_sim(cfg), kams::ValidationError);
}

TEST_CASE("config validation lists all problems") {
    PacketSimConfig cfg;
    cfg.n_flows = 0;
    cfg.md_factor = 1.5;
    try {
        cfg.validate();
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("n_flows") != std::string::npos);
        CHECK(msg.find("md_factor") != std::string::npos);
        CHECK(msg.find("buffer_size") != std::string::npos);
    }
}

TEST_SUITE_END();
