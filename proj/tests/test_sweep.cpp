#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kams/csv.hpp"
#include "kams/errors.hpp"
#include "kams/sweep.hpp"

using namespace kams;

TEST_SUITE_BEGIN("sweep");

namespace {

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "kamsim_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = temp_dir() / name;
    std::ofstream out(path);
    out << text;
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// small but non-degenerate grid that runs in well under a second per point
SweepSpec tiny_spec() {
    SweepSpec s = desk_preset();
    s.buffer_values = {10, 20};
    s.rtt_values = {0.05, 0.1};
    s.sim_duration = 12.0;
    s.seed = 99;
    s.replications = 1;
    return s;
}

}  // namespace

TEST_CASE("parse a minimal config with defaults applied") {
    const auto path = write_temp("minimal.json", R"({
        "n_flows": 50,
        "bottleneck_mbps": 50.0,
        "access_mbps": 5.0,
        "buffer_values_pkts": [10, 20],
        "rtt_values_s": [0.1],
        "sim_duration_s": 60.0
    })");
    const auto spec = parse_config(path);
    CHECK(spec.n_flows == 50);
    CHECK(spec.warmup_fraction == 0.2);
    CHECK(spec.packet_size_bytes == 1500);
    CHECK(spec.md_factor == 0.5);
    CHECK(spec.ai_increment == 1.0);
    CHECK(spec.replications == 1);
    CHECK(spec.bottleneck_pps() == doctest::Approx(50e6 / (8.0 * 1500)));
}

TEST_CASE("missing required field is reported by name") {
    const auto path = write_temp("missing.json", R"({
        "n_flows": 50,
        "bottleneck_mbps": 50.0,
        "access_mbps": 5.0,
        "buffer_values_pkts": [10],
        "sim_duration_s": 60.0
    })");
    try {
        parse_config(path);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("rtt_values_s") != std::string::npos);
    }
}

TEST_CASE("all invariant violations are listed together") {
    const auto path = write_temp("bad.json", R"({
        "n_flows": -5,
        "bottleneck_mbps": 50.0,
        "access_mbps": 5.0,
        "buffer_values_pkts": [0],
        "rtt_values_s": [0.1],
        "sim_duration_s": 60.0,
        "md_factor": 2.0
    })");
    try {
        parse_config(path);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("n_flows") != std::string::npos);
        CHECK(msg.find("buffer_values_pkts") != std::string::npos);
        CHECK(msg.find("md_factor") != std::string::npos);
    }
}

TEST_CASE("malformed json is a parse error") {
    const auto path = write_temp("mangled.json", "{ not json");
    CHECK_THROWS_AS(parse_config(path), ParseError);
    CHECK_THROWS_AS(parse_config("/nonexistent/path.json"), ParseError);
}

TEST_CASE("config round-trips through its canonical form") {
    auto spec = desk_preset();
    spec.seed = 12345;
    spec.replications = 2;
    spec.loss_bin_width = 0.025;
    const auto path = write_temp("roundtrip.json", to_json(spec).dump(2));
    CHECK(parse_config(path) == spec);
}

TEST_CASE("presets carry the study parameters") {
    const auto desk = desk_preset();
    CHECK(desk.n_flows == 100);
    CHECK(desk.bottleneck_mbps == 100.0);
    CHECK(desk.access_mbps == 10.0);
    CHECK(desk.buffer_values.size() == 6);
    CHECK(desk.rtt_values.size() == 6);
    CHECK(desk.rtt_values.front() == 0.05);
    CHECK(desk.rtt_values.back() == 0.3);
    CHECK(desk.sim_duration == 600.0);
    CHECK(desk.replications == 3);
    // nu/C and N*nu/C keep the full-scale ratios
    CHECK(desk.access_mbps / desk.bottleneck_mbps == doctest::Approx(0.1));
    CHECK(desk.n_flows * desk.access_mbps / desk.bottleneck_mbps == doctest::Approx(10.0));

    const auto paper = paper_preset();
    CHECK(paper.n_flows == 1000);
    CHECK(paper.bottleneck_mbps == 1000.0);
    CHECK(paper.access_mbps == 100.0);
    CHECK(paper.buffer_values == std::vector<int>{50, 100, 150, 200, 250, 300});
    CHECK(paper.rtt_values == std::vector<double>{0.05, 0.10, 0.15, 0.20, 0.25, 0.30});
    CHECK(paper.buffer_values.size() * paper.rtt_values.size() == 36);
}

TEST_CASE("sweep covers the grid in rtt-major order") {
    auto spec = tiny_spec();
    const auto result = run_sweep(spec);
    REQUIRE(result.points.size() == 4);
    CHECK(result.points[0].rtt_s == 0.05);
    CHECK(result.points[0].buffer_pkts == 10);
    CHECK(result.points[1].buffer_pkts == 20);
    CHECK(result.points[2].rtt_s == 0.1);
    for (const auto& p : result.points) CHECK(p.ok());
}

TEST_CASE("sweep is deterministic and worker-count independent") {
    auto spec = tiny_spec();
    spec.workers = 1;
    const auto a = run_sweep(spec);
    spec.workers = 3;
    const auto b = run_sweep(spec);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].report.nrmse == b.points[i].report.nrmse);
        CHECK(a.points[i].report.full_buffer_prob_model ==
              b.points[i].report.full_buffer_prob_model);
        CHECK(a.points[i].report.full_buffer_prob_ref ==
              b.points[i].report.full_buffer_prob_ref);
        CHECK(a.points[i].fitted_mu == b.points[i].fitted_mu);
        CHECK(a.points[i].status == b.points[i].status);
    }

    const auto dir = temp_dir();
    write_reports_csv((dir / "rep_a.csv").string(), a);
    write_reports_csv((dir / "rep_b.csv").string(), b);
    CHECK(slurp((dir / "rep_a.csv").string()) == slurp((dir / "rep_b.csv").string()));
}

TEST_CASE("an undercapacity point is reported degenerate, not fatal") {
    SweepSpec spec = desk_preset();
    spec.buffer_values = {30};
    spec.rtt_values = {0.1};
    spec.sim_duration = 30.0;
    spec.cwnd_cap = 1.0;  // demand 100 pkts per rtt = 1000 pkt/s << C
    spec.exp_sensitivity = false;
    spec.replications = 1;
    const auto result = run_sweep(spec);
    REQUIRE(result.points.size() == 1);
    const auto& p = result.points[0];
    CHECK(p.ok());
    CHECK(p.status.rfind("degenerate", 0) == 0);
    CHECK(p.report.nrmse == 0.0);  // both cdfs are all-ones above the cutoff
    CHECK(p.report.full_buffer_prob_model == 0.0);
    CHECK(p.report.full_buffer_prob_ref == 0.0);
    CHECK(std::isnan(p.report.multiplicative_error));
    CHECK(std::isnan(result.correction_factor));
}

TEST_CASE("report csv carries the exact header") {
    const auto result = run_sweep(tiny_spec());
    const auto dir = temp_dir();
    const auto path = (dir / "header.csv").string();
    write_reports_csv(path, result);
    std::ifstream in(path);
    std::string comment, header;
    std::getline(in, comment);
    std::getline(in, header);
    CHECK(comment.rfind("# config:", 0) == 0);
    CHECK(header ==
          "rtt_s,buffer_pkts,nrmse,p_full_model,p_full_ref,mult_err,corrected_mult_err,"
          "spikiness,loss_overflow_ratio");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 4);
}

TEST_CASE("per-point seeds differ across coordinates and roles") {
    const auto a = point_seed(1, 0, 0, 0, kSeedRolePacket);
    CHECK(a != point_seed(1, 0, 1, 0, kSeedRolePacket));
    CHECK(a != point_seed(1, 1, 0, 0, kSeedRolePacket));
    CHECK(a != point_seed(1, 0, 0, 1, kSeedRolePacket));
    CHECK(a != point_seed(1, 0, 0, 0, kSeedRoleFluid));
    CHECK(a == point_seed(1, 0, 0, 0, kSeedRolePacket));
    CHECK(a != point_seed(2, 0, 0, 0, kSeedRolePacket));
}

TEST_SUITE_END();
