// kamsim: fluid-model TCP queue simulator, packet-level AIMD reference and
// comparison toolkit. Subcommands: kams run, packet run, ams curve, compare,
// sweep. Exit codes: 0 success, 1 usage/parse, 2 validation, 3 runtime.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kams/csv.hpp"
#include "kams/errors.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string preset;
    std::optional<std::uint64_t> seed;
    int workers = 0;  // 0 = leave spec value
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--out-dir", opts.out_dir, "output directory");
    cmd->add_option("--preset", opts.preset, "parameter preset")
        ->check(CLI::IsMember({"paper", "desk"}));
    cmd->add_option("--seed", opts.seed, "override the master seed");
}

enum class PresetShape { Sweep, FluidRun, PacketRun, AmsCurve };

// The presets are sweep-shaped; the single-run subcommands take engine
// configs, so the preset's shared scalars are translated to the engine's
// field names (grid lists collapse to their first entry).
nlohmann::json preset_as(const kams::SweepSpec& spec, PresetShape shape) {
    if (shape == PresetShape::Sweep) return kams::to_json(spec);
    nlohmann::json j{{"packet_size_bytes", spec.packet_size_bytes},
                     {"buffer_pkts", spec.buffer_values.front()},
                     {"rtt_s", spec.rtt_values.front()},
                     {"sim_duration_s", spec.sim_duration},
                     {"warmup_fraction", spec.warmup_fraction},
                     {"seed", spec.seed}};
    if (shape == PresetShape::FluidRun) {
        j["n_sources"] = spec.n_flows;
        j["service_rate_mbps"] = spec.bottleneck_mbps;
        j["peak_rate_mbps"] = spec.access_mbps;
    } else if (shape == PresetShape::PacketRun) {
        j["n_flows"] = spec.n_flows;
        j["bottleneck_rate_mbps"] = spec.bottleneck_mbps;
        j["access_rate_mbps"] = spec.access_mbps;
        j["ai_increment_pkts"] = spec.ai_increment;
        j["md_factor"] = spec.md_factor;
        j["cwnd_cap_pkts"] = spec.cwnd_cap;
    } else {
        j = nlohmann::json{{"n_sources", spec.n_flows},
                           {"service_rate_mbps", spec.bottleneck_mbps},
                           {"peak_rate_mbps", spec.access_mbps},
                           {"packet_size_bytes", spec.packet_size_bytes}};
    }
    return j;
}

nlohmann::json effective_json(const CommonOpts& opts, PresetShape shape = PresetShape::Sweep) {
    nlohmann::json j;
    if (opts.preset == "desk") {
        j = preset_as(kams::desk_preset(), shape);
    } else if (opts.preset == "paper") {
        j = preset_as(kams::paper_preset(), shape);
    }
    if (!opts.config_path.empty()) {
        const auto file = kams::load_json_file(opts.config_path);
        if (j.is_null()) {
            j = file;
        } else {
            j.merge_patch(file);  // explicit config fields win over the preset
        }
    }
    if (j.is_null()) {
        throw kams::ParseError("either --config or --preset is required");
    }
    if (opts.seed) j["seed"] = *opts.seed;
    return j;
}

std::filesystem::path out_path(const CommonOpts& opts, const char* name) {
    std::filesystem::create_directories(opts.out_dir);
    return std::filesystem::path(opts.out_dir) / name;
}

void write_sweep_outputs(const CommonOpts& opts, const kams::SweepResult& result) {
    kams::write_reports_csv(out_path(opts, "reports.csv").string(), result);
    kams::write_contour_long_csv(out_path(opts, "contour_long.csv").string(), result);
    kams::write_fits_csv(out_path(opts, "fits.csv").string(), result);
    kams::write_point_status_csv(out_path(opts, "point_status.csv").string(), result);
    if (result.spec.exp_sensitivity) {
        kams::write_exp_sensitivity_csv(out_path(opts, "exp_sensitivity.csv").string(), result);
    }
    std::cout << "sweep: " << result.points.size() << " points, correction factor "
              << result.correction_factor << "\n";
}

int run_kams_cmd(const CommonOpts& opts) {
    const auto j = effective_json(opts, PresetShape::FluidRun);
    const auto cfg = kams::kams_config_from_json(j);
    const auto trace = kams::run_kams(cfg);
    kams::write_trace_csv(out_path(opts, "trace.csv").string(), trace, j);
    kams::write_overflow_csv(out_path(opts, "overflow_intervals.csv").string(), trace, j);
    std::cout << "kams run: " << trace.samples.size() << " samples, "
              << trace.overflow_intervals.size() << " overflow intervals, discarded "
              << trace.discarded_fluid << " pkts\n";
    return 0;
}

int run_packet_cmd(const CommonOpts& opts) {
    const auto j = effective_json(opts, PresetShape::PacketRun);
    const auto cfg = kams::packet_config_from_json(j);
    const auto res = kams::run_packet_sim(cfg);
    kams::write_trace_csv(out_path(opts, "trace.csv").string(), res.trace, j);
    const double bin_w = cfg.rtt;
    const auto losses = kams::aggregate_losses(
        res.drop_times, bin_w, cfg.warmup_fraction * cfg.sim_duration, cfg.sim_duration);
    kams::write_loss_bins_csv(out_path(opts, "loss_bins.csv").string(), losses, j);
    std::cout << "packet run: sent " << res.sent << ", dropped " << res.dropped
              << ", stationary loss rate " << res.loss_rate() << "\n";
    return 0;
}

int run_ams_cmd(const CommonOpts& opts, double x_max, double x_step) {
    const auto j = effective_json(opts, PresetShape::AmsCurve);
    const auto sys = kams::exp_system_from_json(j);
    const kams::AmsSolution solution(sys);
    std::vector<double> xs, ps;
    for (double x = 0.0; x <= x_max + 1e-12; x += x_step) {
        xs.push_back(x);
        ps.push_back(solution.overflow_probability(x));
    }
    kams::write_ams_curve_csv(out_path(opts, "ams_curve.csv").string(), xs, ps, j);
    std::cout << "ams curve: P(Q>0) = " << solution.overflow_probability(0.0) << ", "
              << xs.size() << " levels\n";
    return 0;
}

int run_sweep_cmd(const CommonOpts& opts, bool single_point) {
    auto j = effective_json(opts);
    auto spec = kams::sweep_spec_from_json(j);
    if (opts.workers > 0) spec.workers = opts.workers;
    if (single_point && (spec.buffer_values.size() != 1 || spec.rtt_values.size() != 1)) {
        throw kams::ValidationError(
            "compare expects a single test point: one buffer value and one rtt value");
    }
    const auto result = kams::run_sweep(spec);
    write_sweep_outputs(opts, result);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"KAMS fluid-model TCP queuing simulator and validation toolkit"};
    app.require_subcommand(1);

    CommonOpts kams_opts, packet_opts, ams_opts, compare_opts, sweep_opts;
    double x_max = 100.0, x_step = 1.0;

    auto* kams_cmd = app.add_subcommand("kams", "fluid engine");
    auto* kams_run = kams_cmd->add_subcommand("run", "run the fluid engine once");
    add_common(kams_run, kams_opts);
    kams_cmd->require_subcommand(1);

    auto* packet_cmd = app.add_subcommand("packet", "packet-level reference");
    auto* packet_run = packet_cmd->add_subcommand("run", "run the packet reference once");
    add_common(packet_run, packet_opts);
    packet_cmd->require_subcommand(1);

    auto* ams_cmd = app.add_subcommand("ams", "analytic exponential on-off solution");
    auto* ams_curve = ams_cmd->add_subcommand("curve", "emit the overflow probability curve");
    add_common(ams_curve, ams_opts);
    ams_curve->add_option("--x-max", x_max, "largest queue level to evaluate");
    ams_curve->add_option("--x-step", x_step, "level spacing");
    ams_cmd->require_subcommand(1);

    auto* compare_cmd = app.add_subcommand("compare", "validate one test point");
    add_common(compare_cmd, compare_opts);

    auto* sweep_cmd = app.add_subcommand("sweep", "run the full validation grid");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--workers", sweep_opts.workers, "parallel grid workers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (kams_run->parsed()) return run_kams_cmd(kams_opts);
        if (packet_run->parsed()) return run_packet_cmd(packet_opts);
        if (ams_curve->parsed()) return run_ams_cmd(ams_opts, x_max, x_step);
        if (compare_cmd->parsed()) return run_sweep_cmd(compare_opts, true);
        if (sweep_cmd->parsed()) return run_sweep_cmd(sweep_opts, false);
    } catch (const kams::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const kams::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const kams::InvalidParams& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
