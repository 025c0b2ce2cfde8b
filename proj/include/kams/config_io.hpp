#pragma once

#include <string>
#include <vector>

#include "kams/fluid_sim.hpp"
#include "kams/packet_sim.hpp"
#include "kams/ams_analytic.hpp"

#include <json.hpp>

namespace kams {

// One experiment grid: every buffer size crossed with every round-trip time,
// sharing the remaining scalars. Link speeds are given in Mbit/s and turned
// into packets/s here, at the config boundary.
struct SweepSpec {
    std::string scale_label;
    int n_flows = 0;
    double bottleneck_mbps = 0;
    double access_mbps = 0;
    int packet_size_bytes = 1500;
    std::vector<int> buffer_values;   // packets
    std::vector<double> rtt_values;   // seconds
    double sim_duration = 0;          // seconds
    double warmup_fraction = 0.2;
    std::uint64_t seed = 1;
    int replications = 1;
    double ai_increment = 1.0;
    double md_factor = 0.5;
    double cwnd_cap = 0;              // packets; 0 = auto
    double loss_bin_width = 0;        // seconds; 0 = one bin per round trip
    bool exp_sensitivity = true;      // also run the equal-mean exponential law
    int workers = 1;                  // execution knob; not part of the
                                      // canonical config emission

    double bottleneck_pps() const;
    double access_pps() const;

    void validate() const;  // throws ValidationError listing every violation

    bool operator==(const SweepSpec&) const = default;
};

SweepSpec desk_preset();
SweepSpec paper_preset();

// Structured-text round trip. parse_config throws ParseError on malformed
// input and ValidationError once parsed values violate an invariant.
SweepSpec parse_config(const std::string& path);
SweepSpec sweep_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepSpec& spec);

// Engine configs from JSON, for the single-run subcommands. Rates accept
// either *_pps or *_mbps (with packet_size_bytes).
KamsConfig kams_config_from_json(const nlohmann::json& j);
PacketSimConfig packet_config_from_json(const nlohmann::json& j);
ExpOnOffSystem exp_system_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);  // throws ParseError

}  // namespace kams
