#include "kams/config_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kams/errors.hpp"

namespace kams {

namespace {

double mbps_to_pps(double mbps, int packet_size_bytes) {
    return mbps * 1e6 / (8.0 * packet_size_bytes);
}

// collects every missing/ill-typed field before giving up
struct FieldReader {
    const nlohmann::json& j;
    std::vector<std::string> problems;

    template <typename T>
    void require(const char* key, T& out) {
        if (!j.contains(key)) {
            problems.push_back(std::string("missing required field '") + key + "'");
            return;
        }
        read(key, out);
    }

    template <typename T>
    void optional(const char* key, T& out) {
        if (!j.contains(key)) return;
        read(key, out);
    }

    template <typename T>
    void read(const char* key, T& out) {
        try {
            out = j.at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            problems.push_back(std::string("field '") + key + "': " + e.what());
        }
    }
};

double rate_field_pps(const nlohmann::json& j, const std::string& name, int packet_size,
                      std::vector<std::string>& problems) {
    const std::string pps = name + "_pps";
    const std::string mbps = name + "_mbps";
    if (j.contains(pps)) return j.at(pps).get<double>();
    if (j.contains(mbps)) return mbps_to_pps(j.at(mbps).get<double>(), packet_size);
    problems.push_back("missing required field '" + pps + "' or '" + mbps + "'");
    return 0;
}

[[noreturn]] void throw_validation(const std::string& what,
                                   const std::vector<std::string>& problems) {
    std::ostringstream os;
    os << "invalid " << what << ":";
    for (const auto& p : problems) os << "\n  - " << p;
    throw ValidationError(os.str());
}

}  // namespace

double SweepSpec::bottleneck_pps() const { return mbps_to_pps(bottleneck_mbps, packet_size_bytes); }
double SweepSpec::access_pps() const { return mbps_to_pps(access_mbps, packet_size_bytes); }

void SweepSpec::validate() const {
    std::vector<std::string> problems;
    auto bad = [&problems](const char* msg) { problems.emplace_back(msg); };
    if (n_flows <= 0) bad("n_flows must be positive");
    if (!(bottleneck_mbps > 0)) bad("bottleneck_mbps must be > 0");
    if (!(access_mbps > 0)) bad("access_mbps must be > 0");
    if (packet_size_bytes <= 0) bad("packet_size_bytes must be positive");
    if (buffer_values.empty()) bad("buffer_values_pkts must be a nonempty list");
    for (int b : buffer_values) {
        if (b < 1) {
            bad("buffer_values_pkts entries must be >= 1");
            break;
        }
    }
    if (rtt_values.empty()) bad("rtt_values_s must be a nonempty list");
    for (double r : rtt_values) {
        if (!(r > 0)) {
            bad("rtt_values_s entries must be > 0");
            break;
        }
    }
    if (!(sim_duration > 0)) bad("sim_duration_s must be > 0");
    if (!(warmup_fraction >= 0 && warmup_fraction < 1)) bad("warmup_fraction must lie in [0,1)");
    if (replications < 1) bad("replications must be >= 1");
    if (!(ai_increment > 0)) bad("ai_increment_pkts must be > 0");
    if (!(md_factor > 0 && md_factor < 1)) bad("md_factor must lie in (0,1)");
    if (cwnd_cap < 0) bad("cwnd_cap_pkts must be >= 0");
    if (loss_bin_width < 0) bad("loss_bin_width_s must be >= 0");
    if (workers < 1) bad("workers must be >= 1");
    if (!problems.empty()) throw_validation("sweep config", problems);
}

SweepSpec desk_preset() {
    SweepSpec s;
    s.scale_label = "desk";
    s.n_flows = 100;
    s.bottleneck_mbps = 100.0;
    s.access_mbps = 10.0;
    s.buffer_values = {10, 18, 26, 34, 42, 50};
    s.rtt_values = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
    s.sim_duration = 600.0;
    s.seed = 20240808;
    s.replications = 3;  // pooled; keeps the reference CDFs out of the noise
    return s;
}

SweepSpec paper_preset() {
    SweepSpec s;
    s.scale_label = "paper";
    s.n_flows = 1000;
    s.bottleneck_mbps = 1000.0;
    s.access_mbps = 100.0;
    s.buffer_values = {50, 100, 150, 200, 250, 300};
    s.rtt_values = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
    s.sim_duration = 600.0;
    s.seed = 20240808;
    return s;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("config file " + path + ": " + e.what());
    }
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
    SweepSpec s;
    FieldReader r{j, {}};
    r.optional("scale_label", s.scale_label);
    r.require("n_flows", s.n_flows);
    r.require("bottleneck_mbps", s.bottleneck_mbps);
    r.require("access_mbps", s.access_mbps);
    r.optional("packet_size_bytes", s.packet_size_bytes);
    r.require("buffer_values_pkts", s.buffer_values);
    r.require("rtt_values_s", s.rtt_values);
    r.require("sim_duration_s", s.sim_duration);
    r.optional("warmup_fraction", s.warmup_fraction);
    r.optional("seed", s.seed);
    r.optional("replications", s.replications);
    r.optional("ai_increment_pkts", s.ai_increment);
    r.optional("md_factor", s.md_factor);
    r.optional("cwnd_cap_pkts", s.cwnd_cap);
    r.optional("loss_bin_width_s", s.loss_bin_width);
    r.optional("exp_sensitivity", s.exp_sensitivity);
    r.optional("workers", s.workers);
    if (!r.problems.empty()) throw_validation("sweep config", r.problems);
    s.validate();
    return s;
}

SweepSpec parse_config(const std::string& path) {
    return sweep_spec_from_json(load_json_file(path));
}

nlohmann::json to_json(const SweepSpec& s) {
    return nlohmann::json{{"scale_label", s.scale_label},
                          {"n_flows", s.n_flows},
                          {"bottleneck_mbps", s.bottleneck_mbps},
                          {"access_mbps", s.access_mbps},
                          {"packet_size_bytes", s.packet_size_bytes},
                          {"buffer_values_pkts", s.buffer_values},
                          {"rtt_values_s", s.rtt_values},
                          {"sim_duration_s", s.sim_duration},
                          {"warmup_fraction", s.warmup_fraction},
                          {"seed", s.seed},
                          {"replications", s.replications},
                          {"ai_increment_pkts", s.ai_increment},
                          {"md_factor", s.md_factor},
                          {"cwnd_cap_pkts", s.cwnd_cap},
                          {"loss_bin_width_s", s.loss_bin_width},
                          {"exp_sensitivity", s.exp_sensitivity}};
}

KamsConfig kams_config_from_json(const nlohmann::json& j) {
    KamsConfig c;
    FieldReader r{j, {}};
    r.optional("packet_size_bytes", c.packet_size);
    r.require("n_sources", c.n_sources);
    c.service_rate = rate_field_pps(j, "service_rate", c.packet_size, r.problems);
    c.peak_rate = rate_field_pps(j, "peak_rate", c.packet_size, r.problems);
    r.require("buffer_pkts", c.buffer_size);
    r.require("rtt_s", c.rtt);
    r.require("sim_duration_s", c.sim_duration);
    r.optional("warmup_fraction", c.warmup_fraction);
    r.optional("seed", c.seed);

    if (j.contains("cwnd_law")) {
        const auto& law = j.at("cwnd_law");
        try {
            const std::string type = law.at("type").get<std::string>();
            if (type == "truncated_normal") {
                c.cwnd_law = TruncatedNormalParams(law.at("mu_pkts").get<double>(),
                                                   law.at("sigma_pkts").get<double>());
            } else if (type == "exponential") {
                c.cwnd_law = ExponentialLaw(law.at("mean_pkts").get<double>());
            } else if (type == "half_normal") {
                c.cwnd_law = HalfNormalLaw(law.at("sigma_pkts").get<double>());
            } else {
                r.problems.push_back("cwnd_law.type must be truncated_normal, exponential "
                                     "or half_normal");
            }
        } catch (const nlohmann::json::exception& e) {
            r.problems.push_back(std::string("cwnd_law: ") + e.what());
        } catch (const InvalidParams& e) {
            r.problems.push_back(std::string("cwnd_law: ") + e.what());
        }
    } else {
        r.problems.push_back("missing required field 'cwnd_law'");
    }

    if (j.contains("off_law")) {
        try {
            const std::string type = j.at("off_law").at("type").get<std::string>();
            if (type == "constant") {
                c.off_law = ConstantOff{};
            } else if (type == "exponential") {
                c.off_law = ExponentialOff{};
            } else {
                r.problems.push_back("off_law.type must be constant or exponential");
            }
        } catch (const nlohmann::json::exception& e) {
            r.problems.push_back(std::string("off_law: ") + e.what());
        }
    }

    if (!r.problems.empty()) throw_validation("kams config", r.problems);
    c.validate();
    return c;
}

PacketSimConfig packet_config_from_json(const nlohmann::json& j) {
    PacketSimConfig c;
    FieldReader r{j, {}};
    r.optional("packet_size_bytes", c.packet_size);
    r.require("n_flows", c.n_flows);
    c.bottleneck_rate = rate_field_pps(j, "bottleneck_rate", c.packet_size, r.problems);
    c.access_rate = rate_field_pps(j, "access_rate", c.packet_size, r.problems);
    r.require("buffer_pkts", c.buffer_size);
    r.require("rtt_s", c.rtt);
    r.require("sim_duration_s", c.sim_duration);
    r.optional("warmup_fraction", c.warmup_fraction);
    r.optional("seed", c.seed);
    r.optional("ai_increment_pkts", c.ai_increment);
    r.optional("md_factor", c.md_factor);
    r.optional("cwnd_cap_pkts", c.cwnd_cap);
    r.optional("sample_phase", c.sample_phase);
    if (!r.problems.empty()) throw_validation("packet config", r.problems);
    c.validate();
    return c;
}

ExpOnOffSystem exp_system_from_json(const nlohmann::json& j) {
    ExpOnOffSystem s;
    FieldReader r{j, {}};
    int packet_size = 1500;
    r.optional("packet_size_bytes", packet_size);
    r.require("n_sources", s.n_sources);
    s.peak_rate = rate_field_pps(j, "peak_rate", packet_size, r.problems);
    s.service_rate = rate_field_pps(j, "service_rate", packet_size, r.problems);
    r.require("mean_on_s", s.mean_on);
    r.require("mean_off_s", s.mean_off);
    if (!r.problems.empty()) throw_validation("exp on-off config", r.problems);
    s.validate();
    return s;
}

}  // namespace kams
