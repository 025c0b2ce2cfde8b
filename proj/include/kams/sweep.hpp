#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "kams/analysis.hpp"
#include "kams/config_io.hpp"

namespace kams {

// Validation study for one grid point, averaged over replications. Fields
// that cannot be computed for a degenerate point are NaN and the status says
// why. A failed point carries the error text instead of aborting the sweep.
struct PointResult {
    int buffer_pkts = 0;
    double rtt_s = 0;
    ComparisonReport report;
    double nrmse_exp = std::nan("");       // equal-mean exponential on-law
    double nrmse_exp_both = std::nan("");  // exponential on- and off-laws
    double loss_rate = std::nan("");
    double fitted_mu = std::nan("");
    double fitted_sigma = std::nan("");
    bool fit_at_lower_bound = false;
    std::string status = "ok";  // "ok", "degenerate: ...", "failed: ..."

    bool ok() const { return status.rfind("failed", 0) != 0; }
};

struct SweepResult {
    SweepSpec spec;
    std::vector<PointResult> points;  // rtt-major, then buffer
    double correction_factor = std::nan("");
};

// Runs the packet reference, fits the window law, runs the fluid engine with
// the fitted law (plus the exponential variant if enabled) and compares, for
// every grid point. Deterministic for a given spec; worker count only
// affects wall time.
SweepResult run_sweep(const SweepSpec& spec);

// Per-point substream roles.
inline constexpr std::uint64_t kSeedRolePacket = 0;
inline constexpr std::uint64_t kSeedRoleFluid = 1;
inline constexpr std::uint64_t kSeedRoleFluidExp = 2;
inline constexpr std::uint64_t kSeedRoleFluidExpBoth = 3;

std::uint64_t point_seed(std::uint64_t master, std::size_t rtt_idx, std::size_t buf_idx,
                         int replication, std::uint64_t role);

// Engine configs for one grid point, shared by the sweep and the CLI.
PacketSimConfig packet_point_config(const SweepSpec& spec, int buffer_pkts, double rtt,
                                    std::uint64_t seed);
KamsConfig fluid_point_config(const SweepSpec& spec, int buffer_pkts, double rtt,
                              const BurstLaw& law, std::uint64_t seed);

}  // namespace kams
