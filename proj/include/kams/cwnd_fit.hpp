#pragma once

#include <cstdint>
#include <map>

#include "kams/truncated_normal.hpp"

namespace kams {

// Integer-binned histogram of observed congestion window (burst) sizes.
struct EmpiricalPmf {
    std::map<std::int64_t, std::uint64_t> counts;
    std::uint64_t total = 0;

    void add(std::int64_t bin, std::uint64_t count = 1);
};

// Mode estimate: arithmetic mean of the four bins with the highest counts.
// Ties are broken toward the lower bin value. Requires at least four bins
// with nonzero count; throws TooFewBins otherwise.
double estimate_mode(const EmpiricalPmf& pmf);

struct TnFit {
    TruncatedNormalParams params;
    bool at_lower_bound = false;  // scale search pinned at its lower limit
    double objective = 0;         // residual sum of squares at the optimum
};

// Two-step fit: the distribution's mean is predetermined from the data (the
// sample mean, which makes the fitted law carry the observed load exactly),
// then the scale minimizes the squared log-density error against the
// per-unit-bin empirical frequencies; the location parameter follows from
// (mean, scale). Bins with fewer than two observations are excluded: an
// empty bin has no logarithm and a singleton estimates its own
// log-frequency no better than +-1. Throws TooFewBins, and FitDiverged if
// the scale search runs off its upper limit.
TnFit fit_truncated_normal(const EmpiricalPmf& pmf);

}  // namespace kams
