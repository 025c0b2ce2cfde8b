#pragma once

#include <span>
#include <vector>

#include "kams/fluid_sim.hpp"
#include "kams/packet_sim.hpp"

namespace kams {

// Cumulative queue-length distribution over consecutive integer bins 0..B.
struct EmpiricalCdf {
    int buffer_size = 0;
    std::vector<double> values;  // values[b] = P(Q <= b); nondecreasing, ends at 1
};

// Bins the post-warm-up samples of a trace. Fluid levels are floored to the
// integer bin. Throws EmptyAfterWarmup.
EmpiricalCdf build_cdf(const QueueTrace& trace, int buffer_size, double warmup_fraction);

// RMSE of (model - ref) over bins strictly above min_qlen, normalized by the
// mean of the reference over the same bins. Throws BinMismatch.
double nrmse(const EmpiricalCdf& model, const EmpiricalCdf& ref, int min_qlen = 5);

// Stationary fraction of time the buffer is full. Fluid traces use the exact
// measure of the pinned intervals; packet traces use the fraction of samples
// within half a packet of the limit. Throws EmptyAfterWarmup.
double full_buffer_probability(const QueueTrace& trace, double buffer_size,
                               double warmup_fraction = 0.2);

// Peak-to-mean ratio of the absolute real DFT coefficients of the loss
// series (zero frequency excluded). Large values flag periodic losses.
// Throws DegenerateSpectrum when every nonzero-frequency coefficient
// vanishes. complex_magnitude switches |Re(w_i)| to |w_i|.
double spikiness(const LossSeries& series, bool complex_magnitude = false);

double loss_overflow_ratio(double loss_rate, double full_buffer_prob);

struct RatioPoint {
    double rtt;
    double p_model;
    double p_ref;
};

// Mean of p_model/p_ref over points with rtt >= threshold and p_ref > 0.
// Throws NoQualifyingPoints.
double correction_factor(std::span<const RatioPoint> points, double rtt_threshold = 0.1);

// |(p_model / factor) / p_ref - 1|; throws ZeroReference.
double corrected_multiplicative_error(double p_model, double p_ref, double factor);

// Everything the validation study reports about one test point.
struct ComparisonReport {
    double rtt_s = 0;
    double buffer_pkts = 0;
    double nrmse = 0;
    double full_buffer_prob_model = 0;
    double full_buffer_prob_ref = 0;
    double multiplicative_error = 0;            // p_model / p_ref
    double corrected_multiplicative_error = 0;  // after sweep-level rescaling
    double spikiness = 0;
    double loss_overflow_ratio = 0;
};

}  // namespace kams
