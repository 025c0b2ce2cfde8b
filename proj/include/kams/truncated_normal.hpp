#pragma once

#include <variant>
#include <vector>

#include "kams/rng.hpp"

namespace kams {

// Normal(mu, sigma^2) conditioned on [0, inf). Location and scale are the
// parameters of the underlying normal, in packets; they are not the mean and
// standard deviation of the truncated variable.
struct TruncatedNormalParams {
    double mu;
    double sigma;

    TruncatedNormalParams(double mu_, double sigma_);

    bool operator==(const TruncatedNormalParams&) const = default;
};

double tn_pdf(const TruncatedNormalParams& p, double x);
double tn_log_pdf(const TruncatedNormalParams& p, double x);
double tn_cdf(const TruncatedNormalParams& p, double x);
double tn_mean(const TruncatedNormalParams& p);

// Inverse-CDF sampling; switches to one-sided exponential rejection
// (Robert 1995) when the truncation point sits far in the upper tail of the
// underlying normal, where the quantile path loses nothing but these draws
// would be wasteful. Deterministic given the stream.
double tn_sample(const TruncatedNormalParams& p, Rng& rng);

// Burst-size laws for the on-period of the fluid engine. The truncated
// normal is the default; the exponential and half-normal variants exist for
// the sensitivity experiments.
struct ExponentialLaw {
    double mean;
    explicit ExponentialLaw(double mean_);
    bool operator==(const ExponentialLaw&) const = default;
};

struct HalfNormalLaw {
    double sigma;  // truncated normal with mu = 0
    explicit HalfNormalLaw(double sigma_);
    bool operator==(const HalfNormalLaw&) const = default;
};

// Empirical burst-size law: draws one of the listed values with probability
// proportional to its weight. Diagnostic tool for separating fit error from
// engine error; not part of the config surface.
struct DiscreteLaw {
    std::vector<double> values;
    std::vector<double> cum_weights;  // strictly increasing, ends at total
    DiscreteLaw(std::vector<double> values_, const std::vector<double>& weights);
    bool operator==(const DiscreteLaw&) const = default;
};

using BurstLaw = std::variant<TruncatedNormalParams, ExponentialLaw, HalfNormalLaw, DiscreteLaw>;

double draw_burst(const BurstLaw& law, Rng& rng);
double burst_mean(const BurstLaw& law);

// Off-period laws: constant (the validation setting) or exponential with the
// same mean (sensitivity setting). The scale is supplied by the caller.
struct ConstantOff {
    bool operator==(const ConstantOff&) const = default;
};
struct ExponentialOff {
    bool operator==(const ExponentialOff&) const = default;
};
using OffLaw = std::variant<ConstantOff, ExponentialOff>;

}  // namespace kams
