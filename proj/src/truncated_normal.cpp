#include "kams/truncated_normal.hpp"
#include <algorithm>

#include <cmath>

#include "kams/errors.hpp"
#include "kams/normal.hpp"

namespace kams {

namespace {

// Standardized truncation point: the support edge 0 expressed in units of
// the underlying normal.
double trunc_alpha(const TruncatedNormalParams& p) { return -p.mu / p.sigma; }

// Mass of the underlying normal above the truncation point.
double trunc_normalizer(const TruncatedNormalParams& p) {
    return normal_ccdf(trunc_alpha(p));
}

constexpr double kRejectionAlpha = 8.0;  // switch point for the sampler

// One-sided truncated standard normal on [a, inf) for large a, via
// exponential majorization (Robert 1995).
double sample_tail_rejection(double a, Rng& rng) {
    const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        const double z = a + rng.exponential(1.0 / lambda);
        const double d = z - lambda;
        if (std::log(rng.uniform_pos()) <= -0.5 * d * d) return z;
    }
}

}  // namespace

TruncatedNormalParams::TruncatedNormalParams(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
    if (!(std::isfinite(mu) && std::isfinite(sigma)) || sigma <= 0.0) {
        throw InvalidParams("TruncatedNormalParams: sigma must be finite and > 0");
    }
    // Beyond ~30 sigma below the support the normalizer becomes too small to
    // evaluate in double precision.
    if (mu < -30.0 * sigma) {
        throw InvalidParams("TruncatedNormalParams: mu below -30*sigma is not representable");
    }
}

double tn_pdf(const TruncatedNormalParams& p, double x) {
    if (x < 0.0) return 0.0;
    const double z = (x - p.mu) / p.sigma;
    return normal_pdf(z) / (p.sigma * trunc_normalizer(p));
}

double tn_log_pdf(const TruncatedNormalParams& p, double x) {
    if (x < 0.0) return -std::numeric_limits<double>::infinity();
    const double z = (x - p.mu) / p.sigma;
    return -0.5 * z * z - std::log(p.sigma) + std::log(kInvSqrt2Pi) -
           log_normal_cdf(p.mu / p.sigma);
}

double tn_cdf(const TruncatedNormalParams& p, double x) {
    if (x <= 0.0) return 0.0;
    const double a = trunc_alpha(p);
    const double z = (x - p.mu) / p.sigma;
    // complementary form keeps the ratio accurate when the truncated mass is small
    const double c = (normal_ccdf(a) - normal_ccdf(z)) / trunc_normalizer(p);
    return c < 0.0 ? 0.0 : (c > 1.0 ? 1.0 : c);
}

double tn_mean(const TruncatedNormalParams& p) {
    const double a = trunc_alpha(p);
    return p.mu + p.sigma * normal_pdf(a) / normal_ccdf(a);
}

double tn_sample(const TruncatedNormalParams& p, Rng& rng) {
    const double a = trunc_alpha(p);
    double z;
    if (a > kRejectionAlpha) {
        z = sample_tail_rejection(a, rng);
    } else {
        // P(Z > z) = (1 - u) * P(Z > a) maps u in (0,1] onto the support
        const double tail = (1.0 - rng.uniform()) * normal_ccdf(a);
        z = -normal_quantile(tail);
    }
    const double x = p.mu + p.sigma * z;
    return x < 0.0 ? 0.0 : x;
}

ExponentialLaw::ExponentialLaw(double mean_) : mean(mean_) {
    if (!(std::isfinite(mean) && mean > 0.0)) {
        throw InvalidParams("ExponentialLaw: mean must be finite and > 0");
    }
}

HalfNormalLaw::HalfNormalLaw(double sigma_) : sigma(sigma_) {
    if (!(std::isfinite(sigma) && sigma > 0.0)) {
        throw InvalidParams("HalfNormalLaw: sigma must be finite and > 0");
    }
}

DiscreteLaw::DiscreteLaw(std::vector<double> values_, const std::vector<double>& weights)
    : values(std::move(values_)) {
    if (values.empty() || values.size() != weights.size()) {
        throw InvalidParams("DiscreteLaw: need matching, nonempty values and weights");
    }
    cum_weights.reserve(weights.size());
    double acc = 0.0;
    for (const double w : weights) {
        if (!(w >= 0) || !std::isfinite(w)) {
            throw InvalidParams("DiscreteLaw: weights must be finite and >= 0");
        }
        acc += w;
        cum_weights.push_back(acc);
    }
    if (!(acc > 0)) throw InvalidParams("DiscreteLaw: total weight must be > 0");
}

double draw_burst(const BurstLaw& law, Rng& rng) {
    return std::visit(
        [&rng](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, TruncatedNormalParams>) {
                return tn_sample(l, rng);
            } else if constexpr (std::is_same_v<T, ExponentialLaw>) {
                return rng.exponential(l.mean);
            } else if constexpr (std::is_same_v<T, DiscreteLaw>) {
                const double u = rng.uniform() * l.cum_weights.back();
                const auto it =
                    std::upper_bound(l.cum_weights.begin(), l.cum_weights.end(), u);
                const auto idx = static_cast<std::size_t>(it - l.cum_weights.begin());
                return l.values[idx < l.values.size() ? idx : l.values.size() - 1];
            } else {
                return tn_sample(TruncatedNormalParams(0.0, l.sigma), rng);
            }
        },
        law);
}

double burst_mean(const BurstLaw& law) {
    return std::visit(
        [](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, TruncatedNormalParams>) {
                return tn_mean(l);
            } else if constexpr (std::is_same_v<T, ExponentialLaw>) {
                return l.mean;
            } else if constexpr (std::is_same_v<T, DiscreteLaw>) {
                double mean = 0.0, prev = 0.0;
                for (std::size_t i = 0; i < l.values.size(); ++i) {
                    mean += l.values[i] * (l.cum_weights[i] - prev);
                    prev = l.cum_weights[i];
                }
                return mean / l.cum_weights.back();
            } else {
                return tn_mean(TruncatedNormalParams(0.0, l.sigma));
            }
        },
        law);
}

}  // namespace kams
