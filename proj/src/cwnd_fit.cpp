#include "kams/cwnd_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kams/errors.hpp"

namespace kams {

namespace {

constexpr double kSigmaLo = 1e-3;
constexpr double kSigmaHi = 1e4;  // packets
constexpr double kRelTol = 1e-6;

struct BinObs {
    double x;
    double log_freq;
};

// Location parameter that gives the truncated distribution the target mean
// at the given scale. tn_mean is strictly increasing in mu, so bisection is
// safe; the lower clamp keeps the parameters inside the representable range.
double location_for_mean(double mean, double sigma) {
    double lo = std::max(mean - 8.0 * sigma, -25.0 * sigma);
    double hi = mean;
    for (int i = 0; i < 80 && hi - lo > 1e-12 * (1.0 + std::fabs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (tn_mean(TruncatedNormalParams(mid, sigma)) < mean ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double objective(double mean, double sigma, const std::vector<BinObs>& obs) {
    const TruncatedNormalParams p(location_for_mean(mean, sigma), sigma);
    double s = 0.0;
    for (const auto& o : obs) {
        const double d = tn_log_pdf(p, o.x) - o.log_freq;
        s += d * d;
    }
    return s;
}

}  // namespace

void EmpiricalPmf::add(std::int64_t bin, std::uint64_t count) {
    if (bin < 0) throw InvalidParams("EmpiricalPmf: bins must be nonnegative integers");
    if (count == 0) return;
    counts[bin] += count;
    total += count;
}

double estimate_mode(const EmpiricalPmf& pmf) {
    std::vector<std::pair<std::int64_t, std::uint64_t>> bins;
    for (const auto& [bin, count] : pmf.counts) {
        if (count > 0) bins.emplace_back(bin, count);
    }
    if (bins.size() < 4) {
        throw TooFewBins("estimate_mode: need at least 4 bins with nonzero count");
    }
    std::sort(bins.begin(), bins.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;  // equal counts: lower bin wins
    });
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) sum += static_cast<double>(bins[i].first);
    return sum / 4.0;
}

TnFit fit_truncated_normal(const EmpiricalPmf& pmf) {
    if (pmf.total == 0) throw TooFewBins("fit_truncated_normal: empty histogram");
    estimate_mode(pmf);  // enforces the >= 4 nonzero bins precondition

    // the distribution's mean is pinned to the sample mean, which keeps the
    // fitted law's offered load equal to the observed one; the scale is then
    // the single least-squares unknown, fitted in the log domain so the tail
    // carries weight
    double mean = 0.0;
    for (const auto& [bin, count] : pmf.counts) {
        mean += static_cast<double>(bin) * static_cast<double>(count);
    }
    mean /= static_cast<double>(pmf.total);
    if (!(mean > 0)) throw TooFewBins("fit_truncated_normal: sample mean is zero");

    // singleton bins are excluded along with empty ones: a count of 1 pins
    // the log-frequency down to Poisson noise of order one, and the
    // unweighted tail-emphasizing objective would chase it
    std::vector<BinObs> obs;
    obs.reserve(pmf.counts.size());
    const double log_total = std::log(static_cast<double>(pmf.total));
    for (const auto& [bin, count] : pmf.counts) {
        if (count < 2) continue;
        obs.push_back({static_cast<double>(bin),
                       std::log(static_cast<double>(count)) - log_total});
    }
    if (obs.size() < 2) {
        throw TooFewBins("fit_truncated_normal: need at least 2 bins with count >= 2");
    }

    // Coarse log-spaced scan to bracket the minimum, then golden-section.
    // The objective is cheap, so the scan costs nothing and spares us any
    // unimodality assumption over six decades of scale.
    const int kScan = 240;
    const double log_lo = std::log(kSigmaLo);
    const double log_hi = std::log(kSigmaHi);
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> grid(kScan);
    for (int i = 0; i < kScan; ++i) {
        grid[i] = std::exp(log_lo + (log_hi - log_lo) * i / (kScan - 1));
        const double v = objective(mean, grid[i], obs);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    if (best == kScan - 1) {
        throw FitDiverged("fit_truncated_normal: scale search ran off its upper limit");
    }

    double a = (best == 0) ? log_lo : std::log(grid[best - 1]);
    double b = std::log(grid[best + 1]);
    constexpr double kGolden = 0.6180339887498949;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = objective(mean, std::exp(x1), obs);
    double f2 = objective(mean, std::exp(x2), obs);
    while (b - a > kRelTol) {  // interval is in log space, so this is relative
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = objective(mean, std::exp(x1), obs);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = objective(mean, std::exp(x2), obs);
        }
    }
    const double sigma = std::exp(0.5 * (a + b));
    if (sigma > kSigmaHi * (1.0 - 1e-9)) {
        throw FitDiverged("fit_truncated_normal: scale search ran off its upper limit");
    }
    TnFit fit{TruncatedNormalParams(location_for_mean(mean, sigma), sigma), false,
              objective(mean, sigma, obs)};
    fit.at_lower_bound = sigma < kSigmaLo * (1.0 + 1e-6);
    return fit;
}

}  // namespace kams
