#include "kams/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kams/errors.hpp"

namespace kams {

EmpiricalCdf build_cdf(const QueueTrace& trace, int buffer_size, double warmup_fraction) {
    if (buffer_size < 0) throw InvalidParams("build_cdf: buffer_size must be >= 0");
    const double cutoff = warmup_fraction * trace.duration;
    std::vector<std::uint64_t> hist(static_cast<std::size_t>(buffer_size) + 1, 0);
    std::uint64_t total = 0;
    for (const auto& s : trace.samples) {
        if (s.t < cutoff) continue;
        auto bin = static_cast<std::int64_t>(std::floor(s.q));
        bin = std::clamp<std::int64_t>(bin, 0, buffer_size);
        ++hist[static_cast<std::size_t>(bin)];
        ++total;
    }
    if (total == 0) throw EmptyAfterWarmup("build_cdf: no samples past the warm-up cutoff");

    EmpiricalCdf cdf;
    cdf.buffer_size = buffer_size;
    cdf.values.resize(hist.size());
    std::uint64_t cum = 0;
    for (std::size_t b = 0; b < hist.size(); ++b) {
        cum += hist[b];
        cdf.values[b] = static_cast<double>(cum) / static_cast<double>(total);
    }
    return cdf;
}

double nrmse(const EmpiricalCdf& model, const EmpiricalCdf& ref, int min_qlen) {
    if (model.values.size() != ref.values.size() || model.buffer_size != ref.buffer_size) {
        throw BinMismatch("nrmse: distributions cover different buffer sizes");
    }
    const int first = min_qlen + 1;
    if (first >= static_cast<int>(ref.values.size())) {
        throw BinMismatch("nrmse: no bins above the cutoff");
    }
    double sq = 0.0;
    double ref_sum = 0.0;
    int count = 0;
    for (int b = first; b < static_cast<int>(ref.values.size()); ++b) {
        const double d = model.values[static_cast<std::size_t>(b)] -
                         ref.values[static_cast<std::size_t>(b)];
        sq += d * d;
        ref_sum += ref.values[static_cast<std::size_t>(b)];
        ++count;
    }
    const double rmse = std::sqrt(sq / count);
    const double norm = ref_sum / count;
    if (norm == 0.0) return rmse == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return rmse / norm;
}

double full_buffer_probability(const QueueTrace& trace, double buffer_size,
                               double warmup_fraction) {
    const double cutoff = warmup_fraction * trace.duration;
    const double window = trace.duration - cutoff;
    if (!(window > 0)) throw EmptyAfterWarmup("full_buffer_probability: empty window");

    if (trace.source == QueueTrace::Source::Fluid) {
        double full_time = 0.0;
        for (const auto& iv : trace.overflow_intervals) {
            full_time += std::max(0.0, std::min(iv.end, trace.duration) -
                                           std::max(iv.start, cutoff));
        }
        return std::min(1.0, full_time / window);
    }

    std::uint64_t total = 0, full = 0;
    for (const auto& s : trace.samples) {
        if (s.t < cutoff) continue;
        ++total;
        if (s.q >= buffer_size - 0.5) ++full;
    }
    if (total == 0) throw EmptyAfterWarmup("full_buffer_probability: no samples in window");
    return static_cast<double>(full) / static_cast<double>(total);
}

double spikiness(const LossSeries& series, bool complex_magnitude) {
    const std::size_t m = series.bins.size();
    if (m < 2) throw InvalidParams("spikiness: series must have at least 2 bins");

    // no FFT: the exact textbook DFT with a shared cosine table keeps the
    // definition literal for any series length
    std::vector<double> cos_tab(m), sin_tab(m);
    for (std::size_t r = 0; r < m; ++r) {
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(m);
        cos_tab[r] = std::cos(ang);
        sin_tab[r] = std::sin(ang);
    }
    double series_scale = 0.0;
    for (const auto b : series.bins) series_scale += static_cast<double>(b);

    double max_mag = 0.0;
    double sum_mag = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
        double re = 0.0, im = 0.0;
        std::size_t idx = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double x = static_cast<double>(series.bins[j]);
            re += x * cos_tab[idx];
            if (complex_magnitude) im -= x * sin_tab[idx];
            idx += i;
            if (idx >= m) idx -= m;
        }
        const double mag = complex_magnitude ? std::hypot(re, im) : std::fabs(re);
        max_mag = std::max(max_mag, mag);
        sum_mag += mag;
    }

    // a constant series has no AC component; the ratio is 0/0 there
    const double tol = 1e-9 * std::max(1.0, series_scale);
    if (max_mag <= tol) {
        throw DegenerateSpectrum("spikiness: loss series has no nonzero-frequency component");
    }
    return max_mag / (sum_mag / static_cast<double>(m));
}

double loss_overflow_ratio(double loss_rate, double full_buffer_prob) {
    if (!(full_buffer_prob > 0)) {
        throw ZeroOverflow("loss_overflow_ratio: full-buffer probability is zero");
    }
    return loss_rate / full_buffer_prob;
}

double correction_factor(std::span<const RatioPoint> points, double rtt_threshold) {
    double sum = 0.0;
    int count = 0;
    for (const auto& p : points) {
        if (p.rtt < rtt_threshold || !(p.p_ref > 0)) continue;
        sum += p.p_model / p.p_ref;
        ++count;
    }
    if (count == 0) {
        throw NoQualifyingPoints("correction_factor: no point with rtt above threshold and "
                                 "nonzero reference probability");
    }
    return sum / count;
}

double corrected_multiplicative_error(double p_model, double p_ref, double factor) {
    if (!(p_ref > 0)) throw ZeroReference("corrected_multiplicative_error: reference is zero");
    if (!(factor > 0)) throw InvalidParams("corrected_multiplicative_error: factor must be > 0");
    return std::fabs(p_model / factor / p_ref - 1.0);
}

}  // namespace kams
