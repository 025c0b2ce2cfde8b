#pragma once

#include <complex>
#include <vector>

namespace kams {

// N independent exponential on-off sources feeding a constant-rate server
// with an infinite buffer. Serves as an exact oracle for the fluid engine in
// the one setting where the stationary distribution is classical.
struct ExpOnOffSystem {
    int n_sources = 0;
    double peak_rate = 0;     // packets/s while on
    double service_rate = 0;  // packets/s
    double mean_on = 0;       // seconds
    double mean_off = 0;      // seconds

    void validate() const;  // throws ValidationError / UnstableSystem
};

// Precomputed spectral solution; evaluating the curve at many levels is then
// cheap. Throws UnstableSystem and NumericalDegeneracy.
class AmsSolution {
public:
    explicit AmsSolution(const ExpOnOffSystem& sys);

    // P(stationary queue > x), monotone nonincreasing in x
    double overflow_probability(double x) const;

    // slowest decay rate of the tail (largest negative eigenvalue)
    double dominant_decay_rate() const;

private:
    std::vector<std::complex<double>> rates_;
    std::vector<std::complex<double>> weights_;
};

double ams_overflow_probability(const ExpOnOffSystem& sys, double x);

}  // namespace kams
