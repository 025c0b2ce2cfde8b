#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace kams {

// SplitMix64 avalanche step, used for seed derivation only.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent substream seed from a master seed and up to two indices.
// Sources, grid points and replications each get their own stream so that
// changing one dimension of an experiment does not perturb the others.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(master ^ splitmix64(a + 0x632be59bd9b4e019ULL)) ^
                      splitmix64(b + 0x9e6c63d0876a9a47ULL));
}

// Deterministic random stream. Uniform doubles are produced from the raw
// 64-bit output directly so replay is bit-identical across standard library
// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1]
    double uniform_pos() { return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double mean) { return -mean * std::log(uniform_pos()); }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace kams
