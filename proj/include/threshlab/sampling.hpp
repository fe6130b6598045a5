#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "threshlab/model.hpp"

namespace threshlab {

struct LabeledPoint {
    double x = 0.0;
    int y = 0;  // +1 or -1
};

struct LabeledSample {
    std::vector<LabeledPoint> points;
    std::uint64_t seed = 0;
    std::string model_name;

    std::size_t size() const { return points.size(); }
};

/// Per-trial stream seed is a pure function of (master_seed, trial_index).
struct SeedPolicy {
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;

    std::uint64_t stream_seed() const;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Uniform on [0,1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// n i.i.d. draws: X by rejection against 1.01 * sup f^Sigma, Y = +1 with
/// probability rho+(X). Throws EnvelopeViolated if f^Sigma exceeds the envelope.
LabeledSample draw(const DensityPair& p, std::size_t n, const SeedPolicy& seed);

/// int_0^x f^Sigma
double cdf_sigma(const DensityPair& p, double x);

}  // namespace threshlab
