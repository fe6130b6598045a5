#include "threshlab/sampling.hpp"

#include <algorithm>
#include <sstream>

#include "threshlab/error.hpp"
#include "threshlab/quadrature.hpp"

namespace threshlab {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t SeedPolicy::stream_seed() const {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(trial_index + 0x632be59bd9b4e019ULL));
}

LabeledSample draw(const DensityPair& p, std::size_t n, const SeedPolicy& seed) {
    LabeledSample out;
    out.seed = seed.stream_seed();
    out.model_name = p.name();
    out.points.reserve(n);
    std::mt19937_64 gen(out.seed);
    const double envelope = 1.01 * p.sup_sigma();
    const ScalarField1D& fp = p.fplus();
    const ScalarField1D& fm = p.fminus();
    while (out.points.size() < n) {
        const double x = unit_uniform(gen);
        const double v = unit_uniform(gen) * envelope;
        const double plus = fp.value(x);
        const double sigma = plus + fm.value(x);
        if (sigma > envelope) {
            std::ostringstream msg;
            msg << p.name() << ": f^Sigma(" << x << ") = " << sigma << " exceeds envelope " << envelope;
            throw Error(ErrorKind::EnvelopeViolated, msg.str());
        }
        // conditional on acceptance v is uniform on [0, sigma), so the label
        // comes from the same draw
        if (v < sigma) out.points.push_back({x, v < plus ? +1 : -1});
    }
    return out;
}

double cdf_sigma(const DensityPair& p, double x) {
    x = std::clamp(x, 0.0, 1.0);
    if (x == 0.0) return 0.0;
    const std::vector<double> bps = p.breakpoints();
    return integrate([&](double t) { return p.sigma(t); }, 0.0, x, bps, QuadratureSpec{32, 1e-13, 48}).value;
}

}  // namespace threshlab
