#include "threshlab/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "threshlab/error.hpp"

namespace threshlab {

namespace {

constexpr double kTiny = 1e-30;
constexpr double kMassFloor = 1e-12;

std::vector<double> joint_breakpoints(const DensityPair& p, const DensityPair& q) {
    std::vector<double> out = p.breakpoints();
    const std::vector<double> more = q.breakpoints();
    out.insert(out.end(), more.begin(), more.end());
    out.push_back(p.threshold());
    out.push_back(q.threshold());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double entropy_term(double fp, double fq, double x) {
    if (fp <= kTiny) return 0.0;
    if (fq < kTiny) {
        if (fp > kMassFloor) {
            std::ostringstream msg;
            msg << "f_Q = " << fq << " while f_P = " << fp << " at x = " << x;
            throw Error(ErrorKind::InfiniteEntropy, msg.str());
        }
        fq = kTiny;
    }
    return fp * std::log(fp / fq);
}

}  // namespace

DivergenceResult relative_entropy(const DensityPair& p, const DensityPair& q, const QuadratureSpec& spec) {
    const std::vector<double> bps = joint_breakpoints(p, q);
    auto integrand = [&](double x) {
        return entropy_term(p.fplus().value(x), q.fplus().value(x), x) +
               entropy_term(p.fminus().value(x), q.fminus().value(x), x);
    };
    const QuadratureResult r = integrate(integrand, 0.0, 1.0, bps, spec);
    return {r.value, r.error};
}

DivergenceResult total_variation(const DensityPair& p, const DensityPair& q, const QuadratureSpec& spec) {
    const std::vector<double> bps = joint_breakpoints(p, q);
    auto integrand = [&](double x) {
        return 0.5 * (std::abs(p.fplus().value(x) - q.fplus().value(x)) +
                      std::abs(p.fminus().value(x) - q.fminus().value(x)));
    };
    const QuadratureResult r = integrate(integrand, 0.0, 1.0, bps, spec);
    return {r.value, r.error};
}

}  // namespace threshlab
