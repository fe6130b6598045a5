#pragma once

#include <functional>
#include <span>

namespace threshlab {

struct QuadratureSpec {
    int panels = 32;      // initial subdivision of [a,b] before breakpoints are inserted
    double tol = 1e-12;   // absolute error target for the whole interval
    int max_depth = 48;   // bisection depth per panel
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;   // sum of per-panel Richardson estimates
    int evaluations = 0;
};

/// Adaptive Simpson with Richardson extrapolation. `breakpoints` inside (a,b)
/// become mandatory panel boundaries. Throws QuadratureNotConverged when a
/// panel reaches max_depth without meeting its share of the tolerance.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureSpec& spec = {});

inline QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureSpec& spec = {}) {
    return integrate(f, a, b, {}, spec);
}

}  // namespace threshlab
