#pragma once

#include "threshlab/model.hpp"
#include "threshlab/quadrature.hpp"

namespace threshlab {

/// L_P(alpha) = P(h_alpha(X) != Y) = int_0^alpha f+ + int_alpha^1 f-.
/// alpha outside [0,1] is clamped; h_alpha is constant there.
double prediction_error(const DensityPair& p, double alpha, const QuadratureSpec& spec = {});

/// L_P(alpha) - L_P(a(P)) computed directly as int_{a(P)}^alpha m_P.
double excess_risk(const DensityPair& p, double alpha, const QuadratureSpec& spec = {});

struct QuadraticBounds {
    double c3 = 0.0;   // 1/2 inf m' on [a - eps, a + eps]
    double c10 = 0.0;  // 1/2 sup |m'| on [0,1]
    double c9 = 0.0;   // c3 eps^2
    double eps_nbhd = 0.0;

    /// min{c9, c3 (a - alpha)^2}
    double lower(double a, double alpha) const;
    /// c10 (a - alpha)^2
    double upper(double a, double alpha) const;
};

/// Grid estimates over kCertGridPoints nodes. Throws IntervalEscapes unless
/// [a - eps, a + eps] lies inside (0,1), NotMonotoneLocal if m' reaches 0 there.
QuadraticBounds quadratic_bounds(const DensityPair& p, double eps_nbhd);

/// eps_nbhd = half the distance from a(P) to the nearer endpoint.
QuadraticBounds quadratic_bounds(const DensityPair& p);

}  // namespace threshlab
