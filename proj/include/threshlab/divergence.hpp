#pragma once

#include "threshlab/model.hpp"
#include "threshlab/quadrature.hpp"

namespace threshlab {

struct DivergenceResult {
    double value = 0.0;
    double error = 0.0;  // quadrature error estimate
};

/// H(P,Q) = sum_y int f_P^y log(f_P^y / f_Q^y) dx, with 0 log 0 := 0.
/// Thresholds and bump support edges of both models are panel boundaries.
/// Throws InfiniteEntropy where f_Q^y < 1e-30 but f_P^y > 1e-12.
DivergenceResult relative_entropy(const DensityPair& p, const DensityPair& q, const QuadratureSpec& spec = {});

/// 1/2 sum_y int |f_P^y - f_Q^y| dx.
DivergenceResult total_variation(const DensityPair& p, const DensityPair& q, const QuadratureSpec& spec = {});

}  // namespace threshlab
