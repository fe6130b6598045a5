#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "threshlab/sampling.hpp"

namespace threshlab {

struct ErmResult {
    double a_hat = 0.0;
    std::size_t min_errors = 0;
    std::size_t candidate_count = 1;
};

/// Empirical risk minimizer over thresholds h_a(x) = +1 iff x >= a.
/// Candidates are 0, 1 and midpoints of consecutive distinct sorted x;
/// ties go to the smallest candidate. Empty sample gives a_hat = 0.
ErmResult erm_threshold(std::span<const LabeledPoint> points);
inline ErmResult erm_threshold(const LabeledSample& s) { return erm_threshold(s.points); }

/// Number of points misclassified by h_a.
std::size_t empirical_errors(std::span<const LabeledPoint> points, double a);

struct RefineResult {
    double a_hat = 0.0;
    std::size_t window_count = 0;
    bool fell_back = false;
    double b1 = 0.0;
    double b2 = 0.0;
};

/// Least-squares line y = b1 (x - a0) + b2 over the window |x - a0| <= scale * `n`^(-1/3),
/// returning a0 - b2/b1. Falls back to a0 when fewer than two distinct
/// abscissae are present or b1 = 0. `n` defaults to the number of points.
RefineResult refine_local(std::span<const LabeledPoint> points, double a0, double scale, std::size_t n = 0);
inline RefineResult refine_local(const LabeledSample& s, double a0, double scale) {
    return refine_local(s.points, a0, scale);
}

/// ERM on the first half, nudged into (0,1), refined on the second half.
/// Throws SampleTooSmall for fewer than two points.
double two_step(std::span<const LabeledPoint> points, double scale);
inline double two_step(const LabeledSample& s, double scale) { return two_step(s.points, scale); }

/// (n - 2^k) 2^-k with k = floor(log2 n); ignores the data.
double clock_estimator(std::uint64_t n);

enum class EstimatorKind { Erm, TwoStep, Clock };

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::Erm;
    double scale = 1.0;  // L, two-step only

    /// "erm", "twostep:L=<v>" or "clock"
    static EstimatorSpec parse(const std::string& text);
    std::string id() const;
    double apply(const LabeledSample& s) const;
};

}  // namespace threshlab
