#include "threshlab/estimators.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <numeric>
#include <vector>

#include "threshlab/error.hpp"

namespace threshlab {

std::size_t empirical_errors(std::span<const LabeledPoint> points, double a) {
    std::size_t errors = 0;
    for (const auto& p : points) errors += (p.x >= a) != (p.y == 1);
    return errors;
}

ErmResult erm_threshold(std::span<const LabeledPoint> points) {
    if (points.empty()) return {0.0, 0, 1};
    std::vector<LabeledPoint> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& l, const auto& r) { return l.x < r.x; });

    // at a = 0 every point is called +1
    std::size_t errors = 0;
    for (const auto& p : sorted) errors += p.y != 1;
    ErmResult best{0.0, errors, 1};

    // moving a past a group of equal x flips that group to -1
    std::size_t i = 0;
    while (true) {
        const double x = sorted[i].x;
        for (; i < sorted.size() && sorted[i].x == x; ++i) {
            if (sorted[i].y == 1) ++errors;
            else --errors;
        }
        if (i == sorted.size()) break;
        ++best.candidate_count;
        if (errors < best.min_errors) {
            best.a_hat = 0.5 * (x + sorted[i].x);
            best.min_errors = errors;
        }
    }
    // a = 1 still calls points at x = 1 positive
    ++best.candidate_count;
    const std::size_t at_one = empirical_errors(sorted, 1.0);
    if (at_one < best.min_errors) {
        best.a_hat = 1.0;
        best.min_errors = at_one;
    }
    return best;
}

RefineResult refine_local(std::span<const LabeledPoint> points, double a0, double scale, std::size_t n) {
    if (n == 0) n = points.size();
    const double m = scale * std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), -1.0 / 3.0);
    RefineResult r;
    r.a_hat = a0;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, t0 = 0.0, t1 = 0.0;
    double first = 0.0;
    bool distinct = false;
    for (const auto& p : points) {
        const double u = p.x - a0;
        if (!(std::abs(u) <= m)) continue;
        if (r.window_count == 0) first = u;
        else if (u != first) distinct = true;
        ++r.window_count;
        s0 += 1.0;
        s1 += u;
        s2 += u * u;
        t0 += p.y;
        t1 += p.y * u;
    }
    // [s2 s1; s1 s0] [b1; b2] = [t1; t0]
    const double det = s2 * s0 - s1 * s1;
    const double scale_ref = s2 * s0 + s1 * s1;
    if (!distinct || !(std::abs(det) > 1e-30 * scale_ref)) {
        r.fell_back = true;
        return r;
    }
    r.b1 = (t1 * s0 - s1 * t0) / det;
    r.b2 = (s2 * t0 - s1 * t1) / det;
    if (r.b1 == 0.0) {
        r.fell_back = true;
        return r;
    }
    r.a_hat = a0 - r.b2 / r.b1;
    return r;
}

double two_step(std::span<const LabeledPoint> points, double scale) {
    if (points.size() < 2) throw Error(ErrorKind::SampleTooSmall, "two-step needs at least 2 points");
    const std::size_t m = points.size() / 2;
    double a0 = erm_threshold(points.first(m)).a_hat;
    const double nudge = 1.0 / (2.0 * static_cast<double>(m));
    if (a0 <= 0.0) a0 = nudge;
    if (a0 >= 1.0) a0 = 1.0 - nudge;
    return refine_local(points.subspan(m, m), a0, scale, m).a_hat;
}

double clock_estimator(std::uint64_t n) {
    if (n == 0) return 0.0;
    const int k = std::bit_width(n) - 1;
    const std::uint64_t p = std::uint64_t{1} << k;
    return std::ldexp(static_cast<double>(n - p), -k);
}

EstimatorSpec EstimatorSpec::parse(const std::string& text) {
    if (text == "erm") return {EstimatorKind::Erm, 1.0};
    if (text == "clock") return {EstimatorKind::Clock, 1.0};
    const std::string prefix = "twostep:L=";
    if (text.rfind(prefix, 0) == 0) {
        const std::string v = text.substr(prefix.size());
        double scale = 0.0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), scale);
        if (ec != std::errc() || ptr != v.data() + v.size() || !(scale > 0.0) || !std::isfinite(scale)) {
            throw Error(ErrorKind::Config, "bad window scale in estimator '" + text + "'");
        }
        return {EstimatorKind::TwoStep, scale};
    }
    throw Error(ErrorKind::Config, "unknown estimator '" + text + "' (expected erm, twostep:L=<v> or clock)");
}

std::string EstimatorSpec::id() const {
    switch (kind) {
        case EstimatorKind::Erm: return "erm";
        case EstimatorKind::Clock: return "clock";
        case EstimatorKind::TwoStep: {
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof buf, scale);
            return "twostep:L=" + std::string(buf, res.ptr);
        }
    }
    return "?";
}

double EstimatorSpec::apply(const LabeledSample& s) const {
    switch (kind) {
        case EstimatorKind::Erm: return erm_threshold(s).a_hat;
        case EstimatorKind::Clock: return clock_estimator(s.size());
        case EstimatorKind::TwoStep: return two_step(s, scale);
    }
    return 0.0;
}

}  // namespace threshlab
