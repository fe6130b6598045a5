#include "threshlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "threshlab/error.hpp"

namespace threshlab {

namespace {

struct Panel {
    const std::function<double(double)>& f;
    int max_depth;
    QuadratureResult& acc;
    bool failed = false;
    double failed_at = 0.0;

    double eval(double x) {
        ++acc.evaluations;
        return f(x);
    }

    // [a,b] with fa, fm, fb already known; whole = Simpson over [a,b]
    void recurse(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double diff = left + right - whole;
        if (std::abs(diff) <= 15.0 * tol || depth >= max_depth) {
            if (std::abs(diff) > 15.0 * tol && !failed) {
                failed = true;
                failed_at = m;
            }
            acc.value += left + right + diff / 15.0;
            acc.error += std::abs(diff) / 15.0;
            return;
        }
        recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1);
        recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
};

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureSpec& spec) {
    QuadratureResult result;
    if (a == b) return result;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    const int panels = std::max(spec.panels, 1);
    std::vector<double> edges;
    edges.reserve(static_cast<std::size_t>(panels) + 1 + breakpoints.size());
    for (int i = 0; i <= panels; ++i) edges.push_back(a + (b - a) * i / panels);
    edges.back() = b;
    for (double p : breakpoints) {
        if (p > a && p < b) edges.push_back(p);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Panel panel{f, spec.max_depth, result};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i];
        const double hi = edges[i + 1];
        const double flo = panel.eval(lo);
        const double fhi = panel.eval(hi);
        const double fmid = panel.eval(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        panel.recurse(lo, hi, flo, fmid, fhi, whole, spec.tol * (hi - lo) / (b - a), 0);
    }
    if (panel.failed) {
        std::ostringstream msg;
        msg << "adaptive Simpson hit max_depth " << spec.max_depth << " near x = " << panel.failed_at;
        throw Error(ErrorKind::QuadratureNotConverged, msg.str());
    }
    result.value *= sign;
    return result;
}

}  // namespace threshlab
