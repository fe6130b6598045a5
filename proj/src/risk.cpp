#include "threshlab/risk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "threshlab/error.hpp"

namespace threshlab {

namespace {

std::vector<double> cuts(const DensityPair& p) {
    std::vector<double> out = p.breakpoints();
    out.push_back(p.threshold());
    return out;
}

}  // namespace

double prediction_error(const DensityPair& p, double alpha, const QuadratureSpec& spec) {
    alpha = std::clamp(alpha, 0.0, 1.0);
    const std::vector<double> bps = cuts(p);
    const ScalarField1D& fp = p.fplus();
    const ScalarField1D& fm = p.fminus();
    double total = 0.0;
    if (alpha > 0.0) total += integrate([&](double x) { return fp.value(x); }, 0.0, alpha, bps, spec).value;
    if (alpha < 1.0) total += integrate([&](double x) { return fm.value(x); }, alpha, 1.0, bps, spec).value;
    return total;
}

double excess_risk(const DensityPair& p, double alpha, const QuadratureSpec& spec) {
    alpha = std::clamp(alpha, 0.0, 1.0);
    const double a = p.threshold();
    if (alpha == a) return 0.0;
    const std::vector<double> bps = cuts(p);
    return integrate([&](double x) { return p.margin(x); }, a, alpha, bps, spec).value;
}

double QuadraticBounds::lower(double a, double alpha) const {
    const double d = a - alpha;
    return std::min(c9, c3 * d * d);
}

double QuadraticBounds::upper(double a, double alpha) const {
    const double d = a - alpha;
    return c10 * d * d;
}

QuadraticBounds quadratic_bounds(const DensityPair& p, double eps_nbhd) {
    const double a = p.threshold();
    if (!(eps_nbhd > 0.0 && a - eps_nbhd > 0.0 && a + eps_nbhd < 1.0)) {
        std::ostringstream msg;
        msg << "[" << a - eps_nbhd << ", " << a + eps_nbhd << "] is not inside (0,1)";
        throw Error(ErrorKind::IntervalEscapes, msg.str());
    }
    double inf_local = INFINITY;
    double sup_global = 0.0;
    for (double t : unit_grid(kCertGridPoints)) {
        inf_local = std::min(inf_local, p.margin_slope(a - eps_nbhd + 2.0 * eps_nbhd * t));
        sup_global = std::max(sup_global, std::abs(p.margin_slope(t)));
    }
    if (!(inf_local > 0.0)) {
        std::ostringstream msg;
        msg << p.name() << ": m' reaches " << inf_local << " within " << eps_nbhd << " of a(P)";
        throw Error(ErrorKind::NotMonotoneLocal, msg.str());
    }
    QuadraticBounds b;
    b.c3 = 0.5 * inf_local;
    b.c10 = 0.5 * sup_global;
    b.c9 = b.c3 * eps_nbhd * eps_nbhd;
    b.eps_nbhd = eps_nbhd;
    return b;
}

QuadraticBounds quadratic_bounds(const DensityPair& p) {
    const double a = p.threshold();
    return quadratic_bounds(p, 0.5 * std::min(a, 1.0 - a));
}

}  // namespace threshlab
