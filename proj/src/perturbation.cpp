#include "threshlab/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "threshlab/error.hpp"

namespace threshlab {

namespace {

constexpr double kMaxDelta = 1.0 / 11.0;
constexpr std::size_t kShiftGrid = 10'000;
constexpr double kNbhdStep = 1e-4;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

double log_factor(double delta) { return std::abs(std::log(11.0 * delta)); }

// Half-width of the largest interval around a(P) inside (0,1) on which
// rho_P^+ stays in [1/3, 2/3].
double balanced_half_width(const DensityPair& p) {
    const double a = p.threshold();
    auto balanced = [&](double x) {
        const double rho = p.fplus().value(x) / p.sigma(x);
        return rho >= 1.0 / 3.0 && rho <= 2.0 / 3.0;
    };
    auto reach = [&](double dir) {
        double w = 0.0;
        while (true) {
            const double next = w + kNbhdStep;
            const double x = a + dir * next;
            if (x <= 0.0 || x >= 1.0 || !balanced(x)) break;
            w = next;
        }
        return w;
    };
    return std::min(reach(-1.0), reach(+1.0));
}

}  // namespace

ScalarField1D BumpProfile::scaled(double center, double eps) const {
    return ScalarField1D::bump({center, eps, eps, support_radius});
}

BumpProfile make_bump(double support_radius) {
    BumpProfile b;
    b.support_radius = support_radius;
    b.value = ScalarField1D::bump({0.0, 1.0, 1.0, support_radius});
    const ScalarField1D& phi = b.value;
    const double edges[] = {0.0};
    b.l2sq = integrate([&](double u) { const double v = phi.value(u); return v * v; }, -support_radius,
                       support_radius, edges, QuadratureSpec{16, 1e-14, 40})
                 .value;
    b.dsup = std::numbers::pi / (2.0 * support_radius);
    return b;
}

double entropy_budget(double delta) { return 0.5 * log_factor(delta); }

PerturbationPlan make_plan(const DensityPair& p, const BumpProfile& phi, double delta, std::uint64_t n) {
    if (!(delta > 0.0 && delta < kMaxDelta)) {
        throw Error(ErrorKind::DeltaOutOfRange, "delta = " + fmt(delta) + " is outside (0, 1/11)");
    }
    if (n == 0) throw std::invalid_argument("make_plan: sample size must be >= 1");
    const double c4 = std::cbrt(1.0 / (p.sup_density() * phi.l2sq));
    const double eps = c4 * std::cbrt(log_factor(delta)) / std::cbrt(static_cast<double>(n));

    // 1 - Xi rho+ must stay positive on the bump support
    const double a = p.threshold();
    const double r = phi.support_radius * eps;
    double worst = 0.0;
    for (double t : unit_grid(1001)) {
        const double x = std::clamp(a - r + 2.0 * r * t, 0.0, 1.0);
        const double u = (x - a) / eps;
        const double rho = p.fplus().value(x) / p.sigma(x);
        worst = std::max(worst, eps * phi.value.value(u) * rho);
    }
    if (!(worst < 1.0)) {
        throw Error(ErrorKind::EpsTooLarge, "eps = " + fmt(eps) + " makes 1 - Xi rho+ reach " + fmt(1.0 - worst));
    }
    return PerturbationPlan{p, phi, delta, n, eps, c4};
}

double designed_entropy_bound(const PerturbationPlan& plan) {
    return 0.5 * plan.base.sup_density() * plan.phi.l2sq * static_cast<double>(plan.n) * plan.eps * plan.eps *
           plan.eps;
}

DensityPair perturb(const DensityPair& p, const BumpProfile& phi, double eps) {
    if (!(eps > 0.0)) throw Error(ErrorKind::EpsTooLarge, "eps must be positive");
    const double a = p.threshold();
    const double r = phi.support_radius * eps;
    if (!(a - r > 0.0 && a + r < 1.0)) {
        throw Error(ErrorKind::SupportEscapes,
                    "bump support [" + fmt(a - r) + ", " + fmt(a + r) + "] is not inside (0,1)");
    }
    const ScalarField1D sigma = p.fplus() + p.fminus();
    if (!(certified_range(sigma).lower > 0.0)) {
        throw Error(ErrorKind::ZeroMass, p.name() + ": f+ + f- is not bounded away from zero");
    }
    const ScalarField1D xi = phi.scaled(a, eps);
    const ScalarField1D one = ScalarField1D::constant(1.0);
    ScalarField1D qplus = (one + xi * (p.fminus() / sigma)) * p.fplus();
    ScalarField1D qminus = (one - xi * (p.fplus() / sigma)) * p.fminus();
    return DensityPair(p.name() + "+bump(" + fmt(eps) + ")", std::move(qplus), std::move(qminus));
}

ShiftConstants estimate_shift_constants(const DensityPair& p, const BumpProfile& phi) {
    ShiftConstants out;
    out.c4 = std::cbrt(1.0 / (p.sup_density() * phi.l2sq));
    const double half = balanced_half_width(p);
    if (!(half > 0.0)) throw Error(ErrorKind::InvalidModel, p.name() + ": rho+ leaves [1/3, 2/3] at a(P)");
    out.eps_max = half / phi.support_radius;
    out.nbhd_lo = p.threshold() - half;
    out.nbhd_hi = p.threshold() + half;

    const DensityPair q = perturb(p, phi, out.eps_max);
    const ScalarField1D rho_q = q.fplus() / (q.fplus() + q.fminus());
    double sup = 0.0;
    for (double t : unit_grid(kShiftGrid)) {
        const double x = out.nbhd_lo + (out.nbhd_hi - out.nbhd_lo) * t;
        sup = std::max(sup, std::abs(rho_q.derivative(x)));
    }
    out.c5 = sup;
    out.c1 = out.c4 / (32.0 * out.c5);
    return out;
}

double beta_n(std::uint64_t n, double c1, double delta) {
    return std::cbrt(static_cast<double>(n)) / (c1 * std::cbrt(log_factor(delta)));
}

TwoPointCertificate build_certificate(const DensityPair& p, const BumpProfile& phi, double delta, std::uint64_t n) {
    return build_certificate(p, phi, delta, n, estimate_c1(p, phi));
}

TwoPointCertificate build_certificate(const DensityPair& p, const BumpProfile& phi, double delta, std::uint64_t n,
                                      double c1) {
    PerturbationPlan plan = make_plan(p, phi, delta, n);
    DensityPair q = perturb(p, phi, plan.eps);
    // n * error stays below 1e-9
    const QuadratureSpec spec{32, std::min(1e-13, 1e-9 / static_cast<double>(n)), 48};
    const DivergenceResult h = relative_entropy(p, q, spec);
    const double budget = entropy_budget(delta);
    const double beta = beta_n(n, c1, delta);
    const double sep = beta * std::abs(p.threshold() - q.threshold());
    const bool entropy_ok = static_cast<double>(n) * h.value <= budget;
    return TwoPointCertificate{std::move(plan), std::move(q), h.value, h.error, budget, c1, beta, sep,
                               entropy_ok, sep > 4.0};
}

}  // namespace threshlab
