#include "threshlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "threshlab/error.hpp"
#include "threshlab/quadrature.hpp"

namespace threshlab {

namespace {

constexpr double kNonnegTol = 1e-12;
constexpr double kNormTol = 1e-8;
constexpr double kBisectionWidth = 1e-14;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

double total_mass(const ScalarField1D& fplus, const ScalarField1D& fminus) {
    std::vector<double> bps = fplus.breakpoints();
    const std::vector<double> more = fminus.breakpoints();
    bps.insert(bps.end(), more.begin(), more.end());
    auto sigma = [&](double x) { return fplus.value(x) + fminus.value(x); };
    return integrate(sigma, 0.0, 1.0, bps, QuadratureSpec{32, 1e-13, 48}).value;
}

}  // namespace

CertifiedRange certified_range(const ScalarField1D& f, double lo, double hi, std::size_t cells) {
    CertifiedRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    const double h = (hi - lo) / static_cast<double>(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const double a = lo + h * static_cast<double>(i);
        const double b = i + 1 == cells ? hi : lo + h * static_cast<double>(i + 1);
        const IntervalJet enc = f.enclose({a, b});
        const double mid = 0.5 * (a + b);
        const double fmid = f.value(mid);
        const double lip = std::max(std::abs(enc.slope.lo), std::abs(enc.slope.hi));
        const double half = 0.5 * (b - a);
        const double cell_lo = std::max(enc.value.lo, fmid - lip * half);
        const double cell_hi = std::min(enc.value.hi, fmid + lip * half);
        r.lower = std::min(r.lower, cell_lo);
        r.upper = std::max(r.upper, cell_hi);
    }
    return r;
}

double find_threshold(const ScalarField1D& fplus, const ScalarField1D& fminus) {
    const ScalarField1D m = fplus - fminus;
    const std::vector<double> grid = unit_grid(kBracketGridPoints);

    struct Bracket {
        double lo;
        double hi;
        bool rising;
    };
    std::vector<Bracket> brackets;
    double prev_x = 0.0;
    int prev_sign = 0;
    for (double x : grid) {
        const double v = m.value(x);
        const int s = (v > 0.0) - (v < 0.0);
        if (s == 0) continue;
        if (prev_sign != 0 && s != prev_sign) brackets.push_back({prev_x, x, s > 0});
        prev_sign = s;
        prev_x = x;
    }
    if (brackets.empty()) throw Error(ErrorKind::NoCrossing, "f+ - f- has no sign change on [0,1]");
    if (brackets.size() > 1) {
        throw Error(ErrorKind::MultipleCrossings,
                    std::to_string(brackets.size()) + " sign changes of f+ - f- on the bracketing grid");
    }
    const Bracket b = brackets.front();
    if (!b.rising) {
        throw Error(ErrorKind::NotTransversal, "f+ - f- crosses from + to - near x = " + fmt(b.lo));
    }

    double lo = b.lo;  // m(lo) < 0
    double hi = b.hi;  // m(hi) > 0
    double root = 0.5 * (lo + hi);
    while (hi - lo > kBisectionWidth) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double v = m.value(mid);
        if (v == 0.0) {
            lo = hi = mid;
            break;
        }
        (v < 0.0 ? lo : hi) = mid;
    }
    root = std::abs(m.value(lo)) <= std::abs(m.value(hi)) ? lo : hi;
    if (!(root > 0.0 && root < 1.0)) {
        throw Error(ErrorKind::NoCrossing, "crossing at the boundary of [0,1]: x = " + fmt(root));
    }
    const double slope = m.derivative(root);
    if (!(slope > 0.0)) {
        throw Error(ErrorKind::NotTransversal, "m'(a) = " + fmt(slope) + " at a = " + fmt(root));
    }
    return root;
}

DensityPair::DensityPair(std::string name, ScalarField1D fplus, ScalarField1D fminus)
    : name_(std::move(name)), fplus_(std::move(fplus)), fminus_(std::move(fminus)) {
    const CertifiedRange rp = certified_range(fplus_);
    const CertifiedRange rm = certified_range(fminus_);
    if (rp.lower < -kNonnegTol || rm.lower < -kNonnegTol) {
        throw Error(ErrorKind::NegativeDensity,
                    name_ + ": certified lower bounds f+ >= " + fmt(rp.lower) + ", f- >= " + fmt(rm.lower));
    }
    const double mass = total_mass(fplus_, fminus_);
    if (std::abs(mass - 1.0) > kNormTol) {
        throw Error(ErrorKind::NotNormalized, name_ + ": total mass " + fmt(mass));
    }
    threshold_ = find_threshold(fplus_, fminus_);
    sup_density_ = std::max(rp.upper, rm.upper);
    sup_sigma_ = certified_range(fplus_ + fminus_).upper;
}

std::vector<double> DensityPair::breakpoints() const {
    std::vector<double> out = fplus_.breakpoints();
    const std::vector<double> more = fminus_.breakpoints();
    out.insert(out.end(), more.begin(), more.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<CheckLine> validate(const ScalarField1D& fplus, const ScalarField1D& fminus) {
    std::vector<CheckLine> lines;
    const CertifiedRange rp = certified_range(fplus);
    const CertifiedRange rm = certified_range(fminus);
    lines.push_back({"nonnegative f+", rp.lower >= -kNonnegTol, "certified inf " + fmt(rp.lower)});
    lines.push_back({"nonnegative f-", rm.lower >= -kNonnegTol, "certified inf " + fmt(rm.lower)});
    try {
        const double mass = total_mass(fplus, fminus);
        lines.push_back({"normalized", std::abs(mass - 1.0) <= kNormTol, "mass " + fmt(mass)});
    } catch (const Error& e) {
        lines.push_back({"normalized", false, e.what()});
    }
    try {
        const double a = find_threshold(fplus, fminus);
        const ScalarField1D m = fplus - fminus;
        lines.push_back({"single transversal crossing", true,
                         "a = " + fmt(a) + ", m'(a) = " + fmt(m.derivative(a))});
    } catch (const Error& e) {
        lines.push_back({"single transversal crossing", false, e.what()});
    }
    const double dp = max_derivative_mismatch(fplus);
    const double dm = max_derivative_mismatch(fminus);
    lines.push_back({"derivative consistent", std::max(dp, dm) <= 1e-6,
                     "max relative mismatch " + fmt(std::max(dp, dm))});
    return lines;
}

double metric_d(const DensityPair& p, const DensityPair& q) {
    double value_sup = 0.0;
    double slope_sup = 0.0;
    for (double x : unit_grid(kCertGridPoints)) {
        for (int label : {+1, -1}) {
            const Jet jp = p.field(label).jet(x);
            const Jet jq = q.field(label).jet(x);
            value_sup = std::max(value_sup, std::abs(jp.value - jq.value));
            slope_sup = std::max(slope_sup, std::abs(jp.slope - jq.slope));
        }
    }
    return value_sup + slope_sup;
}

std::pair<double, double> posterior_rho(const DensityPair& p, double x) {
    const double fp = p.fplus().value(x);
    const double sigma = fp + p.fminus().value(x);
    if (!(sigma > 1e-30)) throw Error(ErrorKind::ZeroMass, "f+ + f- = " + fmt(sigma) + " at x = " + fmt(x));
    const double plus = fp / sigma;
    return {plus, 1.0 - plus};
}

LocalParams local_params(const DensityPair& p) {
    const double a = p.threshold();
    return {p.sigma(a), p.margin_slope(a)};
}

DensityPair power_model(std::string name, unsigned k_plus, unsigned k_minus) {
    if (k_plus == 0 || k_minus == 0) throw Error(ErrorKind::InvalidModel, "power exponents must be >= 1");
    const double c = 1.0 / (1.0 / (k_plus + 1.0) + 1.0 / (k_minus + 1.0));
    ScalarField1D fminus = ScalarField1D::affine(-c, c);
    for (unsigned i = 1; i < k_minus; ++i) fminus = fminus * ScalarField1D::affine(-1.0, 1.0);
    return DensityPair(std::move(name), ScalarField1D::monomial(c, k_plus), std::move(fminus));
}

std::vector<DensityPair> builtin_models() {
    std::vector<DensityPair> out;
    out.emplace_back("canonical", ScalarField1D::affine(1.0, 0.0), ScalarField1D::affine(-1.0, 1.0));
    out.emplace_back("tilted", ScalarField1D::monomial(1.2, 2), ScalarField1D::affine(-1.2, 1.2));
    out.emplace_back("skewed", ScalarField1D::monomial(0.75, 1) + ScalarField1D::monomial(0.75, 2),
                     ScalarField1D::affine(-0.75, 0.75));
    return out;
}

DensityPair model_by_name(const std::string& name) {
    for (DensityPair& m : builtin_models()) {
        if (m.name() == name) return m;
    }
    if (name.rfind("power:", 0) == 0) {
        unsigned kp = 0, km = 0;
        char comma = 0;
        std::istringstream is(name.substr(6));
        if (is >> kp >> comma >> km && comma == ',') return power_model(name, kp, km);
    }
    throw Error(ErrorKind::Config, "unknown model '" + name + "'");
}

DensityPair model_from_config(const std::map<std::string, std::string>& config) {
    auto get = [&](const std::string& key) -> const std::string* {
        const auto it = config.find(key);
        return it == config.end() ? nullptr : &it->second;
    };
    const std::string* family = get("model.family");
    const std::string* name = get("model.name");
    if (!family) {
        if (!name) throw Error(ErrorKind::Config, "config needs model.family or model.name");
        return model_by_name(*name);
    }
    if (*family == "power") {
        const std::string* kp = get("model.k_plus");
        const std::string* km = get("model.k_minus");
        if (!kp || !km) throw Error(ErrorKind::Config, "family power needs model.k_plus and model.k_minus");
        try {
            return power_model(name ? *name : "power", static_cast<unsigned>(std::stoul(*kp)),
                               static_cast<unsigned>(std::stoul(*km)));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::Config, "model.k_plus / model.k_minus must be positive integers");
        }
    }
    DensityPair base = model_by_name(*family);
    if (!name) return base;
    return DensityPair(*name, base.fplus(), base.fminus());
}

}  // namespace threshlab
