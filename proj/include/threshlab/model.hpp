#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "threshlab/expr.hpp"

namespace threshlab {

/// Grid sizes used by the certified checks below.
inline constexpr std::size_t kCertGridPoints = 10'000;
inline constexpr std::size_t kBracketGridPoints = 2048;

/// Lower and upper bounds of a field over [0,1] obtained from the 10^4-cell
/// grid, each cell enclosed by interval arithmetic (natural extension and the
/// mean-value form, whichever is tighter).
struct CertifiedRange {
    double lower = 0.0;
    double upper = 0.0;
};

CertifiedRange certified_range(const ScalarField1D& f, double lo = 0.0, double hi = 1.0,
                               std::size_t cells = kCertGridPoints);

/// Root of m = f+ - f- with a sign change from - to +. Throws NoCrossing,
/// MultipleCrossings or NotTransversal.
double find_threshold(const ScalarField1D& fplus, const ScalarField1D& fminus);

struct LocalParams {
    double s = 0.0;  // f+ + f- at the threshold
    double t = 0.0;  // (f+ - f-)' at the threshold
};

/// One pass/fail line of a validation report.
struct CheckLine {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// A joint density (f+, f-) on [0,1] x {+1,-1} whose difference crosses zero
/// exactly once, transversally, from below. Construction validates the
/// invariants and solves the threshold; the object is immutable afterwards.
class DensityPair {
public:
    DensityPair(std::string name, ScalarField1D fplus, ScalarField1D fminus);

    const std::string& name() const { return name_; }
    const ScalarField1D& fplus() const { return fplus_; }
    const ScalarField1D& fminus() const { return fminus_; }
    const ScalarField1D& field(int label) const { return label > 0 ? fplus_ : fminus_; }

    double threshold() const { return threshold_; }
    /// Certified sup over [0,1] and both labels of f.
    double sup_density() const { return sup_density_; }
    /// Certified sup over [0,1] of f+ + f-.
    double sup_sigma() const { return sup_sigma_; }

    double sigma(double x) const { return fplus_.value(x) + fminus_.value(x); }
    double margin(double x) const { return fplus_.value(x) - fminus_.value(x); }
    double margin_slope(double x) const { return fplus_.derivative(x) - fminus_.derivative(x); }

    /// Bump support edges of both fields, useful as quadrature breakpoints.
    std::vector<double> breakpoints() const;

private:
    std::string name_;
    ScalarField1D fplus_;
    ScalarField1D fminus_;
    double threshold_ = 0.0;
    double sup_density_ = 0.0;
    double sup_sigma_ = 0.0;
};

/// Runs every membership check without throwing.
std::vector<CheckLine> validate(const ScalarField1D& fplus, const ScalarField1D& fminus);

/// Grid lower bound of d(P,Q) = sup|f_P - f_Q| + sup|f_P' - f_Q'| over both
/// labels on the 10^4-point grid.
double metric_d(const DensityPair& p, const DensityPair& q);

/// (rho+, rho-) = (f+, f-) / (f+ + f-). Throws ZeroMass when f+ + f- <= 1e-30.
std::pair<double, double> posterior_rho(const DensityPair& p, double x);

LocalParams local_params(const DensityPair& p);

/// canonical: f+ = x, f- = 1-x
/// tilted:    f+ = 1.2 x^2, f- = 1.2 (1-x)
/// skewed:    f+ = 0.75 x (1+x), f- = 0.75 (1-x); f+ + f- = 0.75 (1 + x^2)
std::vector<DensityPair> builtin_models();

/// Looks a model up by name; also accepts "power:<k+>,<k->".
DensityPair model_by_name(const std::string& name);

/// Builds a model from flat config keys: model.name, model.family and
/// family parameters (model.k_plus, model.k_minus for family "power").
DensityPair model_from_config(const std::map<std::string, std::string>& config);

/// f+ = C x^k+, f- = C (1-x)^k- with C normalizing the total mass.
DensityPair power_model(std::string name, unsigned k_plus, unsigned k_minus);

}  // namespace threshlab
