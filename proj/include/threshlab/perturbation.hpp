#pragma once

#include <cstdint>

#include "threshlab/divergence.hpp"
#include "threshlab/model.hpp"

namespace threshlab {

/// Profile phi(u) = cos^2(pi u / (2 R)) on |u| <= R, zero outside.
struct BumpProfile {
    ScalarField1D value;      // phi in its own coordinate u
    double support_radius = 1.0;
    double l2sq = 0.0;        // int phi^2, by quadrature
    double dsup = 0.0;        // sup |phi'| = pi / (2R)

    /// eps * phi((x - center) / eps)
    ScalarField1D scaled(double center, double eps) const;
};

BumpProfile make_bump(double support_radius);
inline BumpProfile default_bump() { return make_bump(1.0); }

struct PerturbationPlan {
    DensityPair base;
    BumpProfile phi;
    double delta = 0.0;
    std::uint64_t n = 0;
    double eps = 0.0;
    double c4 = 0.0;
};

/// 1/2 |log(11 delta)|
double entropy_budget(double delta);

/// c4 = (||f_P||_inf ||phi||_2^2)^(-1/3), eps = c4 |log(11 delta)|^(1/3) n^(-1/3).
/// Throws DeltaOutOfRange unless 0 < delta < 1/11, EpsTooLarge if 1 - Xi rho+
/// would reach zero.
PerturbationPlan make_plan(const DensityPair& p, const BumpProfile& phi, double delta, std::uint64_t n);

/// 1/2 ||f_P||_inf ||phi||_2^2 n eps^3; equals entropy_budget(delta) by construction.
double designed_entropy_bound(const PerturbationPlan& plan);

/// f_Q^+ = (1 + Xi rho_P^-) f_P^+,  f_Q^- = (1 - Xi rho_P^+) f_P^-,  Xi(x) = eps phi((x - a(P))/eps).
/// Throws SupportEscapes if the bump support leaves (0,1), NegativeDensity
/// if f_Q fails the certified nonnegativity check.
DensityPair perturb(const DensityPair& p, const BumpProfile& phi, double eps);

struct ShiftConstants {
    double c1 = 0.0;
    double c4 = 0.0;
    double c5 = 0.0;       // grid sup of |(rho_Q^+)'| over the neighborhood, at eps_max
    double eps_max = 0.0;  // largest eps keeping rho_P in [1/3, 2/3] on the bump support
    double nbhd_lo = 0.0;
    double nbhd_hi = 0.0;
};

/// c1 = c4 / (32 c5): half of the largest value for which the separation
/// bound beta_n |a(Q_n) - a(P)| > 4 follows from the c5 estimate.
ShiftConstants estimate_shift_constants(const DensityPair& p, const BumpProfile& phi);
inline double estimate_c1(const DensityPair& p, const BumpProfile& phi) {
    return estimate_shift_constants(p, phi).c1;
}

struct TwoPointCertificate {
    PerturbationPlan plan;
    DensityPair q;
    double entropy = 0.0;        // H(P, Q_n)
    double entropy_error = 0.0;  // quadrature error estimate of entropy
    double entropy_budget = 0.0;
    double c1 = 0.0;
    double beta = 0.0;
    double separation = 0.0;    // beta |a(P) - a(Q_n)|
    bool entropy_ok = false;    // n H <= budget
    bool separation_ok = false; // separation > 4

    double n_entropy() const { return static_cast<double>(plan.n) * entropy; }
};

/// beta_n = n^(1/3) / (c1 |log(11 delta)|^(1/3))
double beta_n(std::uint64_t n, double c1, double delta);

TwoPointCertificate build_certificate(const DensityPair& p, const BumpProfile& phi, double delta, std::uint64_t n);
TwoPointCertificate build_certificate(const DensityPair& p, const BumpProfile& phi, double delta, std::uint64_t n,
                                      double c1);

}  // namespace threshlab
