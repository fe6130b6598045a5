#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "threshlab/estimators.hpp"
#include "threshlab/model.hpp"
#include "threshlab/sampling.hpp"

namespace threshlab {

/// Two distributions on k <= 8 outcomes.
struct FiniteModel {
    std::vector<double> p;
    std::vector<double> q;

    std::size_t outcomes() const { return p.size(); }
    /// Throws InvalidModel on size, sign, normalization or support problems.
    void validate() const;
    /// sum p log(p/q), with 0 log 0 = 0
    double entropy() const;
};

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// E_Q X >= exp(-2 H(P,Q) - 1) (E_P X - 1/2) for X with values in [0,1].
InequalityCheck entropy_filter_check(const FiniteModel& m, std::span<const double> x_values);

/// Losses per hypothesis under P and Q; Delta = loss minus its minimum.
struct GeneralLossSetup {
    FiniteModel model;
    std::vector<double> loss_p;
    std::vector<double> loss_q;
    double gamma = 0.0;

    std::size_t hypotheses() const { return loss_p.size(); }
    double gap_p(std::size_t h) const;
    double gap_q(std::size_t h) const;
    /// Delta_P(h) + Delta_Q(h) >= gamma for all h
    bool premise_holds() const;
};

/// Maps an outcome sequence to a hypothesis index.
using DecisionRule = std::function<std::size_t(std::span<const int>)>;

struct GeneralLossCheck {
    double e_p = 0.0;  // E_{P^n} min(gamma, Delta_P(h_hat))
    double e_q = 0.0;  // E_{Q^n} min(gamma, Delta_Q(h_hat))
    double bound_p = 0.0;  // delta gamma
    double bound_q = 0.0;  // (1/2 - delta) gamma exp(-2 n H - 1)
    bool holds = false;
};

inline constexpr std::size_t kMaxEnumeration = 4096;

/// Exact enumeration of all k^n sequences. Throws TooLarge when k^n > 4096,
/// PremiseFails when the loss-gap premise is violated, DeltaOutOfRange
/// unless 0 < delta < 1/2.
GeneralLossCheck general_loss_check(const GeneralLossSetup& setup, unsigned n, double delta, const DecisionRule& rule);

/// Sharp window: 1 on [-1,1], 0 elsewhere.
inline double chi(double x) { return (x >= -1.0 && x <= 1.0) ? 1.0 : 0.0; }

/// n H <= 1/2 log(1/(11 delta)); needs delta < 1/11 to be satisfiable.
bool entropy_premise(double n_entropy, double delta);

struct DisjunctionReport {
    double n_entropy = 0.0;
    double separation = 0.0;  // beta |a(P) - a(Q)|
    double mean_p = 0.0;      // E_{P^n} chi(beta (a_hat - a(P)))
    double stderr_p = 0.0;
    double mean_q = 0.0;
    double stderr_q = 0.0;
    std::size_t trials = 0;
    bool verdict = false;     // min mean < 1 - delta + 3 stderr
};

/// Premise first (PremiseFails "entropy" or "separation"), then Monte Carlo:
/// `trials` samples of size n from each of P and Q.
DisjunctionReport disjunction_check(const DensityPair& p, const DensityPair& q, std::uint64_t n, double beta,
                                    double delta, const EstimatorSpec& estimator, std::size_t trials,
                                    std::uint64_t master_seed, unsigned workers = 0);

}  // namespace threshlab
