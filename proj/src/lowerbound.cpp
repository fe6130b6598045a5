#include "threshlab/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "threshlab/divergence.hpp"
#include "threshlab/error.hpp"
#include "threshlab/parallel.hpp"

namespace threshlab {

namespace {

constexpr double kSlack = 1e-12;
constexpr std::uint64_t kSaltP = 0x5045'5254'5552'4250ULL;
constexpr std::uint64_t kSaltQ = 0x5045'5254'5552'4251ULL;

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace

void FiniteModel::validate() const {
    const std::size_t k = p.size();
    if (k == 0 || k > 8 || q.size() != k) {
        throw Error(ErrorKind::InvalidModel, "finite model needs 1..8 outcomes and equal-length p, q");
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (!(p[i] >= 0.0) || !(q[i] >= 0.0)) throw Error(ErrorKind::InvalidModel, "negative probability");
        if (p[i] > 0.0 && q[i] <= 0.0) {
            throw Error(ErrorKind::InvalidModel, "q vanishes where p does not (infinite entropy)");
        }
    }
    if (std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) > kSlack ||
        std::abs(std::accumulate(q.begin(), q.end(), 0.0) - 1.0) > kSlack) {
        throw Error(ErrorKind::InvalidModel, "probabilities do not sum to 1");
    }
}

double FiniteModel::entropy() const {
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) h += p[i] * std::log(p[i] / q[i]);
    return h;
}

InequalityCheck entropy_filter_check(const FiniteModel& m, std::span<const double> x_values) {
    m.validate();
    if (x_values.size() != m.outcomes()) throw Error(ErrorKind::InvalidModel, "one X value per outcome required");
    double ep = 0.0, eq = 0.0;
    for (std::size_t i = 0; i < x_values.size(); ++i) {
        const double x = x_values[i];
        if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::InvalidModel, "X must take values in [0,1]");
        ep += m.p[i] * x;
        eq += m.q[i] * x;
    }
    InequalityCheck r;
    r.lhs = eq;
    r.rhs = std::exp(-2.0 * m.entropy() - 1.0) * (ep - 0.5);
    r.holds = r.lhs >= r.rhs - kSlack;
    return r;
}

double GeneralLossSetup::gap_p(std::size_t h) const { return loss_p[h] - min_of(loss_p); }
double GeneralLossSetup::gap_q(std::size_t h) const { return loss_q[h] - min_of(loss_q); }

bool GeneralLossSetup::premise_holds() const {
    for (std::size_t h = 0; h < hypotheses(); ++h)
        if (gap_p(h) + gap_q(h) < gamma - kSlack) return false;
    return true;
}

GeneralLossCheck general_loss_check(const GeneralLossSetup& setup, unsigned n, double delta, const DecisionRule& rule) {
    setup.model.validate();
    if (setup.hypotheses() == 0 || setup.loss_q.size() != setup.hypotheses() || !(setup.gamma > 0.0)) {
        throw Error(ErrorKind::InvalidModel, "need matching nonempty loss lists and gamma > 0");
    }
    if (!(delta > 0.0 && delta < 0.5)) throw Error(ErrorKind::DeltaOutOfRange, "delta must lie in (0, 1/2)");
    if (!setup.premise_holds()) throw Error(ErrorKind::PremiseFails, "Delta_P + Delta_Q < gamma for some h");
    if (n == 0) throw Error(ErrorKind::InvalidModel, "n must be >= 1");

    const std::size_t k = setup.model.outcomes();
    std::size_t total = 1;
    for (unsigned i = 0; i < n; ++i) {
        total *= k;
        if (total > kMaxEnumeration) {
            throw Error(ErrorKind::TooLarge, "k^n exceeds " + std::to_string(kMaxEnumeration) + " sequences");
        }
    }

    GeneralLossCheck r;
    std::vector<int> seq(n, 0);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        double pp = 1.0, pq = 1.0;
        for (unsigned i = 0; i < n; ++i) {
            seq[i] = static_cast<int>(c % k);
            c /= k;
            pp *= setup.model.p[seq[i]];
            pq *= setup.model.q[seq[i]];
        }
        const std::size_t h = rule(seq);
        if (h >= setup.hypotheses()) throw Error(ErrorKind::InvalidModel, "decision rule returned an unknown hypothesis");
        r.e_p += pp * std::min(setup.gamma, setup.gap_p(h));
        r.e_q += pq * std::min(setup.gamma, setup.gap_q(h));
    }
    r.bound_p = delta * setup.gamma;
    r.bound_q = (0.5 - delta) * setup.gamma * std::exp(-2.0 * n * setup.model.entropy() - 1.0);
    r.holds = r.e_p >= r.bound_p - kSlack || r.e_q >= r.bound_q - kSlack;
    return r;
}

bool entropy_premise(double n_entropy, double delta) {
    if (!(delta > 0.0)) return false;
    return n_entropy <= 0.5 * std::log(1.0 / (11.0 * delta));
}

DisjunctionReport disjunction_check(const DensityPair& p, const DensityPair& q, std::uint64_t n, double beta,
                                    double delta, const EstimatorSpec& estimator, std::size_t trials,
                                    std::uint64_t master_seed, unsigned workers) {
    DisjunctionReport r;
    const QuadratureSpec spec{32, std::min(1e-13, 1e-9 / static_cast<double>(std::max<std::uint64_t>(n, 1))), 48};
    r.n_entropy = static_cast<double>(n) * relative_entropy(p, q, spec).value;
    r.separation = beta * std::abs(p.threshold() - q.threshold());
    if (!entropy_premise(r.n_entropy, delta)) {
        std::ostringstream msg;
        msg << "entropy: n H = " << r.n_entropy << " exceeds 1/2 log(1/(11 delta)) for delta = " << delta;
        throw Error(ErrorKind::PremiseFails, msg.str());
    }
    if (!(r.separation > 4.0)) {
        std::ostringstream msg;
        msg << "separation: beta |a(P) - a(Q)| = " << r.separation << " is not > 4";
        throw Error(ErrorKind::PremiseFails, msg.str());
    }

    r.trials = trials;
    std::vector<double> hit_p(trials), hit_q(trials);
    const double ap = p.threshold(), aq = q.threshold();
    parallel_for(trials, workers, [&](std::size_t t) {
        const LabeledSample sp = draw(p, n, {master_seed ^ kSaltP, t});
        hit_p[t] = chi(beta * (estimator.apply(sp) - ap));
        const LabeledSample sq = draw(q, n, {master_seed ^ kSaltQ, t});
        hit_q[t] = chi(beta * (estimator.apply(sq) - aq));
    });
    if (trials == 0) return r;
    const double tn = static_cast<double>(trials);
    r.mean_p = std::accumulate(hit_p.begin(), hit_p.end(), 0.0) / tn;
    r.mean_q = std::accumulate(hit_q.begin(), hit_q.end(), 0.0) / tn;
    r.stderr_p = std::sqrt(r.mean_p * (1.0 - r.mean_p) / tn);
    r.stderr_q = std::sqrt(r.mean_q * (1.0 - r.mean_q) / tn);
    const bool p_low = r.mean_p <= r.mean_q;
    const double m = p_low ? r.mean_p : r.mean_q;
    const double se = p_low ? r.stderr_p : r.stderr_q;
    r.verdict = m < 1.0 - delta + 3.0 * se;
    return r;
}

}  // namespace threshlab
