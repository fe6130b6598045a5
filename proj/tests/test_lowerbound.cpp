#include <doctest.h>

#include <cmath>
#include <random>

#include "threshlab/error.hpp"
#include "threshlab/lowerbound.hpp"
#include "threshlab/perturbation.hpp"

using namespace threshlab;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::Io;
}

std::vector<double> random_simplex(std::mt19937_64& gen, std::size_t k, bool allow_zero) {
    std::exponential_distribution<double> e(1.0);
    std::bernoulli_distribution zero(0.2);
    std::vector<double> v(k);
    double s = 0.0;
    for (auto& x : v) {
        x = allow_zero && zero(gen) ? 0.0 : e(gen);
        s += x;
    }
    if (s == 0.0) {
        v[0] = 1.0;
        s = 1.0;
    }
    for (auto& x : v) x /= s;
    return v;
}

}  // namespace

TEST_CASE("entropy filter examples") {
    const FiniteModel same{{0.3, 0.7}, {0.3, 0.7}};
    const std::vector<double> x{0.9, 0.2};
    const InequalityCheck s = entropy_filter_check(same, x);
    CHECK(same.entropy() == 0.0);
    CHECK(s.rhs == doctest::Approx(std::exp(-1.0) * (0.3 * 0.9 + 0.7 * 0.2 - 0.5)));
    CHECK(s.holds);

    const FiniteModel m{{0.5, 0.5}, {0.25, 0.75}};
    CHECK(m.entropy() == doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-14));
    CHECK(m.entropy() == doctest::Approx(0.14384).epsilon(1e-4));
    const std::vector<double> ind{1.0, 0.0};
    const InequalityCheck a = entropy_filter_check(m, ind);
    CHECK(a.lhs == doctest::Approx(0.25));
    CHECK(std::abs(a.rhs) < 1e-15);
    CHECK(a.holds);
    const std::vector<double> one{1.0, 1.0};
    const InequalityCheck b = entropy_filter_check(m, one);
    CHECK(b.lhs == doctest::Approx(1.0));
    CHECK(b.rhs == doctest::Approx(0.5 * std::exp(-2.0 * m.entropy() - 1.0)));
    CHECK(b.rhs == doctest::Approx(0.1378).epsilon(1e-3));
    CHECK(b.holds);
}

TEST_CASE("finite model validation") {
    const std::vector<double> x{0.5, 0.5};
    CHECK(kind_of([&] { entropy_filter_check(FiniteModel{{0.5, 0.5}, {1.0, 0.0}}, x); }) == ErrorKind::InvalidModel);
    CHECK(kind_of([&] { entropy_filter_check(FiniteModel{{0.5, 0.6}, {0.5, 0.5}}, x); }) == ErrorKind::InvalidModel);
    CHECK(kind_of([&] { entropy_filter_check(FiniteModel{{}, {}}, {}); }) == ErrorKind::InvalidModel);
    const std::vector<double> nine(9, 1.0 / 9.0);
    const std::vector<double> xs9(9, 0.5);
    CHECK(kind_of([&] { entropy_filter_check(FiniteModel{nine, nine}, xs9); }) == ErrorKind::InvalidModel);
    const std::vector<double> bad{1.5, 0.0};
    CHECK(kind_of([&] { entropy_filter_check(FiniteModel{{0.5, 0.5}, {0.5, 0.5}}, bad); }) == ErrorKind::InvalidModel);
    // p = 0 where q = 0 is fine
    const std::vector<double> x3{0.1, 0.2, 0.3};
    CHECK(entropy_filter_check(FiniteModel{{0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}}, x3).holds);
}

TEST_CASE("entropy filter fuzz") {
    std::mt19937_64 gen(2101);
    std::uniform_int_distribution<std::size_t> k_dist(1, 8);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::bernoulli_distribution binary(0.3);
    int violations = 0;
    for (int c = 0; c < 10'000; ++c) {
        const std::size_t k = k_dist(gen);
        FiniteModel m{random_simplex(gen, k, true), random_simplex(gen, k, false)};
        std::vector<double> x(k);
        for (auto& v : x) v = binary(gen) ? static_cast<double>(gen() & 1) : ux(gen);
        if (!entropy_filter_check(m, x).holds) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("general-loss examples") {
    const double gamma = 0.3;
    // two outcomes, two hypotheses, opposite gaps; every n = 1 rule
    GeneralLossSetup s{FiniteModel{{0.6, 0.4}, {0.45, 0.55}}, {0.0, gamma}, {gamma, 0.0}, gamma};
    for (int table = 0; table < 4; ++table) {
        const DecisionRule rule = [table](std::span<const int> seq) {
            return static_cast<std::size_t>((table >> seq[0]) & 1);
        };
        const GeneralLossCheck r = general_loss_check(s, 1, 0.2, rule);
        CHECK(r.holds);
    }

    // P = Q: the premise forces 2 Delta_P(h) >= gamma for every h
    const DecisionRule pick_one = [](std::span<const int>) { return std::size_t{1}; };
    const GeneralLossSetup common{FiniteModel{{0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}}, {0.0, 0.4, 0.5}, {0.0, 0.4, 0.5}, 0.8};
    CHECK_FALSE(common.premise_holds());  // shared minimizer has zero total gap
    const GeneralLossSetup eq{FiniteModel{{0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}}, {0.0, 0.4}, {0.4, 0.0}, 0.4};
    CHECK(eq.premise_holds());
    for (double delta : {0.05, 0.25, 0.45}) {
        const GeneralLossCheck r = general_loss_check(eq, 2, delta, pick_one);
        CHECK(r.holds);
        CHECK(r.e_q == doctest::Approx(0.0));
        CHECK(r.e_p == doctest::Approx(0.4));
    }

    CHECK(kind_of([&] { general_loss_check(GeneralLossSetup{FiniteModel{{0.5, 0.5}, {0.5, 0.5}}, {0.0, 0.1}, {0.0, 0.1}, 0.5}, 1, 0.2, pick_one); }) ==
          ErrorKind::PremiseFails);
    const GeneralLossSetup big{FiniteModel{std::vector<double>(8, 0.125), std::vector<double>(8, 0.125)}, {0.0, 1.0}, {1.0, 0.0}, 1.0};
    CHECK(kind_of([&] { general_loss_check(big, 5, 0.2, pick_one); }) == ErrorKind::TooLarge);
    CHECK(general_loss_check(big, 4, 0.2, pick_one).holds);
    CHECK(kind_of([&] { general_loss_check(s, 1, 0.5, pick_one); }) == ErrorKind::DeltaOutOfRange);
}

TEST_CASE("general-loss fuzz") {
    std::mt19937_64 gen(7101);
    std::uniform_int_distribution<std::size_t> k_dist(1, 4), h_dist(2, 5);
    std::uniform_int_distribution<unsigned> n_dist(1, 3);
    std::uniform_real_distribution<double> ux(0.0, 1.0), dd(0.01, 0.49);
    int violations = 0, cases = 0;
    while (cases < 10'000) {
        const std::size_t k = k_dist(gen), hyps = h_dist(gen);
        const unsigned n = n_dist(gen);
        GeneralLossSetup s{FiniteModel{random_simplex(gen, k, true), random_simplex(gen, k, false)}, {}, {}, 0.0};
        for (std::size_t h = 0; h < hyps; ++h) {
            s.loss_p.push_back(ux(gen));
            s.loss_q.push_back(ux(gen));
        }
        double gmin = INFINITY;
        for (std::size_t h = 0; h < hyps; ++h) gmin = std::min(gmin, s.gap_p(h) + s.gap_q(h));
        if (!(gmin > 1e-6)) continue;
        s.gamma = gmin * (ux(gen) < 0.3 ? 1.0 : 0.1 + 0.9 * ux(gen));
        ++cases;

        std::size_t total = 1;
        for (unsigned i = 0; i < n; ++i) total *= k;
        std::vector<std::size_t> table(total);
        const int mode = static_cast<int>(gen() % 3);
        std::size_t best_p = 0;
        for (std::size_t h = 1; h < hyps; ++h)
            if (s.loss_p[h] < s.loss_p[best_p]) best_p = h;
        for (auto& t : table) t = mode == 0 ? gen() % hyps : mode == 1 ? best_p : (gen() % 2 ? best_p : gen() % hyps);
        const DecisionRule rule = [&](std::span<const int> seq) {
            std::size_t code = 0, mult = 1;
            for (int v : seq) {
                code += static_cast<std::size_t>(v) * mult;
                mult *= k;
            }
            return table[code];
        };
        if (!general_loss_check(s, n, dd(gen), rule).holds) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("entropy premise is monotone in delta") {
    for (double nh : {0.0, 0.01, 0.1, 0.5, 1.0}) {
        bool seen = false;
        for (int i = 90; i >= 1; --i) {
            const double delta = i / 1000.0;
            const bool ok = entropy_premise(nh, delta);
            CHECK((!seen || ok));  // once it holds, it holds for every smaller delta
            seen = seen || ok;
        }
    }
    CHECK_FALSE(entropy_premise(0.0, 0.1));
    CHECK(entropy_premise(0.0, 1.0 / 11.0));
    CHECK_FALSE(entropy_premise(0.01, 1.0 / 11.0));
    CHECK(chi(1.0) == 1.0);
    CHECK(chi(-1.0) == 1.0);
    CHECK(chi(1.0000001) == 0.0);
    CHECK(chi(-2.0) == 0.0);
}

TEST_CASE("disjunction premise guards") {
    const DensityPair c = builtin_models()[0];
    const TwoPointCertificate cert = build_certificate(c, default_bump(), 0.05, 10'000);
    const EstimatorSpec erm = EstimatorSpec::parse("erm");
    try {
        disjunction_check(c, cert.q, 10'000, 1e-3, 0.05, erm, 10, 1);
        FAIL("expected PremiseFails");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PremiseFails);
        CHECK(std::string(e.what()).find("separation") != std::string::npos);
    }
    try {
        disjunction_check(c, cert.q, 10'000'000, cert.beta, 0.05, erm, 10, 1);
        FAIL("expected PremiseFails");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PremiseFails);
        CHECK(std::string(e.what()).find("entropy") != std::string::npos);
    }
}

TEST_CASE("disjunction conclusion across certificates") {
    const std::vector<DensityPair> models = builtin_models();
    const BumpProfile phi = default_bump();
    struct Config {
        std::size_t model;
        double delta;
        std::uint64_t n;
    };
    const std::vector<Config> configs{{0, 0.05, 1000}, {0, 0.01, 1000}, {0, 0.09, 2000}, {1, 0.05, 1000}, {1, 0.01, 2000},
                                      {1, 0.09, 1000}, {2, 0.05, 1000}, {2, 0.01, 1000}, {2, 0.09, 2000}, {0, 0.05, 4000}};
    for (const auto& cfg : configs) {
        const DensityPair& p = models[cfg.model];
        const TwoPointCertificate cert = build_certificate(p, phi, cfg.delta, cfg.n);
        REQUIRE(cert.entropy_ok);
        REQUIRE(cert.separation_ok);
        for (const char* name : {"erm", "twostep:L=4", "clock"}) {
            INFO(p.name() << " delta=" << cfg.delta << " n=" << cfg.n << " " << name);
            const DisjunctionReport r =
                disjunction_check(p, cert.q, cfg.n, cert.beta, cfg.delta, EstimatorSpec::parse(name), 200, 11, 1);
            CHECK(r.trials == 200);
            CHECK(r.verdict);
            CHECK(r.separation == doctest::Approx(cert.separation));
        }
    }
}

TEST_CASE("disjunction is deterministic across worker counts") {
    const DensityPair c = builtin_models()[0];
    const TwoPointCertificate cert = build_certificate(c, default_bump(), 0.05, 1000);
    const EstimatorSpec est = EstimatorSpec::parse("twostep:L=4");
    const DisjunctionReport a = disjunction_check(c, cert.q, 1000, cert.beta, 0.05, est, 64, 5, 1);
    const DisjunctionReport b = disjunction_check(c, cert.q, 1000, cert.beta, 0.05, est, 64, 5, 4);
    CHECK(a.mean_p == b.mean_p);
    CHECK(a.mean_q == b.mean_q);
}
