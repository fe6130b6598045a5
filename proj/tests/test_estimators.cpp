#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "threshlab/error.hpp"
#include "threshlab/estimators.hpp"

using namespace threshlab;

namespace {

// frequentist oracle: minimum error count over an a-grid
std::size_t grid_min_errors(const std::vector<LabeledPoint>& pts, int grid) {
    std::size_t best = pts.size() + 1;
    for (int i = 0; i <= grid; ++i) {
        const double a = static_cast<double>(i) / grid;
        std::size_t e = 0;
        for (const auto& p : pts) e += (p.x >= a ? 1 : -1) != p.y;
        best = std::min(best, e);
    }
    return best;
}

}  // namespace

TEST_CASE("erm examples") {
    const std::vector<LabeledPoint> a{{0.2, -1}, {0.4, -1}, {0.6, 1}, {0.8, 1}};
    const ErmResult r = erm_threshold(a);
    CHECK(r.a_hat == 0.5);
    CHECK(r.min_errors == 0);
    CHECK(r.candidate_count == 5);

    const std::vector<LabeledPoint> b{{0.3, 1}, {0.7, 1}};
    CHECK(erm_threshold(b).a_hat == 0.0);
    CHECK(erm_threshold(b).min_errors == 0);

    const std::vector<LabeledPoint> c{{0.5, 1}, {0.5, -1}};
    const ErmResult rc = erm_threshold(c);
    CHECK(rc.min_errors == 1);
    CHECK(rc.a_hat == 0.0);
    CHECK(rc.candidate_count == 2);

    CHECK(erm_threshold(std::vector<LabeledPoint>{}).a_hat == 0.0);

    const std::vector<LabeledPoint> neg{{0.3, -1}, {0.7, -1}};
    CHECK(erm_threshold(neg).a_hat == 1.0);
    // a negative point at x = 1 cannot be fixed by any threshold in [0,1]
    const std::vector<LabeledPoint> edge{{0.2, -1}, {1.0, -1}};
    CHECK(erm_threshold(edge).min_errors == 1);
    CHECK(erm_threshold(edge).a_hat == 0.6);
}

TEST_CASE("erm optimality against a grid oracle") {
    std::mt19937_64 gen(12345);
    std::uniform_int_distribution<int> size(0, 12), lattice(0, 1000), coin(0, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<LabeledPoint> pts(size(gen));
        // lattice x's keep every midpoint on the 10^4 grid
        for (auto& p : pts) p = {lattice(gen) / 1000.0, coin(gen) ? 1 : -1};
        const ErmResult r = erm_threshold(pts);
        REQUIRE(r.min_errors == grid_min_errors(pts, 10'000));
        REQUIRE(empirical_errors(pts, r.a_hat) == r.min_errors);
        std::vector<LabeledPoint> rev(pts.rbegin(), pts.rend());
        const ErmResult rr = erm_threshold(rev);
        REQUIRE(rr.a_hat == r.a_hat);
        REQUIRE(rr.min_errors == r.min_errors);
    }
}

TEST_CASE("erm brute force over candidates") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 30), coin(0, 1);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<LabeledPoint> pts(size(gen));
        for (auto& p : pts) p = {ux(gen), coin(gen) ? 1 : -1};
        std::vector<double> xs;
        for (const auto& p : pts) xs.push_back(p.x);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::vector<double> cand{0.0};
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) cand.push_back(0.5 * (xs[i] + xs[i + 1]));
        cand.push_back(1.0);
        double best_a = 0.0;
        std::size_t best = pts.size() + 1;
        for (double a : cand) {
            const std::size_t e = empirical_errors(pts, a);
            if (e < best) {
                best = e;
                best_a = a;
            }
        }
        const ErmResult r = erm_threshold(pts);
        REQUIRE(r.a_hat == best_a);
        REQUIRE(r.min_errors == best);
        REQUIRE(r.candidate_count == cand.size());
    }
}

TEST_CASE("refine_local examples") {
    const double a0 = 0.5;
    const std::vector<LabeledPoint> pair{{a0 - 0.1, -1}, {a0 + 0.1, 1}};
    const RefineResult r = refine_local(pair, a0, 1.0);
    CHECK_FALSE(r.fell_back);
    CHECK(r.window_count == 2);
    CHECK(r.b1 == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(std::abs(r.b2) < 1e-12);
    CHECK(r.a_hat == doctest::Approx(a0).epsilon(1e-12));

    const std::vector<LabeledPoint> three{{a0 - 0.1, -1}, {a0, -1}, {a0 + 0.1, 1}};
    const RefineResult t = refine_local(three, a0, 1.0);
    CHECK(t.b1 == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(t.b2 == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(t.a_hat == doctest::Approx(a0 + 1.0 / 30.0).epsilon(1e-12));

    const std::vector<LabeledPoint> one{{0.45, 1}};
    const RefineResult o = refine_local(one, a0, 1.0);
    CHECK(o.fell_back);
    CHECK(o.a_hat == a0);
    CHECK(o.window_count == 1);

    // same abscissa twice and constant labels both degenerate
    const std::vector<LabeledPoint> dup{{0.45, 1}, {0.45, -1}};
    CHECK(refine_local(dup, a0, 1.0).fell_back);
    const std::vector<LabeledPoint> flat{{0.4, 1}, {0.6, 1}};
    const RefineResult f = refine_local(flat, a0, 1.0);
    CHECK(f.fell_back);
    CHECK(f.a_hat == a0);

    // window M = L n^(-1/3) excludes far points
    const std::vector<LabeledPoint> far{{0.49, -1}, {0.51, 1}, {0.99, 1}, {0.01, -1}, {0.9, 1}, {0.1, -1}, {0.8, 1}, {0.2, -1}};
    const RefineResult w = refine_local(far, a0, 0.1);
    CHECK(w.window_count == 2);
    // output is not clamped: labels mostly +1 put the crossing left of 0
    const std::vector<LabeledPoint> left{{0.02, 1}, {0.04, -1}, {0.06, 1}, {0.08, 1}, {0.10, 1}, {0.12, 1}};
    const RefineResult l = refine_local(left, 0.06, 1.0);
    CHECK_FALSE(l.fell_back);
    CHECK(l.a_hat == doctest::Approx(-7.0 / 900.0).epsilon(1e-9));
}

TEST_CASE("refine_local solves the normal equations") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 40), coin(0, 1);
    int solved = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<LabeledPoint> pts(size(gen));
        for (auto& p : pts) p = {ux(gen), coin(gen) ? 1 : -1};
        const double a0 = 0.05 + 0.9 * ux(gen);
        const double L = 0.1 + ux(gen);
        const RefineResult r = refine_local(pts, a0, L);
        const double m = L * std::pow(static_cast<double>(pts.size()), -1.0 / 3.0);
        double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
        std::size_t count = 0;
        for (const auto& p : pts) {
            const double u = p.x - a0;
            if (std::abs(u) > m) continue;
            ++count;
            s0 += 1; s1 += u; s2 += u * u; t0 += p.y; t1 += p.y * u;
        }
        REQUIRE(r.window_count == count);
        if (r.fell_back) {
            REQUIRE(r.a_hat == a0);
            continue;
        }
        ++solved;
        const double r1 = s2 * r.b1 + s1 * r.b2 - t1;
        const double r2 = s1 * r.b1 + s0 * r.b2 - t0;
        const double scale = std::abs(t1) + std::abs(t0) + s2 * std::abs(r.b1) + s0 * std::abs(r.b2) + std::abs(s1) * (std::abs(r.b1) + std::abs(r.b2));
        REQUIRE(std::abs(r1) + std::abs(r2) <= 1e-10 * scale);
        REQUIRE(r.a_hat == doctest::Approx(a0 - r.b2 / r.b1));
    }
    CHECK(solved > 500);
}

TEST_CASE("refine_local is exact on linear labels") {
    // the label alphabet is {-1,+1}, so feed real-valued y through a pair of
    // points per abscissa: the line fit only sees window sums
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(-0.2, 0.2), coef(-5.0, 5.0);
    for (int trial = 0; trial < 500; ++trial) {
        // two abscissae, y = +-1 exactly on a line through them
        const double a0 = 0.5;
        const double u1 = u(gen), u2 = u(gen);
        if (std::abs(u1 - u2) < 1e-3) continue;
        const int y1 = coef(gen) > 0 ? 1 : -1;
        const int y2 = -y1;
        const double c1 = (y2 - y1) / (u2 - u1);
        const double c2 = y1 - c1 * u1;
        const std::vector<LabeledPoint> pts{{a0 + u1, y1}, {a0 + u2, y2}};
        const RefineResult r = refine_local(pts, a0, 10.0);
        REQUIRE_FALSE(r.fell_back);
        REQUIRE(std::abs(r.a_hat - (a0 - c2 / c1)) <= 1e-10);
    }
    // collinear triple with repeated labels: y = +1 at u = 0.1 twice and -1 at u = -0.1 twice
    const std::vector<LabeledPoint> pts{{0.4, -1}, {0.4, -1}, {0.6, 1}, {0.6, 1}};
    const RefineResult r = refine_local(pts, 0.5, 10.0);
    CHECK(std::abs(r.a_hat - 0.5) <= 1e-10);
}

TEST_CASE("two_step") {
    const std::vector<LabeledPoint> four{{0.1, -1}, {0.9, 1}, {0.3, -1}, {0.7, 1}};
    CHECK(two_step(four, 1.0) == doctest::Approx(0.5).epsilon(1e-12));

    // fifth point is dropped
    std::vector<LabeledPoint> five = four;
    five.push_back({0.55, -1});
    CHECK(two_step(five, 1.0) == two_step(four, 1.0));

    CHECK_THROWS_AS(two_step(std::vector<LabeledPoint>{{0.5, 1}}, 1.0), Error);
    try {
        two_step(std::vector<LabeledPoint>{}, 1.0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SampleTooSmall);
    }

    // permuting the first half leaves the estimate unchanged
    const DensityPair p = builtin_models()[1];
    const LabeledSample s = draw(p, 2000, {3, 4});
    const double base = two_step(s, 1.0);
    std::vector<LabeledPoint> perm = s.points;
    std::mt19937_64 gen(1);
    std::shuffle(perm.begin(), perm.begin() + 1000, gen);
    CHECK(two_step(perm, 1.0) == base);
    CHECK(std::abs(base - p.threshold()) < 0.1);

    // all-positive first half nudges a0 to 1/(2m)
    const std::vector<LabeledPoint> nudge{{0.6, 1}, {0.7, 1}, {0.1, -1}, {0.5, 1}};
    CHECK(two_step(nudge, 100.0) > 0.0);
}

TEST_CASE("clock estimator") {
    CHECK(clock_estimator(1) == 0.0);
    CHECK(clock_estimator(3) == 0.5);
    CHECK(clock_estimator(13) == 0.625);
    CHECK(clock_estimator(8) == 0.0);
    CHECK(clock_estimator(15) == 0.875);
    for (std::uint64_t n = 1; n < 5000; ++n) {
        const double v = clock_estimator(n);
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
    }
    for (int k = 0; k <= 20; ++k) {
        const std::uint64_t lo = std::uint64_t{1} << k;
        for (int j = 0; j <= 10; ++j) {
            const double a = j / 10.0;
            bool hit = false;
            for (std::uint64_t n = lo; n < 2 * lo && !hit; ++n)
                hit = std::abs(clock_estimator(n) - a) <= 2.0 / static_cast<double>(n);
            INFO("k=" << k << " a=" << a);
            CHECK(hit);
        }
    }
}

TEST_CASE("estimator names") {
    CHECK(EstimatorSpec::parse("erm").kind == EstimatorKind::Erm);
    CHECK(EstimatorSpec::parse("clock").kind == EstimatorKind::Clock);
    const EstimatorSpec t = EstimatorSpec::parse("twostep:L=0.25");
    CHECK(t.kind == EstimatorKind::TwoStep);
    CHECK(t.scale == 0.25);
    CHECK(t.id() == "twostep:L=0.25");
    CHECK(EstimatorSpec::parse(t.id()).scale == t.scale);
    for (const char* bad : {"", "ERM", "twostep", "twostep:L=", "twostep:L=-1", "twostep:L=1x", "knn"}) {
        INFO(bad);
        CHECK_THROWS_AS(EstimatorSpec::parse(bad), Error);
    }
}
