#include <doctest.h>

#include <cmath>

#include "driftclass/classify.hpp"
#include "driftclass/metrics.hpp"
#include "driftclass/sde.hpp"

using namespace driftclass;

namespace {

// A labeled dataset where the classifier can be told the truth via closures.
LabeledDataset tiny_dataset(int per_class, std::uint64_t seed) {
    auto spec = make_cosine_spec(2.5);
    return generate_dataset(spec, Balanced{3 * per_class}, 10, 1.0, seed);
}

}  // namespace

TEST_CASE("misclassification risk basics") {
    auto ds = tiny_dataset(4, 1);
    // a perfect classifier: recover the label from the stored class grouping
    int current_class = 0;
    (void)current_class;
    // walk classes in the same order as misclassification_risk does
    std::vector<const Trajectory*> lookup;
    std::vector<int> labels;
    for (int k = 1; k <= 3; ++k)
        for (const auto& t : ds.paths[k - 1]) {
            lookup.push_back(&t);
            labels.push_back(k);
        }
    auto perfect = [&](const Trajectory& t) {
        for (std::size_t i = 0; i < lookup.size(); ++i)
            if (lookup[i] == &t) return labels[i];
        return 0;
    };
    auto r = misclassification_risk(perfect, ds);
    CHECK(r.error_rate == 0.0);
    CHECK(r.n_test == 12);
    for (int k = 0; k < 3; ++k) CHECK(r.confusion[k][k] == 4);

    auto constant = [](const Trajectory&) { return 1; };
    auto rc = misclassification_risk(constant, ds);
    CHECK(rc.error_rate == doctest::Approx(2.0 / 3).epsilon(1e-12));

    LabeledDataset empty;
    empty.paths.resize(3);
    CHECK_THROWS_AS(misclassification_risk(constant, empty), std::invalid_argument);
}

TEST_CASE("conditional excess risk agrees with the 0/1-loss excess in expectation") {
    auto spec = make_cosine_spec(4.0);
    auto test = generate_dataset(spec, Balanced{3 * 3334}, 100, 1.0, 123);
    auto oracle = bayes_oracle(spec);

    // the oracle itself has zero conditional excess, exactly
    CHECK(conditional_excess_risk(oracle, oracle, test) == 0.0);

    // a deliberately degraded classifier: oracle with the top two classes swapped
    auto degraded = [&](const Trajectory& t) {
        auto post = oracle.posterior(t);
        std::vector<int> idx = {0, 1, 2};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return post[a] > post[b]; });
        return idx[1] + 1;
    };
    double cond = conditional_excess_risk(degraded, oracle, test);
    CHECK(cond > 0.0);

    // same estimand as the paired 0/1-loss excess, up to Monte Carlo label noise
    double paired = misclassification_risk(degraded, test).error_rate -
                    misclassification_risk(oracle, test).error_rate;
    CHECK(cond == doctest::Approx(paired).epsilon(0.15));

    LabeledDataset empty;
    empty.paths.resize(3);
    CHECK_THROWS_AS(conditional_excess_risk(oracle, oracle, empty), std::invalid_argument);
}

TEST_CASE("bayes oracle risk on the cosine model matches the reported value") {
    auto spec = make_cosine_spec(4.0);
    auto test = generate_dataset(spec, Balanced{3 * 3334}, 100, 1.0, 99);
    auto r = misclassification_risk(bayes_oracle(spec), test);
    CHECK(r.error_rate == doctest::Approx(0.11).epsilon(0.2));  // 0.11 +- 0.02
    CHECK(std::abs(r.error_rate - 0.11) < 0.02);
}

TEST_CASE("excess risk") {
    RiskEstimate a{0.5, 100, {}}, b{0.11, 100, {}};
    CHECK(excess_risk(a, b) == doctest::Approx(0.39).epsilon(1e-12));
    CHECK(excess_risk(a, a) == 0.0);
    RiskEstimate lucky{0.10, 100, {}};
    CHECK(excess_risk(lucky, b) < 0.0);  // not clamped
}

TEST_CASE("estimation error") {
    auto spec = make_cosine_spec(2.5);
    auto ds = generate_dataset(spec, Balanced{9}, 10, 1.0, 7);
    auto truth = true_drift(spec, 2);
    CHECK(estimation_error(truth, truth, ds, AllClasses{}) == 0.0);

    DriftEvaluator off_by_one = [&spec](const Vec& x) {
        auto b = eval_drift(spec, 2, x);
        b[0] += 1.0;
        return b;
    };
    CHECK(estimation_error(off_by_one, truth, ds, AllClasses{}) ==
          doctest::Approx(1.0).epsilon(1e-12));

    SUBCASE("matches a naive double loop") {
        DriftEvaluator wobble = [](const Vec& x) { return Vec{std::sin(3.0 * x[0])}; };
        double naive = 0.0;
        std::size_t n = 0;
        for (int k = 0; k < 3; ++k)
            for (const auto& t : ds.paths[k]) {
                double acc = 0.0;
                for (int m = 0; m < t.steps; ++m) {
                    Vec x(t.state(m), t.state(m) + 1);
                    double diff = wobble(x)[0] - truth(x)[0];
                    acc += diff * diff;
                }
                naive += acc / t.steps;
                ++n;
            }
        naive /= n;
        CHECK(estimation_error(wobble, truth, ds, AllClasses{}) ==
              doctest::Approx(naive).epsilon(1e-12));
    }

    SUBCASE("class decomposition identity") {
        DriftEvaluator wobble = [](const Vec& x) { return Vec{std::cos(x[0])}; };
        double all = estimation_error(wobble, truth, ds, AllClasses{});
        auto counts = ds.class_counts();
        double total = ds.total();
        double mix = 0.0;
        for (int k = 1; k <= 3; ++k)
            mix += (counts[k - 1] / total) * estimation_error(wobble, truth, ds, OneClass{k});
        CHECK(all == doctest::Approx(mix).epsilon(1e-12));
    }

    SUBCASE("empty selection") {
        LabeledDataset empty;
        empty.paths.resize(2);
        CHECK_THROWS_AS(estimation_error(truth, truth, empty, AllClasses{}),
                        std::invalid_argument);
    }
}

TEST_CASE("student t quantile by incomplete beta inversion") {
    CHECK(std::abs(student_t_quantile(0.975, 49) - 2.0096) < 1e-3);
    CHECK(student_t_quantile(0.5, 10) == 0.0);
    CHECK(student_t_quantile(0.975, 1) == doctest::Approx(12.7062).epsilon(1e-4));
    // symmetry
    CHECK(student_t_quantile(0.025, 49) == doctest::Approx(-student_t_quantile(0.975, 49)).epsilon(1e-8));
}

TEST_CASE("confidence interval formulas") {
    std::vector<double> constant(10, 3.25);
    auto ci = confidence_interval(constant);
    CHECK(ci.mean == 3.25);
    CHECK(ci.lower == 3.25);
    CHECK(ci.upper == 3.25);

    std::vector<double> alternating;
    for (int i = 0; i < 50; ++i) alternating.push_back(i % 2 == 0 ? 1.0 : -1.0);
    auto ca = confidence_interval(alternating);
    CHECK(ca.mean == doctest::Approx(0.0).epsilon(1e-12));
    // tau = sd/sqrt(50) = sqrt(50/49)/sqrt(50) = 1/7; half-width = t * 1/7
    double half = 0.5 * (ca.upper - ca.lower);
    CHECK(half == doctest::Approx(student_t_quantile(0.975, 49) / 7.0).epsilon(1e-10));
    CHECK(std::abs(half - 0.2870) < 1e-3);

    CHECK_THROWS_AS(confidence_interval({1.0}), std::invalid_argument);
}

TEST_CASE("half-width shrinks by half when n quadruples") {
    Rng rng = make_rng(31415);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int sims = 1000;
    double mean_small = 0.0, mean_big = 0.0;
    for (int s = 0; s < sims; ++s) {
        std::vector<double> small(20), big(80);
        for (double& v : small) v = gauss(rng);
        for (double& v : big) v = gauss(rng);
        auto cs = confidence_interval(small);
        auto cb = confidence_interval(big);
        mean_small += 0.5 * (cs.upper - cs.lower);
        mean_big += 0.5 * (cb.upper - cb.lower);
    }
    double ratio = mean_small / mean_big;
    // exact ratio is 2 * (t19/t79) * (c4(20)/c4(80)) ~ 2.08; 3 sigma over 1000 sims is well inside
    CHECK(ratio > 1.9);
    CHECK(ratio < 2.3);
}

TEST_CASE("phi rate evaluation") {
    CHECK(phi_rate({1.0}, {1.0}, 8) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(phi_rate({2.0}, {1.0}, 32) == doctest::Approx(0.0625).epsilon(1e-12));
    // two equal composition terms collapse to N^{-2/3}
    CHECK(phi_rate({1.0, 1.0}, {1.0, 1.0}, 64) == doctest::Approx(std::pow(64.0, -2.0 / 3)).epsilon(1e-12));
    CHECK_THROWS_AS(phi_rate({1.0}, {1.0, 2.0}, 8), std::invalid_argument);

    SUBCASE("monotone in N and in each beta") {
        for (int trial = 0; trial < 50; ++trial) {
            Rng rng = make_rng(2718, static_cast<std::uint64_t>(trial));
            std::uniform_real_distribution<double> unif(0.2, 3.0);
            std::vector<double> betas = {unif(rng), unif(rng)};
            std::vector<double> ts = {unif(rng), unif(rng)};
            double n = 16 + trial;
            CHECK(phi_rate(betas, ts, 2 * n) <= phi_rate(betas, ts, n) + 1e-15);
            std::vector<double> bumped = betas;
            bumped[trial % 2] += 0.5;
            CHECK(phi_rate(bumped, ts, n) <= phi_rate(betas, ts, n) + 1e-15);
        }
    }
}

TEST_CASE("rate fitting") {
    std::vector<RateCurvePoint> exact;
    for (int e = 5; e <= 12; ++e) {
        RateCurvePoint p;
        p.N = 1L << e;
        p.mean_excess = 3.0 * std::pow(static_cast<double>(p.N), -0.5);
        exact.push_back(p);
    }
    auto fit = fit_rate(exact, 0, exact.size() - 1);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-9));

    SUBCASE("two points give the exact two-point slope") {
        std::vector<RateCurvePoint> two = {{32, 0.4, 0, 0, 1}, {64, 0.2, 0, 0, 1}};
        CHECK(fit_rate(two, 0, 1).slope == doctest::Approx(-1.0).epsilon(1e-12));
    }

    SUBCASE("log-factor curve fits shallower than -1/2") {
        std::vector<RateCurvePoint> curve;
        for (int e = 5; e <= 12; ++e) {
            RateCurvePoint p;
            p.N = 1L << e;
            double n = static_cast<double>(p.N);
            p.mean_excess = 0.7 * std::pow(n, -0.5) * std::pow(std::log2(n), 1.5);
            curve.push_back(p);
        }
        auto f = fit_rate(curve, 0, curve.size() - 1);
        CHECK(f.slope > -0.5);
        CHECK(f.slope < -0.2);
    }

    SUBCASE("nonpositive excess values are excluded and counted") {
        std::vector<RateCurvePoint> curve = {{32, 0.4, 0, 0, 1}, {64, -0.01, 0, 0, 1}, {128, 0.1, 0, 0, 1}};
        auto f = fit_rate(curve, 0, 2);
        CHECK(f.n_excluded == 1);
        CHECK(f.n_used == 2);
        CHECK_THROWS_AS(fit_rate({{32, -0.1, 0, 0, 1}, {64, -0.1, 0, 0, 1}}, 0, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("misclassification risk is permutation invariant in the test set") {
    auto spec = make_cosine_spec(1.5);
    auto ds = generate_dataset(spec, Balanced{12}, 10, 1.0, 55);
    auto oracle = bayes_oracle(spec);
    auto base = misclassification_risk(oracle, ds);
    LabeledDataset shuffled = ds;
    for (auto& cls : shuffled.paths) std::reverse(cls.begin(), cls.end());
    auto perm = misclassification_risk(oracle, shuffled);
    CHECK(perm.error_rate == base.error_rate);
}
