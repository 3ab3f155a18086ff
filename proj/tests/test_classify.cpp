#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "driftclass/classify.hpp"
#include "driftclass/sde.hpp"

using namespace driftclass;

namespace {

Trajectory make_traj(int dim, std::vector<double> states, double delta) {
    Trajectory t;
    t.dim = dim;
    t.steps = static_cast<int>(states.size() / dim) - 1;
    t.delta = delta;
    t.horizon = delta * t.steps;
    t.states = std::move(states);
    return t;
}

ModelSpec two_constant_drifts(double c) {
    ModelSpec spec;
    spec.d = 1;
    spec.num_classes = 2;
    CustomDrift drift;
    drift.fields.push_back([c](const Vec&) { return Vec{c}; });
    drift.fields.push_back([c](const Vec&) { return Vec{-c}; });
    spec.drift = std::move(drift);
    spec.sigma = IdentitySigma{};
    spec.initial_law = PointMassInit{{0.0}};
    spec.priors = {0.5, 0.5};
    return spec;
}

}  // namespace

TEST_CASE("zero drift scores zero") {
    auto spec = two_constant_drifts(0.0);
    auto traj = make_traj(1, {0.0, 0.3, -0.2, 0.5}, 0.1);
    DriftEvaluator zero = [](const Vec&) { return Vec{0.0}; };
    CHECK(score_discretized(zero, spec, traj) == 0.0);
}

TEST_CASE("one-step constant drift score") {
    auto spec = two_constant_drifts(1.0);
    auto traj = make_traj(1, {0.0, 1.0}, 1.0);
    CHECK(score_discretized(true_drift(spec, 1), spec, traj) == doctest::Approx(0.5).epsilon(1e-12));
    // general c: c*1 - c^2/2
    auto spec3 = two_constant_drifts(3.0);
    CHECK(score_discretized(true_drift(spec3, 1), spec3, traj) ==
          doctest::Approx(3.0 - 4.5).epsilon(1e-12));
}

TEST_CASE("score kernel matches a brute-force loop with explicit inversion") {
    const int d = 3;
    for (int instance = 0; instance < 100; ++instance) {
        Rng rng = make_rng(2024, static_cast<std::uint64_t>(instance));
        std::uniform_real_distribution<double> unif(-1.0, 1.0);

        // dense random sigma with a dominant diagonal so sigma sigma^T is well conditioned
        Mat sigma_mat(9);
        for (double& v : sigma_mat) v = 0.3 * unif(rng);
        for (int i = 0; i < d; ++i) sigma_mat[static_cast<std::size_t>(i) * d + i] += 1.0;

        ModelSpec spec;
        spec.d = d;
        spec.num_classes = 1;
        CustomDrift drift_spec;
        // affine drift with random coefficients
        Mat A(9);
        Vec c(d);
        for (double& v : A) v = unif(rng);
        for (double& v : c) v = unif(rng);
        drift_spec.fields.push_back([A, c, d](const Vec& x) {
            Vec b(d, 0.0);
            for (int i = 0; i < d; ++i) {
                b[i] = c[i];
                for (int j = 0; j < d; ++j) b[i] += A[static_cast<std::size_t>(i) * d + j] * x[j];
            }
            return b;
        });
        spec.drift = std::move(drift_spec);
        // sigma varies with x through a bounded scale factor
        spec.sigma = CustomMatrixSigma{[sigma_mat, d](const Vec& x) {
            double scale = 1.0 + 0.1 * std::sin(x[0]);
            Mat m = sigma_mat;
            for (double& v : m) v *= scale;
            return m;
        }};
        spec.initial_law = PointMassInit{Vec(d, 0.0)};
        spec.priors = {1.0};

        const int M = 7;
        std::vector<double> states(static_cast<std::size_t>(M + 1) * d);
        for (double& v : states) v = unif(rng);
        auto traj = make_traj(d, states, 0.05);

        // independent oracle: explicit per-step matrix inversion
        double expected = 0.0;
        for (int m = 0; m < M; ++m) {
            Vec x(traj.state(m), traj.state(m) + d);
            Vec b = eval_drift(spec, 1, x);
            Mat sg = eval_sigma(spec, x);
            Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>> S(sg.data());
            Eigen::Matrix3d a_inv = (S * S.transpose()).inverse();
            Eigen::Map<const Eigen::Vector3d> bv(b.data());
            Eigen::Vector3d dx;
            for (int i = 0; i < d; ++i) dx[i] = traj.state(m + 1)[i] - traj.state(m)[i];
            expected += bv.dot(a_inv * dx);
            expected -= 0.5 * traj.delta * bv.dot(a_inv * bv);
        }
        double got = score_discretized(true_drift(spec, 1), spec, traj);
        CHECK(got == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("score is additive over contiguous path segments") {
    auto spec = make_cosine_spec(2.5);
    Rng rng = make_rng(17);
    auto traj = simulate_path(spec, 2, 40, 1.0, rng);
    double full = score_discretized(true_drift(spec, 2), spec, traj);

    auto head = make_traj(1, {traj.states.begin(), traj.states.begin() + 21}, traj.delta);
    auto tail = make_traj(1, {traj.states.begin() + 20, traj.states.end()}, traj.delta);
    double split = score_discretized(true_drift(spec, 2), spec, head) +
                   score_discretized(true_drift(spec, 2), spec, tail);
    CHECK(split == doctest::Approx(full).epsilon(1e-12));
}

TEST_CASE("posteriors") {
    auto p = posteriors({1.0, 1.0, 1.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    for (double v : p) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-12));

    auto q = posteriors({std::log(2.0), 0.0}, {0.5, 0.5});
    CHECK(q[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));

    SUBCASE("shift invariance") {
        ClassScores s = {3.0, -1.0, 0.5};
        std::vector<double> priors = {0.2, 0.3, 0.5};
        auto base = posteriors(s, priors);
        ClassScores shifted = {3.0 + 1234.5, -1.0 + 1234.5, 0.5 + 1234.5};
        auto moved = posteriors(shifted, priors);
        for (int k = 0; k < 3; ++k) CHECK(moved[k] == doctest::Approx(base[k]).epsilon(1e-12));
    }

    SUBCASE("huge scores do not overflow") {
        auto big = posteriors({1e6, 1e6 - 3.0}, {0.5, 0.5});
        CHECK(big[0] + big[1] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(big[0] > big[1]);
    }
}

TEST_CASE("classify argmax with smallest-label ties") {
    CHECK(classify({0.2, 0.5, 0.3}) == 2);
    CHECK(classify({0.5, 0.5}) == 1);
    CHECK(classify({1e-9, 1.0 - 2e-9, 1e-9}) == 2);
}

TEST_CASE("bayes oracle on one class always answers that class") {
    ModelSpec spec;
    spec.d = 1;
    spec.num_classes = 1;
    CustomDrift drift;
    drift.fields.push_back([](const Vec& x) { return Vec{-x[0]}; });
    spec.drift = std::move(drift);
    spec.sigma = IdentitySigma{};
    spec.initial_law = PointMassInit{{0.0}};
    spec.priors = {1.0};
    auto oracle = bayes_oracle(spec);
    Rng rng = make_rng(3);
    auto traj = simulate_path(spec, 1, 20, 1.0, rng);
    CHECK(oracle(traj) == 1);
}

TEST_CASE("well separated constant drifts are classified almost perfectly") {
    auto spec = two_constant_drifts(5.0);
    auto oracle = bayes_oracle(spec);
    int correct = 0, total = 0;
    for (int k = 1; k <= 2; ++k) {
        for (int n = 0; n < 500; ++n) {
            Rng rng = make_rng(888, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(n));
            auto traj = simulate_path(spec, k, 100, 1.0, rng);
            correct += (oracle(traj) == k);
            ++total;
        }
    }
    CHECK(static_cast<double>(correct) / total > 0.99);
}

TEST_CASE("plug-in with true drifts equals the bayes oracle path by path") {
    auto spec = make_cosine_spec(1.5);
    auto oracle = bayes_oracle(spec);
    std::vector<DriftEvaluator> drifts;
    for (int k = 1; k <= 3; ++k) drifts.push_back(true_drift(spec, k));
    auto plugin = make_plugin_classifier(spec, std::move(drifts), spec.priors);
    for (int k = 1; k <= 3; ++k)
        for (int n = 0; n < 50; ++n) {
            Rng rng = make_rng(404, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(n));
            auto traj = simulate_path(spec, k, 50, 1.0, rng);
            CHECK(plugin(traj) == oracle(traj));
        }
}

TEST_CASE("binary equal-prior classification reduces to score comparison") {
    auto spec = two_constant_drifts(1.3);
    auto oracle = bayes_oracle(spec);
    for (int n = 0; n < 100; ++n) {
        Rng rng = make_rng(555, static_cast<std::uint64_t>(n));
        auto traj = simulate_path(spec, 1 + (n % 2), 30, 1.0, rng);
        double s1 = score_discretized(true_drift(spec, 1), spec, traj);
        double s2 = score_discretized(true_drift(spec, 2), spec, traj);
        CHECK(oracle(traj) == (s1 >= s2 ? 1 : 2));
    }
}

TEST_CASE("classify is invariant under strictly increasing score transforms") {
    std::vector<double> priors = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    for (int n = 0; n < 50; ++n) {
        Rng rng = make_rng(606, static_cast<std::uint64_t>(n));
        std::uniform_real_distribution<double> unif(-5.0, 5.0);
        ClassScores s = {unif(rng), unif(rng), unif(rng)};
        ClassScores warped = {std::atan(s[0]), std::atan(s[1]), std::atan(s[2])};
        CHECK(classify(posteriors(s, priors)) == classify(posteriors(warped, priors)));
    }
}
