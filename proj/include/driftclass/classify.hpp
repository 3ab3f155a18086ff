#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "driftclass/nn.hpp"
#include "driftclass/sde.hpp"

namespace driftclass {

// Uniform view over true and estimated drifts.
using DriftEvaluator = std::function<Vec(const Vec&)>;

inline DriftEvaluator true_drift(const ModelSpec& spec, int k) {
    return [&spec, k](const Vec& x) { return eval_drift(spec, k, x); };
}

inline DriftEvaluator estimated_drift(const DriftEstimator& est) {
    return [&est](const Vec& x) { return est.eval(x); };
}

using ClassScores = std::vector<double>;
using Posteriors = std::vector<double>;

struct SingularDiffusionError : std::runtime_error {
    int step;
    explicit SingularDiffusionError(int step_)
        : std::runtime_error("singular diffusion matrix at grid point " + std::to_string(step_)),
          step(step_) {}
};

// Discretized Girsanov score:
//   sum_m b(X_m)^T (sigma sigma^T)^{-1}(X_m) (X_{m+1} - X_m)
//   - (delta/2) sum_m b(X_m)^T (sigma sigma^T)^{-1}(X_m) b(X_m).
inline double score_discretized(const DriftEvaluator& drift, const ModelSpec& spec,
                                const Trajectory& traj) {
    if (traj.dim != spec.d) throw std::invalid_argument("score_discretized: dimension mismatch");
    const int d = spec.d;
    const bool identity = std::holds_alternative<IdentitySigma>(spec.sigma);
    const bool scalar_fn = std::holds_alternative<ScalarFnSigma>(spec.sigma);
    double drift_term = 0.0, quad_term = 0.0;
    Vec x(d);
    for (int m = 0; m < traj.steps; ++m) {
        const double* row = traj.state(m);
        const double* next = traj.state(m + 1);
        x.assign(row, row + d);
        Vec b = drift(x);
        if (static_cast<int>(b.size()) != d)
            throw std::invalid_argument("score_discretized: drift dimension mismatch");
        if (identity) {
            for (int i = 0; i < d; ++i) {
                drift_term += b[i] * (next[i] - row[i]);
                quad_term += b[i] * b[i];
            }
        } else if (scalar_fn) {
            double s = 0.1 + 0.9 / std::sqrt(1.0 + x[0] * x[0]);
            double a = s * s;
            drift_term += b[0] * (next[0] - row[0]) / a;
            quad_term += b[0] * b[0] / a;
        } else {
            Mat sig = eval_sigma(spec, x);
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                S(sig.data(), d, d);
            Eigen::MatrixXd a = S * S.transpose();
            Eigen::LLT<Eigen::MatrixXd> llt(a);
            if (llt.info() != Eigen::Success) throw SingularDiffusionError(m);
            Eigen::Map<const Eigen::VectorXd> bv(b.data(), d);
            Eigen::VectorXd z = llt.solve(bv);  // a^{-1} b
            for (int i = 0; i < d; ++i) drift_term += z[i] * (next[i] - row[i]);
            quad_term += bv.dot(z);
        }
    }
    return drift_term - 0.5 * traj.delta * quad_term;
}

// Prior-weighted softmax, shifted by the max score for overflow safety.
inline Posteriors posteriors(const ClassScores& scores, const std::vector<double>& priors) {
    if (scores.size() != priors.size())
        throw std::invalid_argument("posteriors: scores/priors size mismatch");
    double max_score = *std::max_element(scores.begin(), scores.end());
    Posteriors out(scores.size());
    double total = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        out[k] = priors[k] * std::exp(scores[k] - max_score);
        total += out[k];
    }
    for (double& p : out) p /= total;
    return out;
}

// Smallest label attaining the maximum; labels are 1-based.
inline int classify(const Posteriors& post) {
    if (post.empty()) throw std::invalid_argument("classify: empty posteriors");
    int best = 0;
    for (std::size_t k = 1; k < post.size(); ++k)
        if (post[k] > post[best]) best = static_cast<int>(k);
    return best + 1;
}

using Classifier = std::function<int(const Trajectory&)>;

struct PluginClassifier {
    const ModelSpec* spec;
    std::vector<DriftEvaluator> drifts;  // one per class
    std::vector<double> priors;

    ClassScores scores(const Trajectory& traj) const {
        ClassScores s(drifts.size());
        for (std::size_t k = 0; k < drifts.size(); ++k)
            s[k] = score_discretized(drifts[k], *spec, traj);
        return s;
    }
    Posteriors posterior(const Trajectory& traj) const { return posteriors(scores(traj), priors); }
    int operator()(const Trajectory& traj) const { return classify(posterior(traj)); }
};

inline PluginClassifier make_plugin_classifier(const ModelSpec& spec,
                                               std::vector<DriftEvaluator> drifts,
                                               std::vector<double> priors) {
    if (priors.empty()) priors = spec.priors;
    return PluginClassifier{&spec, std::move(drifts), std::move(priors)};
}

inline PluginClassifier bayes_oracle(const ModelSpec& spec) {
    std::vector<DriftEvaluator> drifts;
    for (int k = 1; k <= spec.num_classes; ++k) drifts.push_back(true_drift(spec, k));
    return make_plugin_classifier(spec, std::move(drifts), spec.priors);
}

inline std::vector<double> empirical_priors(const LabeledDataset& ds) {
    auto counts = ds.class_counts();
    const double n = ds.total();
    std::vector<double> p(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) p[k] = counts[k] / n;
    return p;
}

}  // namespace driftclass
