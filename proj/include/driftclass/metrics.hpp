#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

#include "driftclass/classify.hpp"
#include "driftclass/sde.hpp"

namespace driftclass {

struct RiskEstimate {
    double error_rate = 0.0;
    int n_test = 0;
    std::vector<std::vector<int>> confusion;  // [true][predicted], 0-based
};

template <typename ClassifierFn>
RiskEstimate misclassification_risk(const ClassifierFn& classifier, const LabeledDataset& test) {
    if (test.total() == 0) throw std::invalid_argument("misclassification_risk: empty test set");
    const int K = test.num_classes();
    RiskEstimate r;
    r.confusion.assign(K, std::vector<int>(K, 0));
    int errors = 0;
    for (int k = 1; k <= K; ++k) {
        for (const auto& traj : test.paths[k - 1]) {
            int pred = classifier(traj);
            if (pred < 1 || pred > K)
                throw std::runtime_error("misclassification_risk: label out of range");
            r.confusion[k - 1][pred - 1] += 1;
            if (pred != k) ++errors;
        }
    }
    r.n_test = test.total();
    r.error_rate = static_cast<double>(errors) / r.n_test;
    return r;
}

// Not clamped at zero; Monte Carlo noise may push it slightly negative.
inline double excess_risk(const RiskEstimate& empirical, const RiskEstimate& bayes) {
    return empirical.error_rate - bayes.error_rate;
}

// Conditional (Rao-Blackwellized) excess risk. For Euler-Maruyama data the
// transition kernel is Gaussian, so the discretized score is the exact
// log-likelihood ratio and the oracle's softmax posteriors are the exact
// class posteriors pi*_k(X). Then
//   E[1{g(X) != Y} - 1{g*(X) != Y} | X] = max_k pi*_k(X) - pi*_{g(X)}(X),
// a pointwise-nonnegative quantity whose average estimates the same excess
// risk as the 0/1-loss difference but with the label noise integrated out.
template <typename ClassifierFn>
double conditional_excess_risk(const ClassifierFn& classifier, const PluginClassifier& oracle,
                               const LabeledDataset& test) {
    if (test.total() == 0) throw std::invalid_argument("conditional_excess_risk: empty test set");
    const int K = test.num_classes();
    double acc = 0.0;
    for (int k = 1; k <= K; ++k) {
        for (const auto& traj : test.paths[k - 1]) {
            Posteriors post = oracle.posterior(traj);
            int pred = classifier(traj);
            if (pred < 1 || pred > static_cast<int>(post.size()))
                throw std::runtime_error("conditional_excess_risk: label out of range");
            double best = *std::max_element(post.begin(), post.end());
            acc += best - post[pred - 1];
        }
    }
    return acc / test.total();
}

struct AllClasses {};
struct OneClass {
    int label;
};
using ErrorCondition = std::variant<AllClasses, OneClass>;

// Mean over selected paths of (1/M) sum_m |b_hat(X_m) - b(X_m)|^2.
inline double estimation_error(const DriftEvaluator& estimator, const DriftEvaluator& truth,
                               const LabeledDataset& paths, const ErrorCondition& condition) {
    double acc = 0.0;
    std::size_t n_paths = 0;
    for (int k = 1; k <= paths.num_classes(); ++k) {
        if (const auto* oc = std::get_if<OneClass>(&condition))
            if (oc->label != k) continue;
        for (const auto& traj : paths.paths[k - 1]) {
            double path_acc = 0.0;
            Vec x(traj.dim);
            for (int m = 0; m < traj.steps; ++m) {
                const double* row = traj.state(m);
                x.assign(row, row + traj.dim);
                Vec bh = estimator(x);
                Vec bt = truth(x);
                for (int i = 0; i < traj.dim; ++i) {
                    double diff = bh[i] - bt[i];
                    path_acc += diff * diff;
                }
            }
            acc += path_acc / traj.steps;
            ++n_paths;
        }
    }
    if (n_paths == 0) throw std::invalid_argument("estimation_error: empty selection");
    return acc / static_cast<double>(n_paths);
}

namespace detail {

inline double log_gamma(double x) { return std::lgamma(x); }

// Continued-fraction evaluation of the regularized incomplete beta function.
inline double beta_cf(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 1e-15, fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

inline double reg_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                      b * std::log(1.0 - x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace detail

inline double student_t_cdf(double t, double dof) {
    double x = dof / (dof + t * t);
    double tail = 0.5 * detail::reg_incomplete_beta(0.5 * dof, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

// Quantile by bisection on the CDF to 1e-10.
inline double student_t_quantile(double p, double dof) {
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("student_t_quantile: p must be in (0,1)");
    if (p == 0.5) return 0.0;
    double lo = -1.0, hi = 1.0;
    while (student_t_cdf(lo, dof) > p) lo *= 2.0;
    while (student_t_cdf(hi, dof) < p) hi *= 2.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, dof) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct ConfidenceInterval {
    double mean = 0.0, lower = 0.0, upper = 0.0;
};

inline ConfidenceInterval confidence_interval(const std::vector<double>& values,
                                              double level = 0.95) {
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("confidence_interval: need at least 2 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    double tq = student_t_quantile(1.0 - 0.5 * (1.0 - level), static_cast<double>(n - 1));
    double half = tq * sd / std::sqrt(static_cast<double>(n));
    return {mean, mean - half, mean + half};
}

struct RateCurvePoint {
    long N = 0;
    double mean_excess = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    int n_reps = 0;
};

// phi_N = max_i N^{-2 beta_i* / (2 beta_i* + t_i)}, beta_i* = beta_i prod_{l>i} min(beta_l, 1).
inline double phi_rate(const std::vector<double>& betas, const std::vector<double>& ts, double N) {
    if (betas.size() != ts.size() || betas.empty())
        throw std::invalid_argument("phi_rate: betas and ts must be same nonempty length");
    double best = 0.0;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        double beta_star = betas[i];
        for (std::size_t l = i + 1; l < betas.size(); ++l) beta_star *= std::min(betas[l], 1.0);
        double term = std::pow(N, -2.0 * beta_star / (2.0 * beta_star + ts[i]));
        best = std::max(best, term);
    }
    return best;
}

struct RateFit {
    double slope = 0.0;
    int n_used = 0;
    int n_excluded = 0;  // nonpositive excess values dropped from the log fit
};

// OLS slope of log2(mean_excess) on log2(N) over [first, last] indices.
inline RateFit fit_rate(const std::vector<RateCurvePoint>& points, std::size_t first,
                        std::size_t last) {
    if (last >= points.size() || first > last) throw std::invalid_argument("fit_rate: bad window");
    std::vector<double> xs, ys;
    int excluded = 0;
    for (std::size_t i = first; i <= last; ++i) {
        if (points[i].mean_excess <= 0.0) {
            ++excluded;
            continue;
        }
        xs.push_back(std::log2(static_cast<double>(points[i].N)));
        ys.push_back(std::log2(points[i].mean_excess));
    }
    if (xs.size() < 2) throw std::invalid_argument("fit_rate: fewer than 2 positive points in window");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return {sxy / sxx, static_cast<int>(xs.size()), excluded};
}

}  // namespace driftclass
