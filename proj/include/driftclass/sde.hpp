#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "driftclass/rng.hpp"

namespace driftclass {

using Vec = std::vector<double>;
// Row-major d x d matrix.
using Mat = std::vector<double>;

inline double std_normal_pdf(double u) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * u * u);
}

// b_k(x) = -x + bump(theta * (mean(x) + alpha_k)) * 1_d.
// `bump` defaults to the standard normal density; overridable.
struct DoubleLayerDrift {
    double theta = 5.0;
    std::vector<double> alphas;
    std::function<double(double)> bump = std_normal_pdf;
};

// b_k(x) = alpha_k * theta * (1/4 + 3/4 cos^2 x), scalar only.
struct CosineSquaredDrift {
    double theta = 1.0;
    std::vector<double> alphas;
};

struct CustomDrift {
    std::vector<std::function<Vec(const Vec&)>> fields;  // one per class
};

using DriftSpec = std::variant<DoubleLayerDrift, CosineSquaredDrift, CustomDrift>;

struct IdentitySigma {};
// sigma(x) = 0.1 + 0.9 / sqrt(1 + x^2), scalar only.
struct ScalarFnSigma {};
struct CustomMatrixSigma {
    std::function<Mat(const Vec&)> fn;
};

using SigmaSpec = std::variant<IdentitySigma, ScalarFnSigma, CustomMatrixSigma>;

struct StandardGaussianInit {};
struct PointMassInit {
    Vec point;
};

using InitialLaw = std::variant<StandardGaussianInit, PointMassInit>;

struct ModelSpec {
    int d = 1;
    int num_classes = 1;
    DriftSpec drift = CustomDrift{};
    SigmaSpec sigma = IdentitySigma{};
    InitialLaw initial_law = StandardGaussianInit{};
    std::vector<double> priors;

    void validate() const {
        if (d <= 0) throw std::invalid_argument("ModelSpec: dimension must be positive");
        if (num_classes <= 0) throw std::invalid_argument("ModelSpec: num_classes must be positive");
        if (static_cast<int>(priors.size()) != num_classes)
            throw std::invalid_argument("ModelSpec: priors size must equal num_classes");
        double s = std::accumulate(priors.begin(), priors.end(), 0.0);
        if (std::abs(s - 1.0) > 1e-12)
            throw std::invalid_argument("ModelSpec: priors must sum to 1");
        for (double p : priors)
            if (p <= 0.0) throw std::invalid_argument("ModelSpec: every prior must be > 0");
        if (const auto* dl = std::get_if<DoubleLayerDrift>(&drift)) {
            if (static_cast<int>(dl->alphas.size()) != num_classes)
                throw std::invalid_argument("ModelSpec: DoubleLayer alphas size must equal num_classes");
        } else if (const auto* cs = std::get_if<CosineSquaredDrift>(&drift)) {
            if (static_cast<int>(cs->alphas.size()) != num_classes)
                throw std::invalid_argument("ModelSpec: CosineSquared alphas size must equal num_classes");
            if (d != 1)
                throw std::invalid_argument("ModelSpec: CosineSquared drift requires d = 1");
        } else {
            const auto& cd = std::get<CustomDrift>(drift);
            if (static_cast<int>(cd.fields.size()) != num_classes)
                throw std::invalid_argument("ModelSpec: Custom drift needs one field per class");
        }
        if (std::holds_alternative<ScalarFnSigma>(sigma) && d != 1)
            throw std::invalid_argument("ModelSpec: ScalarFn sigma requires d = 1");
        if (const auto* pm = std::get_if<PointMassInit>(&initial_law)) {
            if (static_cast<int>(pm->point.size()) != d)
                throw std::invalid_argument("ModelSpec: PointMass dimension mismatch");
        }
    }
};

struct Trajectory {
    Vec states;  // (M+1) x d, row-major
    int dim = 0;
    int steps = 0;  // M
    double delta = 0.0;
    double horizon = 0.0;

    const double* state(int m) const { return states.data() + static_cast<std::size_t>(m) * dim; }
    double* state(int m) { return states.data() + static_cast<std::size_t>(m) * dim; }

    void validate() const {
        if (dim <= 0 || steps < 1) throw std::invalid_argument("Trajectory: bad shape");
        if (states.size() != static_cast<std::size_t>(steps + 1) * dim)
            throw std::invalid_argument("Trajectory: state grid must have M+1 rows");
        if (std::abs(delta * steps - horizon) > 1e-12)
            throw std::invalid_argument("Trajectory: delta * M must equal T");
    }
};

struct LabeledDataset {
    std::vector<std::vector<Trajectory>> paths;  // [class][n]
    std::uint64_t seed = 0;

    int num_classes() const { return static_cast<int>(paths.size()); }
    std::vector<int> class_counts() const {
        std::vector<int> c(paths.size());
        for (std::size_t k = 0; k < paths.size(); ++k) c[k] = static_cast<int>(paths[k].size());
        return c;
    }
    int total() const {
        int n = 0;
        for (const auto& p : paths) n += static_cast<int>(p.size());
        return n;
    }
};

struct SimulationError : std::runtime_error {
    int step;
    explicit SimulationError(int step_)
        : std::runtime_error("non-finite state at simulation step " + std::to_string(step_)),
          step(step_) {}
};

inline Vec eval_drift(const ModelSpec& spec, int k, const Vec& x) {
    if (k < 1 || k > spec.num_classes) throw std::invalid_argument("eval_drift: unknown label");
    if (static_cast<int>(x.size()) != spec.d) throw std::invalid_argument("eval_drift: dimension mismatch");
    if (const auto* dl = std::get_if<DoubleLayerDrift>(&spec.drift)) {
        double s = std::accumulate(x.begin(), x.end(), 0.0) / spec.d;
        double bump = dl->bump(dl->theta * (s + dl->alphas[k - 1]));
        Vec b(spec.d);
        for (int i = 0; i < spec.d; ++i) b[i] = -x[i] + bump;
        return b;
    }
    if (const auto* cs = std::get_if<CosineSquaredDrift>(&spec.drift)) {
        double c = std::cos(x[0]);
        return {cs->alphas[k - 1] * cs->theta * (0.25 + 0.75 * c * c)};
    }
    const auto& cd = std::get<CustomDrift>(spec.drift);
    Vec b = cd.fields[k - 1](x);
    if (static_cast<int>(b.size()) != spec.d)
        throw std::invalid_argument("eval_drift: custom field dimension mismatch");
    return b;
}

inline Mat eval_sigma(const ModelSpec& spec, const Vec& x) {
    if (static_cast<int>(x.size()) != spec.d) throw std::invalid_argument("eval_sigma: dimension mismatch");
    if (std::holds_alternative<IdentitySigma>(spec.sigma)) {
        Mat m(static_cast<std::size_t>(spec.d) * spec.d, 0.0);
        for (int i = 0; i < spec.d; ++i) m[static_cast<std::size_t>(i) * spec.d + i] = 1.0;
        return m;
    }
    if (std::holds_alternative<ScalarFnSigma>(spec.sigma)) {
        return {0.1 + 0.9 / std::sqrt(1.0 + x[0] * x[0])};
    }
    Mat m = std::get<CustomMatrixSigma>(spec.sigma).fn(x);
    if (m.size() != static_cast<std::size_t>(spec.d) * spec.d)
        throw std::invalid_argument("eval_sigma: matrix dimension mismatch");
    return m;
}

inline Vec sample_initial(const ModelSpec& spec, Rng& rng) {
    if (const auto* pm = std::get_if<PointMassInit>(&spec.initial_law)) return pm->point;
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec x(spec.d);
    for (int i = 0; i < spec.d; ++i) x[i] = gauss(rng);
    return x;
}

inline Trajectory simulate_path(const ModelSpec& spec, int k, int steps, double horizon, Rng& rng) {
    if (steps < 1) throw std::invalid_argument("simulate_path: M must be >= 1");
    if (horizon <= 0.0) throw std::invalid_argument("simulate_path: T must be positive");
    const int d = spec.d;
    Trajectory traj;
    traj.dim = d;
    traj.steps = steps;
    traj.horizon = horizon;
    traj.delta = horizon / steps;
    traj.states.resize(static_cast<std::size_t>(steps + 1) * d);

    const double sqrt_delta = std::sqrt(traj.delta);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Vec x = sample_initial(spec, rng);
    std::copy(x.begin(), x.end(), traj.state(0));
    Vec noise(d);
    const bool identity_sigma = std::holds_alternative<IdentitySigma>(spec.sigma);
    for (int m = 0; m < steps; ++m) {
        Vec b = eval_drift(spec, k, x);
        for (int i = 0; i < d; ++i) noise[i] = gauss(rng);
        if (identity_sigma) {
            for (int i = 0; i < d; ++i) x[i] += b[i] * traj.delta + sqrt_delta * noise[i];
        } else {
            Mat s = eval_sigma(spec, x);
            for (int i = 0; i < d; ++i) {
                double diff = 0.0;
                for (int j = 0; j < d; ++j) diff += s[static_cast<std::size_t>(i) * d + j] * noise[j];
                x[i] += b[i] * traj.delta + sqrt_delta * diff;
            }
        }
        for (int i = 0; i < d; ++i)
            if (!std::isfinite(x[i])) throw SimulationError(m + 1);
        std::copy(x.begin(), x.end(), traj.state(m + 1));
    }
    return traj;
}

struct Balanced {
    int total;  // N, divided evenly across classes
};
struct Multinomial {
    int total;  // N trials over the spec priors
};
using SizeMode = std::variant<Balanced, Multinomial>;

// Sequential binomial conditioning; exact multinomial law.
inline std::vector<int> sample_multinomial(int trials, const std::vector<double>& probs, Rng& rng) {
    std::vector<int> counts(probs.size(), 0);
    double remaining_mass = 1.0;
    int remaining = trials;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
        if (remaining == 0) break;
        double p = probs[k] / remaining_mass;
        p = std::min(1.0, std::max(0.0, p));
        std::binomial_distribution<int> binom(remaining, p);
        counts[k] = binom(rng);
        remaining -= counts[k];
        remaining_mass -= probs[k];
    }
    counts.back() = remaining;
    return counts;
}

inline LabeledDataset generate_dataset(const ModelSpec& spec, const SizeMode& sizes, int steps,
                                       double horizon, std::uint64_t seed) {
    spec.validate();
    const int K = spec.num_classes;
    std::vector<int> counts(K);
    if (const auto* bal = std::get_if<Balanced>(&sizes)) {
        if (bal->total % K != 0)
            throw std::invalid_argument("generate_dataset: Balanced size not divisible by K");
        std::fill(counts.begin(), counts.end(), bal->total / K);
    } else {
        const auto& mn = std::get<Multinomial>(sizes);
        Rng rng = make_rng(seed, purpose_tag("class-sizes"));
        counts = sample_multinomial(mn.total, spec.priors, rng);
    }
    LabeledDataset ds;
    ds.seed = seed;
    ds.paths.resize(K);
    for (int k = 1; k <= K; ++k) {
        ds.paths[k - 1].reserve(counts[k - 1]);
        for (int n = 0; n < counts[k - 1]; ++n) {
            Rng rng = make_rng(seed, purpose_tag("path"), static_cast<std::uint64_t>(k),
                               static_cast<std::uint64_t>(n));
            ds.paths[k - 1].push_back(simulate_path(spec, k, steps, horizon, rng));
        }
    }
    return ds;
}

// Presets used throughout the experiments.
inline ModelSpec make_double_layer_spec(int d, double theta = 5.0) {
    ModelSpec spec;
    spec.d = d;
    spec.num_classes = 3;
    spec.drift = DoubleLayerDrift{theta, {0.0, 1.0, -1.0}, std_normal_pdf};
    spec.sigma = IdentitySigma{};
    spec.initial_law = StandardGaussianInit{};
    spec.priors = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    return spec;
}

inline ModelSpec make_cosine_spec(double theta) {
    ModelSpec spec;
    spec.d = 1;
    spec.num_classes = 3;
    spec.drift = CosineSquaredDrift{theta, {1.0 / theta, 1.0, -1.0}};
    spec.sigma = ScalarFnSigma{};
    spec.initial_law = PointMassInit{{0.0}};
    spec.priors = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    return spec;
}

}  // namespace driftclass
