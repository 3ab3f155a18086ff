#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "driftclass/rng.hpp"
#include "driftclass/sde.hpp"

namespace driftclass {

struct Box {
    Vec lo, hi;  // empty -> unbounded

    bool unbounded() const { return lo.empty(); }
    bool contains(const double* x, int d) const {
        if (unbounded()) return true;
        for (int i = 0; i < d; ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
};

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 256;
    int max_epochs = 200;
    int patience = 20;
    double val_fraction = 0.5;
    int retrain_multiplier = 2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double improvement_threshold = 1e-6;
    std::uint64_t seed = 0;

    void validate() const {
        if (val_fraction <= 0.0 || val_fraction >= 1.0)
            throw std::invalid_argument("TrainConfig: val_fraction must be in (0,1)");
        if (patience > max_epochs)
            throw std::invalid_argument("TrainConfig: patience must not exceed max_epochs");
        if (learning_rate <= 0.0 || batch_size < 1 || max_epochs < 1)
            throw std::invalid_argument("TrainConfig: bad optimizer settings");
    }
};

// Sparse ReLU network restricted to a support box, outputs clamped to [-F, F].
// widths = (p_0, ..., p_{L+1}); weights[j] is p_{j+1} x p_j row-major; shifts[j]
// is the shift vector applied after weights[j] (absent for the output layer).
struct MlpParams {
    std::vector<int> widths;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> shifts;
    std::vector<std::vector<std::uint8_t>> weight_mask;
    std::vector<std::vector<std::uint8_t>> shift_mask;
    double s_ratio = 1.0;
    double clamp = 1.0;  // F
    Box support;

    int num_layers() const { return static_cast<int>(widths.size()) - 2; }  // L
    int input_dim() const { return widths.front(); }

    std::size_t total_params() const {
        std::size_t n = 0;
        for (const auto& w : weights) n += w.size();
        for (const auto& v : shifts) n += v.size();
        return n;
    }
    std::size_t nonzero_params() const {
        std::size_t n = 0;
        for (const auto& w : weights)
            for (double x : w) n += (x != 0.0);
        for (const auto& v : shifts)
            for (double x : v) n += (x != 0.0);
        return n;
    }
    double max_abs_param() const {
        double m = 0.0;
        for (const auto& w : weights)
            for (double x : w) m = std::max(m, std::abs(x));
        for (const auto& v : shifts)
            for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
};

inline MlpParams make_mlp(const std::vector<int>& widths, double s_ratio, double clamp, Box support,
                          Rng& rng) {
    if (widths.size() < 2) throw std::invalid_argument("make_mlp: need at least input and output widths");
    if (widths.back() != 1) throw std::invalid_argument("make_mlp: output width must be 1");
    MlpParams mlp;
    mlp.widths = widths;
    mlp.s_ratio = s_ratio;
    mlp.clamp = clamp;
    mlp.support = std::move(support);
    const int num_mats = static_cast<int>(widths.size()) - 1;
    mlp.weights.resize(num_mats);
    mlp.weight_mask.resize(num_mats);
    mlp.shifts.resize(num_mats - 1);
    mlp.shift_mask.resize(num_mats - 1);
    for (int j = 0; j < num_mats; ++j) {
        const std::size_t n = static_cast<std::size_t>(widths[j + 1]) * widths[j];
        double a = std::min(1.0, std::sqrt(6.0 / (widths[j] + widths[j + 1])));
        std::uniform_real_distribution<double> unif(-a, a);
        mlp.weights[j].resize(n);
        for (double& w : mlp.weights[j]) w = unif(rng);
        mlp.weight_mask[j].assign(n, 1);
        if (j + 1 < num_mats) {
            // Nonzero init: zero shifts would all be pruned at the first
            // projection and, with masked gradients, could never recover.
            mlp.shifts[j].resize(widths[j + 1]);
            for (double& v : mlp.shifts[j]) v = unif(rng);
            mlp.shift_mask[j].assign(widths[j + 1], 1);
        }
    }
    return mlp;
}

// Clip to [-1,1], then keep the ceil(s_ratio * total) largest magnitudes.
// Ties break toward the earlier parameter in (layer, index) order.
inline void project_sparse_clip(MlpParams& mlp) {
    auto clip = [](double x) { return std::max(-1.0, std::min(1.0, x)); };
    for (auto& w : mlp.weights)
        for (double& x : w) x = clip(x);
    for (auto& v : mlp.shifts)
        for (double& x : v) x = clip(x);

    const std::size_t total = mlp.total_params();
    const std::size_t budget =
        static_cast<std::size_t>(std::ceil(mlp.s_ratio * static_cast<double>(total)));

    std::vector<double*> params;
    params.reserve(total);
    std::vector<std::uint8_t*> masks;
    masks.reserve(total);
    for (std::size_t j = 0; j < mlp.weights.size(); ++j) {
        for (std::size_t i = 0; i < mlp.weights[j].size(); ++i) {
            params.push_back(&mlp.weights[j][i]);
            masks.push_back(&mlp.weight_mask[j][i]);
        }
        if (j < mlp.shifts.size())
            for (std::size_t i = 0; i < mlp.shifts[j].size(); ++i) {
                params.push_back(&mlp.shifts[j][i]);
                masks.push_back(&mlp.shift_mask[j][i]);
            }
    }
    if (budget >= total) {
        for (auto* m : masks) *m = 1;
        return;
    }
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    std::nth_element(order.begin(), order.begin() + budget, order.end(),
                     [&](std::size_t a, std::size_t b) {
                         double ma = std::abs(*params[a]), mb = std::abs(*params[b]);
                         if (ma != mb) return ma > mb;
                         return a < b;
                     });
    for (std::size_t r = 0; r < total; ++r) {
        std::size_t i = order[r];
        if (r < budget) {
            *masks[i] = 1;
        } else {
            *masks[i] = 0;
            *params[i] = 0.0;
        }
    }
}

inline double forward(const MlpParams& mlp, const Vec& x) {
    if (static_cast<int>(x.size()) != mlp.input_dim())
        throw std::invalid_argument("forward: input width mismatch");
    if (!mlp.support.contains(x.data(), mlp.input_dim())) return 0.0;
    const int num_mats = static_cast<int>(mlp.widths.size()) - 1;
    Vec a = x, z;
    for (int j = 0; j < num_mats; ++j) {
        const int rows = mlp.widths[j + 1], cols = mlp.widths[j];
        z.assign(rows, 0.0);
        const double* w = mlp.weights[j].data();
        for (int o = 0; o < rows; ++o) {
            double acc = 0.0;
            for (int i = 0; i < cols; ++i) acc += w[static_cast<std::size_t>(o) * cols + i] * a[i];
            z[o] = acc;
        }
        if (j + 1 < num_mats) {
            for (int o = 0; o < rows; ++o) z[o] = std::max(0.0, z[o] - mlp.shifts[j][o]);
        }
        a.swap(z);
    }
    return std::max(-mlp.clamp, std::min(mlp.clamp, a[0]));
}

struct Grads {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> shifts;
};

// Scratch buffers for batched forward/backward over flattened (state, target) pairs.
struct MlpWorkspace {
    std::vector<std::vector<double>> acts;    // a_j, batch-major (B x p_j)
    std::vector<std::vector<double>> deltas;  // dL/dz_j
    std::vector<double> out_raw;
    std::vector<std::uint8_t> in_box;
};

// Mean squared-error gradient over the batch; pruned parameters get zero
// gradient, clamp saturation and out-of-box inputs cut the sample's gradient.
inline double forward_backward_batch(const MlpParams& mlp, const double* X, const double* y,
                                     int batch, Grads* grads, MlpWorkspace& ws) {
    const int num_mats = static_cast<int>(mlp.widths.size()) - 1;
    const int d = mlp.input_dim();
    ws.acts.resize(num_mats + 1);
    ws.acts[0].assign(X, X + static_cast<std::size_t>(batch) * d);
    ws.in_box.resize(batch);
    for (int b = 0; b < batch; ++b)
        ws.in_box[b] = mlp.support.contains(X + static_cast<std::size_t>(b) * d, d);

    for (int j = 0; j < num_mats; ++j) {
        const int rows = mlp.widths[j + 1], cols = mlp.widths[j];
        ws.acts[j + 1].assign(static_cast<std::size_t>(batch) * rows, 0.0);
        const double* w = mlp.weights[j].data();
        const double* a = ws.acts[j].data();
        double* out = ws.acts[j + 1].data();
        for (int b = 0; b < batch; ++b) {
            const double* ab = a + static_cast<std::size_t>(b) * cols;
            double* zb = out + static_cast<std::size_t>(b) * rows;
            for (int o = 0; o < rows; ++o) {
                const double* wo = w + static_cast<std::size_t>(o) * cols;
                double acc = 0.0;
                for (int i = 0; i < cols; ++i) acc += wo[i] * ab[i];
                zb[o] = acc;
            }
            if (j + 1 < num_mats) {
                const double* v = mlp.shifts[j].data();
                for (int o = 0; o < rows; ++o) zb[o] = std::max(0.0, zb[o] - v[o]);
            }
        }
    }

    // Clamped, box-restricted outputs and the mean squared loss.
    ws.out_raw.resize(batch);
    double loss = 0.0;
    const double F = mlp.clamp;
    for (int b = 0; b < batch; ++b) {
        double raw = ws.acts[num_mats][b];
        ws.out_raw[b] = raw;
        double pred = ws.in_box[b] ? std::max(-F, std::min(F, raw)) : 0.0;
        double r = pred - y[b];
        loss += r * r;
    }
    loss /= batch;
    if (!grads) return loss;

    grads->weights.resize(num_mats);
    grads->shifts.resize(num_mats - 1);
    for (int j = 0; j < num_mats; ++j) {
        grads->weights[j].assign(mlp.weights[j].size(), 0.0);
        if (j + 1 < num_mats) grads->shifts[j].assign(mlp.shifts[j].size(), 0.0);
    }

    ws.deltas.resize(num_mats + 1);
    ws.deltas[num_mats].assign(batch, 0.0);
    for (int b = 0; b < batch; ++b) {
        double raw = ws.out_raw[b];
        if (!ws.in_box[b] || raw > F || raw < -F) continue;
        ws.deltas[num_mats][b] = 2.0 * (raw - y[b]) / batch;
    }

    for (int j = num_mats - 1; j >= 0; --j) {
        const int rows = mlp.widths[j + 1], cols = mlp.widths[j];
        const double* dz = ws.deltas[j + 1].data();
        const double* a = ws.acts[j].data();
        double* gw = grads->weights[j].data();
        // dW_j[o][i] = sum_b dz[b][o] * a_j[b][i]
        for (int b = 0; b < batch; ++b) {
            const double* ab = a + static_cast<std::size_t>(b) * cols;
            const double* dzb = dz + static_cast<std::size_t>(b) * rows;
            for (int o = 0; o < rows; ++o) {
                double g = dzb[o];
                if (g == 0.0) continue;
                double* gwo = gw + static_cast<std::size_t>(o) * cols;
                for (int i = 0; i < cols; ++i) gwo[i] += g * ab[i];
            }
        }
        if (j > 0) {
            // Propagate: dL/da_j = W_j^T dz_{j+1}, gated by the ReLU (a_j > 0).
            ws.deltas[j].assign(static_cast<std::size_t>(batch) * cols, 0.0);
            double* da = ws.deltas[j].data();
            const double* w = mlp.weights[j].data();
            for (int b = 0; b < batch; ++b) {
                const double* dzb = dz + static_cast<std::size_t>(b) * rows;
                const double* ab = a + static_cast<std::size_t>(b) * cols;
                double* dab = da + static_cast<std::size_t>(b) * cols;
                for (int o = 0; o < rows; ++o) {
                    double g = dzb[o];
                    if (g == 0.0) continue;
                    const double* wo = w + static_cast<std::size_t>(o) * cols;
                    for (int i = 0; i < cols; ++i) dab[i] += g * wo[i];
                }
                for (int i = 0; i < cols; ++i) {
                    if (ab[i] <= 0.0) dab[i] = 0.0;  // ReLU subgradient at the kink: 0
                }
            }
            double* gv = grads->shifts[j - 1].data();
            for (int b = 0; b < batch; ++b) {
                const double* dab = da + static_cast<std::size_t>(b) * cols;
                for (int i = 0; i < cols; ++i) gv[i] -= dab[i];
            }
        }
    }

    // Pruned parameters receive zero gradient.
    for (int j = 0; j < num_mats; ++j) {
        for (std::size_t i = 0; i < grads->weights[j].size(); ++i)
            if (!mlp.weight_mask[j][i]) grads->weights[j][i] = 0.0;
        if (j + 1 < num_mats)
            for (std::size_t i = 0; i < grads->shifts[j].size(); ++i)
                if (!mlp.shift_mask[j][i]) grads->shifts[j][i] = 0.0;
    }
    return loss;
}

inline Grads grad(const MlpParams& mlp, const std::vector<Vec>& xs, const Vec& ys) {
    if (xs.empty()) throw std::invalid_argument("grad: empty minibatch");
    const int d = mlp.input_dim();
    std::vector<double> X(xs.size() * d);
    for (std::size_t b = 0; b < xs.size(); ++b)
        std::copy(xs[b].begin(), xs[b].end(), X.begin() + b * d);
    Grads g;
    MlpWorkspace ws;
    forward_backward_batch(mlp, X.data(), ys.data(), static_cast<int>(xs.size()), &g, ws);
    return g;
}

// Increment targets Y_m = (X_{m+1} - X_m) / delta, one row per step.
inline std::vector<double> compute_increment_targets(const Trajectory& traj) {
    std::vector<double> y(static_cast<std::size_t>(traj.steps) * traj.dim);
    for (int m = 0; m < traj.steps; ++m) {
        const double* a = traj.state(m);
        const double* b = traj.state(m + 1);
        for (int i = 0; i < traj.dim; ++i)
            y[static_cast<std::size_t>(m) * traj.dim + i] = (b[i] - a[i]) / traj.delta;
    }
    return y;
}

// Empirical loss over all (path, step) pairs of one class, coordinate i.
inline double loss(const MlpParams& mlp, const std::vector<Trajectory>& paths, int coord) {
    if (paths.empty()) throw std::invalid_argument("loss: empty dataset");
    double acc = 0.0;
    std::size_t count = 0;
    Vec x(mlp.input_dim());
    for (const auto& traj : paths) {
        auto targets = compute_increment_targets(traj);
        for (int m = 0; m < traj.steps; ++m) {
            const double* row = traj.state(m);
            x.assign(row, row + traj.dim);
            double r = forward(mlp, x) - targets[static_cast<std::size_t>(m) * traj.dim + coord];
            acc += r * r;
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

struct AdamState {
    std::vector<std::vector<double>> m_w, v_w, m_v, v_v;
    long step = 0;

    static AdamState like(const MlpParams& mlp) {
        AdamState s;
        s.m_w.resize(mlp.weights.size());
        s.v_w.resize(mlp.weights.size());
        for (std::size_t j = 0; j < mlp.weights.size(); ++j) {
            s.m_w[j].assign(mlp.weights[j].size(), 0.0);
            s.v_w[j].assign(mlp.weights[j].size(), 0.0);
        }
        s.m_v.resize(mlp.shifts.size());
        s.v_v.resize(mlp.shifts.size());
        for (std::size_t j = 0; j < mlp.shifts.size(); ++j) {
            s.m_v[j].assign(mlp.shifts[j].size(), 0.0);
            s.v_v[j].assign(mlp.shifts[j].size(), 0.0);
        }
        return s;
    }
};

inline void adam_update(std::vector<double>& p, const std::vector<double>& g,
                        std::vector<double>& m, std::vector<double>& v, const TrainConfig& cfg,
                        double bias1, double bias2) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        double mh = m[i] / bias1;
        double vh = v[i] / bias2;
        p[i] -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.adam_epsilon);
    }
}

inline void adam_step(MlpParams& mlp, const Grads& g, AdamState& state, const TrainConfig& cfg) {
    ++state.step;
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t j = 0; j < mlp.weights.size(); ++j)
        adam_update(mlp.weights[j], g.weights[j], state.m_w[j], state.v_w[j], cfg, bias1, bias2);
    for (std::size_t j = 0; j < mlp.shifts.size(); ++j)
        adam_update(mlp.shifts[j], g.shifts[j], state.m_v[j], state.v_v[j], cfg, bias1, bias2);
}

struct TrainMeta {
    int stop_epoch = 0;       // epoch at which early stopping fired (or max_epochs)
    int best_epoch = 0;       // epoch with the best validation loss
    int retrain_epochs = 0;
    bool early_stopped = false;
    double final_train_loss = std::numeric_limits<double>::quiet_NaN();
    double final_val_loss = std::numeric_limits<double>::quiet_NaN();
};

struct DriftEstimator {
    int label = 0;
    std::vector<MlpParams> nets;  // one per coordinate
    std::vector<TrainMeta> meta;

    int dim() const { return static_cast<int>(nets.size()); }
    Vec eval(const Vec& x) const {
        Vec b(nets.size());
        for (std::size_t i = 0; i < nets.size(); ++i) b[i] = forward(nets[i], x);
        return b;
    }
};

// Optional monitor invoked after every optimizer step (post-projection).
using TrainMonitor = std::function<void(const MlpParams&)>;

namespace detail {

// Flattened (state, target) pairs for one coordinate of one class.
struct FlatData {
    std::vector<double> X;  // n x d
    std::vector<double> y;  // n
    int d = 0;
    std::size_t size() const { return y.size(); }
};

inline FlatData flatten(const std::vector<Trajectory>& paths, const std::vector<int>& path_idx,
                        int coord) {
    FlatData fd;
    if (path_idx.empty()) return fd;
    fd.d = paths[path_idx[0]].dim;
    std::size_t n = 0;
    for (int p : path_idx) n += paths[p].steps;
    fd.X.reserve(n * fd.d);
    fd.y.reserve(n);
    for (int p : path_idx) {
        const Trajectory& t = paths[p];
        for (int m = 0; m < t.steps; ++m) {
            const double* row = t.state(m);
            fd.X.insert(fd.X.end(), row, row + t.dim);
            const double* next = t.state(m + 1);
            fd.y.push_back((next[coord] - row[coord]) / t.delta);
        }
    }
    return fd;
}

inline double full_loss(const MlpParams& mlp, const FlatData& fd, MlpWorkspace& ws) {
    if (fd.size() == 0) return 0.0;
    return forward_backward_batch(mlp, fd.X.data(), fd.y.data(), static_cast<int>(fd.size()),
                                  nullptr, ws);
}

// One pass over the shuffled pairs; projection after every optimizer step.
inline void run_epoch(MlpParams& mlp, AdamState& adam, const FlatData& fd,
                      std::vector<std::size_t>& order, const TrainConfig& cfg, Rng& rng,
                      MlpWorkspace& ws, std::vector<double>& bx, std::vector<double>& by,
                      Grads& grads, const TrainMonitor& monitor) {
    std::shuffle(order.begin(), order.end(), rng);
    const int d = fd.d;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
        const int bsz = static_cast<int>(std::min<std::size_t>(cfg.batch_size, order.size() - start));
        bx.resize(static_cast<std::size_t>(bsz) * d);
        by.resize(bsz);
        for (int b = 0; b < bsz; ++b) {
            std::size_t idx = order[start + b];
            std::copy(fd.X.begin() + idx * d, fd.X.begin() + (idx + 1) * d, bx.begin() + static_cast<std::size_t>(b) * d);
            by[b] = fd.y[idx];
        }
        forward_backward_batch(mlp, bx.data(), by.data(), bsz, &grads, ws);
        adam_step(mlp, grads, adam, cfg);
        project_sparse_clip(mlp);
        if (monitor) monitor(mlp);
    }
}

}  // namespace detail

inline MlpParams train_single_net(const std::vector<Trajectory>& paths, int coord,
                                  const std::vector<int>& widths, const TrainConfig& cfg,
                                  double s_ratio, double clamp, const Box& support,
                                  std::uint64_t seed, TrainMeta& meta,
                                  const TrainMonitor& monitor = nullptr) {
    const int n_paths = static_cast<int>(paths.size());
    std::vector<int> all_idx(n_paths);
    std::iota(all_idx.begin(), all_idx.end(), 0);

    Rng split_rng = make_rng(seed, purpose_tag("split"));
    std::vector<int> shuffled = all_idx;
    std::shuffle(shuffled.begin(), shuffled.end(), split_rng);
    int n_val = static_cast<int>(std::lround(cfg.val_fraction * n_paths));
    n_val = std::min(n_val, n_paths - 1);
    const bool degenerate = n_paths < 2 || n_val < 1;

    MlpWorkspace ws;
    std::vector<double> bx, by;
    Grads grads;

    auto train_for = [&](const detail::FlatData& fd, int epochs, std::uint64_t init_tag,
                         const detail::FlatData* val, MlpParams* out_best) -> MlpParams {
        Rng init_rng = make_rng(seed, purpose_tag("init"), init_tag);
        MlpParams mlp = make_mlp(widths, s_ratio, clamp, support, init_rng);
        project_sparse_clip(mlp);
        AdamState adam = AdamState::like(mlp);
        std::vector<std::size_t> order(fd.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle_rng = make_rng(seed, purpose_tag("shuffle"), init_tag);

        double best_val = std::numeric_limits<double>::infinity();
        int best_epoch = 0, since_improve = 0;
        for (int epoch = 1; epoch <= epochs; ++epoch) {
            detail::run_epoch(mlp, adam, fd, order, cfg, shuffle_rng, ws, bx, by, grads, monitor);
            if (val) {
                double vl = detail::full_loss(mlp, *val, ws);
                if (vl < best_val - cfg.improvement_threshold) {
                    best_val = vl;
                    best_epoch = epoch;
                    since_improve = 0;
                } else {
                    ++since_improve;
                }
                if (since_improve >= cfg.patience) {
                    meta.early_stopped = true;
                    meta.stop_epoch = epoch;
                    meta.best_epoch = best_epoch;
                    meta.final_val_loss = best_val;
                    return mlp;
                }
            }
        }
        if (val) {
            meta.stop_epoch = epochs;
            meta.best_epoch = best_epoch;
            meta.final_val_loss = best_val;
        }
        (void)out_best;
        return mlp;
    };

    if (degenerate) {
        auto fd = detail::flatten(paths, all_idx, coord);
        if (fd.size() == 0) throw std::invalid_argument("train_single_net: empty dataset");
        meta.stop_epoch = cfg.max_epochs;
        meta.retrain_epochs = cfg.max_epochs;
        MlpParams mlp = train_for(fd, cfg.max_epochs, 0, nullptr, nullptr);
        meta.final_train_loss = detail::full_loss(mlp, fd, ws);
        return mlp;
    }

    std::vector<int> val_idx(shuffled.begin(), shuffled.begin() + n_val);
    std::vector<int> train_idx(shuffled.begin() + n_val, shuffled.end());
    auto fd_train = detail::flatten(paths, train_idx, coord);
    auto fd_val = detail::flatten(paths, val_idx, coord);

    train_for(fd_train, cfg.max_epochs, 0, &fd_val, nullptr);

    // Retrain from scratch on the full data for twice the stopping epoch.
    auto fd_full = detail::flatten(paths, all_idx, coord);
    meta.retrain_epochs = cfg.retrain_multiplier * meta.stop_epoch;
    MlpParams mlp = train_for(fd_full, meta.retrain_epochs, 1, nullptr, nullptr);
    meta.final_train_loss = detail::full_loss(mlp, fd_full, ws);
    return mlp;
}

// Default support box: bounding box of the training states, 5% padding per side.
inline Box default_support_box(const std::vector<Trajectory>& paths) {
    Box box;
    if (paths.empty()) return box;
    const int d = paths[0].dim;
    box.lo.assign(d, std::numeric_limits<double>::infinity());
    box.hi.assign(d, -std::numeric_limits<double>::infinity());
    for (const auto& t : paths)
        for (int m = 0; m <= t.steps; ++m) {
            const double* row = t.state(m);
            for (int i = 0; i < d; ++i) {
                box.lo[i] = std::min(box.lo[i], row[i]);
                box.hi[i] = std::max(box.hi[i], row[i]);
            }
        }
    for (int i = 0; i < d; ++i) {
        double pad = 0.05 * std::max(box.hi[i] - box.lo[i], 1e-12);
        box.lo[i] -= pad;
        box.hi[i] += pad;
    }
    return box;
}

inline double default_output_clamp(const std::vector<Trajectory>& paths) {
    double max_target = 0.0;
    for (const auto& t : paths) {
        auto y = compute_increment_targets(t);
        for (double v : y) max_target = std::max(max_target, std::abs(v));
    }
    return std::max(1.0, 1.2 * max_target);
}

inline DriftEstimator train_drift_estimator(const std::vector<Trajectory>& class_paths, int label,
                                            const std::vector<int>& widths, const TrainConfig& cfg,
                                            double s_ratio, std::optional<double> clamp = {},
                                            std::optional<Box> support = {},
                                            const TrainMonitor& monitor = nullptr) {
    if (class_paths.empty()) throw std::invalid_argument("train_drift_estimator: empty dataset");
    cfg.validate();
    const int d = class_paths[0].dim;
    if (widths.front() != d)
        throw std::invalid_argument("train_drift_estimator: input width must equal d");
    const Box box = support ? *support : default_support_box(class_paths);
    const double F = clamp ? *clamp : default_output_clamp(class_paths);

    DriftEstimator est;
    est.label = label;
    est.nets.reserve(d);
    est.meta.resize(d);
    for (int i = 0; i < d; ++i) {
        std::uint64_t net_seed = derive_seed(cfg.seed, purpose_tag("coord"),
                                             static_cast<std::uint64_t>(label),
                                             static_cast<std::uint64_t>(i));
        est.nets.push_back(train_single_net(class_paths, i, widths, cfg, s_ratio, F, box, net_seed,
                                            est.meta[i], monitor));
    }
    return est;
}

inline std::vector<int> default_drift_widths(int d) { return {d, 16, 32, 32, 16, 1}; }

}  // namespace driftclass
