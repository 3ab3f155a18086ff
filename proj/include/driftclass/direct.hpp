#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "driftclass/nn.hpp"
#include "driftclass/rng.hpp"
#include "driftclass/sde.hpp"

namespace driftclass {

// Pathwise baseline: the flattened (M+1)*d grid goes straight into a dense
// two-hidden-layer ReLU network with a K-way softmax head.
struct DirectNetConfig {
    double learning_rate = 1e-3;
    double weight_decay = 0.0;
    int hidden1 = 32;
    int hidden2 = 32;
    int batch_size = 128;
};

struct DirectClassifier {
    int input_dim = 0;
    int num_classes = 0;
    std::vector<int> widths;                  // (input, h1, h2, K)
    std::vector<std::vector<double>> weights;  // row-major
    std::vector<std::vector<double>> biases;
    DirectNetConfig config;
    double val_accuracy = 0.0;

    std::vector<double> flatten(const Trajectory& traj) const {
        return {traj.states.begin(), traj.states.end()};
    }

    std::vector<double> predict_proba(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != input_dim)
            throw std::invalid_argument("DirectClassifier: input size mismatch");
        std::vector<double> a = x, z;
        for (std::size_t j = 0; j < weights.size(); ++j) {
            const int rows = widths[j + 1], cols = widths[j];
            z.assign(rows, 0.0);
            for (int o = 0; o < rows; ++o) {
                double acc = biases[j][o];
                const double* w = weights[j].data() + static_cast<std::size_t>(o) * cols;
                for (int i = 0; i < cols; ++i) acc += w[i] * a[i];
                z[o] = (j + 1 < weights.size()) ? std::max(0.0, acc) : acc;
            }
            a.swap(z);
        }
        double mx = *std::max_element(a.begin(), a.end());
        double total = 0.0;
        for (double& v : a) {
            v = std::exp(v - mx);
            total += v;
        }
        for (double& v : a) v /= total;
        return a;
    }

    int operator()(const Trajectory& traj) const {
        auto p = predict_proba(flatten(traj));
        return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()) + 1;
    }
};

namespace detail {

struct DirectData {
    std::vector<double> X;  // n x input_dim
    std::vector<int> labels;  // 0-based
    int input_dim = 0;
    std::size_t size() const { return labels.size(); }
};

inline DirectData flatten_dataset(const LabeledDataset& ds, const std::vector<std::size_t>& keep) {
    DirectData out;
    std::vector<std::pair<int, int>> index;  // (class0, n)
    for (int k = 0; k < ds.num_classes(); ++k)
        for (std::size_t n = 0; n < ds.paths[k].size(); ++n)
            index.emplace_back(k, static_cast<int>(n));
    const Trajectory& first = ds.paths[index[0].first][index[0].second];
    out.input_dim = (first.steps + 1) * first.dim;
    for (std::size_t i : keep) {
        const Trajectory& t = ds.paths[index[i].first][index[i].second];
        out.X.insert(out.X.end(), t.states.begin(), t.states.end());
        out.labels.push_back(index[i].first);
    }
    return out;
}

struct DirectNet {
    std::vector<int> widths;
    std::vector<std::vector<double>> W, B;
    std::vector<std::vector<double>> mW, vW, mB, vB;
    long step = 0;

    static DirectNet init(const std::vector<int>& widths, Rng& rng) {
        DirectNet net;
        net.widths = widths;
        for (std::size_t j = 0; j + 1 < widths.size(); ++j) {
            std::size_t n = static_cast<std::size_t>(widths[j + 1]) * widths[j];
            double a = std::sqrt(6.0 / (widths[j] + widths[j + 1]));
            std::uniform_real_distribution<double> unif(-a, a);
            net.W.emplace_back(n);
            for (double& w : net.W.back()) w = unif(rng);
            net.B.emplace_back(widths[j + 1], 0.0);
            net.mW.emplace_back(n, 0.0);
            net.vW.emplace_back(n, 0.0);
            net.mB.emplace_back(widths[j + 1], 0.0);
            net.vB.emplace_back(widths[j + 1], 0.0);
        }
        return net;
    }
};

// One Adam minibatch step on softmax cross-entropy with L2 weight decay.
inline void direct_step(DirectNet& net, const double* X, const int* labels, int batch,
                        const DirectNetConfig& cfg, double beta1, double beta2, double eps) {
    const int L = static_cast<int>(net.W.size());
    std::vector<std::vector<double>> acts(L + 1);
    acts[0].assign(X, X + static_cast<std::size_t>(batch) * net.widths[0]);
    for (int j = 0; j < L; ++j) {
        const int rows = net.widths[j + 1], cols = net.widths[j];
        acts[j + 1].assign(static_cast<std::size_t>(batch) * rows, 0.0);
        for (int b = 0; b < batch; ++b) {
            const double* a = acts[j].data() + static_cast<std::size_t>(b) * cols;
            double* z = acts[j + 1].data() + static_cast<std::size_t>(b) * rows;
            for (int o = 0; o < rows; ++o) {
                const double* w = net.W[j].data() + static_cast<std::size_t>(o) * cols;
                double acc = net.B[j][o];
                for (int i = 0; i < cols; ++i) acc += w[i] * a[i];
                z[o] = (j + 1 < L) ? std::max(0.0, acc) : acc;
            }
        }
    }

    // Softmax + cross-entropy gradient at the head.
    const int K = net.widths.back();
    std::vector<std::vector<double>> deltas(L + 1);
    deltas[L].assign(static_cast<std::size_t>(batch) * K, 0.0);
    for (int b = 0; b < batch; ++b) {
        const double* z = acts[L].data() + static_cast<std::size_t>(b) * K;
        double* dz = deltas[L].data() + static_cast<std::size_t>(b) * K;
        double mx = *std::max_element(z, z + K);
        double total = 0.0;
        for (int k = 0; k < K; ++k) total += std::exp(z[k] - mx);
        for (int k = 0; k < K; ++k) {
            double p = std::exp(z[k] - mx) / total;
            dz[k] = (p - (labels[b] == k ? 1.0 : 0.0)) / batch;
        }
    }

    ++net.step;
    const double bias1 = 1.0 - std::pow(beta1, static_cast<double>(net.step));
    const double bias2 = 1.0 - std::pow(beta2, static_cast<double>(net.step));
    for (int j = L - 1; j >= 0; --j) {
        const int rows = net.widths[j + 1], cols = net.widths[j];
        std::vector<double> gW(net.W[j].size(), 0.0), gB(rows, 0.0);
        for (int b = 0; b < batch; ++b) {
            const double* a = acts[j].data() + static_cast<std::size_t>(b) * cols;
            const double* dz = deltas[j + 1].data() + static_cast<std::size_t>(b) * rows;
            for (int o = 0; o < rows; ++o) {
                double g = dz[o];
                if (g == 0.0) continue;
                gB[o] += g;
                double* gw = gW.data() + static_cast<std::size_t>(o) * cols;
                for (int i = 0; i < cols; ++i) gw[i] += g * a[i];
            }
        }
        if (j > 0) {
            deltas[j].assign(static_cast<std::size_t>(batch) * cols, 0.0);
            for (int b = 0; b < batch; ++b) {
                const double* dz = deltas[j + 1].data() + static_cast<std::size_t>(b) * rows;
                const double* a = acts[j].data() + static_cast<std::size_t>(b) * cols;
                double* da = deltas[j].data() + static_cast<std::size_t>(b) * cols;
                for (int o = 0; o < rows; ++o) {
                    double g = dz[o];
                    if (g == 0.0) continue;
                    const double* w = net.W[j].data() + static_cast<std::size_t>(o) * cols;
                    for (int i = 0; i < cols; ++i) da[i] += g * w[i];
                }
                for (int i = 0; i < cols; ++i)
                    if (a[i] <= 0.0) da[i] = 0.0;
            }
        }
        for (std::size_t i = 0; i < gW.size(); ++i) gW[i] += cfg.weight_decay * net.W[j][i];
        auto adam = [&](std::vector<double>& p, const std::vector<double>& g,
                        std::vector<double>& m, std::vector<double>& v) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                p[i] -= cfg.learning_rate * (m[i] / bias1) / (std::sqrt(v[i] / bias2) + eps);
            }
        };
        adam(net.W[j], gW, net.mW[j], net.vW[j]);
        adam(net.B[j], gB, net.mB[j], net.vB[j]);
    }
}

inline double accuracy(const DirectClassifier& clf, const DirectData& data) {
    int correct = 0;
    std::vector<double> x(data.input_dim);
    for (std::size_t n = 0; n < data.size(); ++n) {
        const double* row = data.X.data() + n * data.input_dim;
        x.assign(row, row + data.input_dim);
        auto p = clf.predict_proba(x);
        int pred = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
        correct += (pred == data.labels[n]);
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

inline DirectClassifier snapshot(const DirectNet& net, const DirectNetConfig& cfg, int num_classes) {
    DirectClassifier clf;
    clf.widths = net.widths;
    clf.input_dim = net.widths.front();
    clf.num_classes = num_classes;
    clf.weights = net.W;
    clf.biases = net.B;
    clf.config = cfg;
    return clf;
}

}  // namespace detail

// Random search over the hyperparameter grid; each candidate is trained with
// early stopping on validation accuracy (patience 50, max 200 epochs) and the
// best-validation checkpoint is retained.
inline DirectClassifier train_direct_classifier(const LabeledDataset& dataset, int search_budget,
                                                const TrainConfig& base) {
    const int K = dataset.num_classes();
    int present = 0;
    for (const auto& cls : dataset.paths) present += !cls.empty();
    if (present < 2) throw std::invalid_argument("train_direct_classifier: need at least 2 classes");

    const std::size_t n_total = static_cast<std::size_t>(dataset.total());
    std::vector<std::size_t> order(n_total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng split_rng = make_rng(base.seed, purpose_tag("direct-split"));
    std::shuffle(order.begin(), order.end(), split_rng);
    std::size_t n_val = n_total / 2;
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + n_val);
    std::vector<std::size_t> train_idx(order.begin() + n_val, order.end());
    auto train_data = detail::flatten_dataset(dataset, train_idx);
    auto val_data = detail::flatten_dataset(dataset, val_idx);

    static const double lr_grid[] = {1e-4, 3e-4, 1e-3, 3e-3};
    static const double wd_grid[] = {0.0, 1e-5, 1e-4, 1e-3};
    static const std::pair<int, int> hidden_grid[] = {{16, 16}, {32, 32}, {64, 64}, {128, 128}, {256, 128}};
    static const int batch_grid[] = {64, 128, 256};
    const int patience = 50, max_epochs = 200;

    Rng search_rng = make_rng(base.seed, purpose_tag("direct-search"));
    DirectClassifier best;
    best.val_accuracy = -1.0;
    for (int trial = 0; trial < search_budget; ++trial) {
        DirectNetConfig cfg;
        cfg.learning_rate = lr_grid[std::uniform_int_distribution<int>(0, 3)(search_rng)];
        cfg.weight_decay = wd_grid[std::uniform_int_distribution<int>(0, 3)(search_rng)];
        auto hidden = hidden_grid[std::uniform_int_distribution<int>(0, 4)(search_rng)];
        cfg.hidden1 = hidden.first;
        cfg.hidden2 = hidden.second;
        cfg.batch_size = batch_grid[std::uniform_int_distribution<int>(0, 2)(search_rng)];

        std::vector<int> widths = {train_data.input_dim, cfg.hidden1, cfg.hidden2, K};
        Rng init_rng = make_rng(base.seed, purpose_tag("direct-init"), static_cast<std::uint64_t>(trial));
        auto net = detail::DirectNet::init(widths, init_rng);
        Rng shuffle_rng = make_rng(base.seed, purpose_tag("direct-shuffle"), static_cast<std::uint64_t>(trial));

        std::vector<std::size_t> sample_order(train_data.size());
        std::iota(sample_order.begin(), sample_order.end(), std::size_t{0});
        double trial_best_acc = -1.0;
        DirectClassifier trial_best;
        int since_improve = 0;
        std::vector<double> bx;
        std::vector<int> bl;
        for (int epoch = 1; epoch <= max_epochs; ++epoch) {
            std::shuffle(sample_order.begin(), sample_order.end(), shuffle_rng);
            for (std::size_t start = 0; start < sample_order.size(); start += cfg.batch_size) {
                int bsz = static_cast<int>(
                    std::min<std::size_t>(cfg.batch_size, sample_order.size() - start));
                bx.resize(static_cast<std::size_t>(bsz) * train_data.input_dim);
                bl.resize(bsz);
                for (int b = 0; b < bsz; ++b) {
                    std::size_t idx = sample_order[start + b];
                    std::copy(train_data.X.begin() + idx * train_data.input_dim,
                              train_data.X.begin() + (idx + 1) * train_data.input_dim,
                              bx.begin() + static_cast<std::size_t>(b) * train_data.input_dim);
                    bl[b] = train_data.labels[idx];
                }
                detail::direct_step(net, bx.data(), bl.data(), bsz, cfg, base.beta1, base.beta2,
                                    base.adam_epsilon);
            }
            auto clf = detail::snapshot(net, cfg, K);
            double acc = detail::accuracy(clf, val_data);
            if (acc > trial_best_acc) {
                trial_best_acc = acc;
                trial_best = std::move(clf);
                trial_best.val_accuracy = acc;
                since_improve = 0;
            } else {
                ++since_improve;
            }
            if (since_improve >= patience) break;
        }
        if (trial_best_acc > best.val_accuracy) best = std::move(trial_best);
    }
    return best;
}

}  // namespace driftclass
