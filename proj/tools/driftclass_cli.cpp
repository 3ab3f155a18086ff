#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "driftclass/checkpoint.hpp"
#include "driftclass/classify.hpp"
#include "driftclass/harness.hpp"
#include "driftclass/io.hpp"
#include "driftclass/metrics.hpp"

namespace fs = std::filesystem;
using namespace driftclass;

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config JSON file");
    cmd->add_option("--seed", opts.seed, "master seed (overrides config)");
    cmd->add_option("--out", opts.out, "output directory (overrides config)");
}

ExperimentConfig load_config(const CommonOpts& opts) {
    ExperimentConfig cfg;
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw ConfigError("cannot open config file: " + opts.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        cfg = config_from_json(j);
    } else {
        cfg = config_from_json(nlohmann::json::object());
    }
    if (opts.seed) cfg.master_seed = *opts.seed;
    if (opts.out) cfg.out_dir = *opts.out;
    return cfg;
}

void write_predictions(const fs::path& dir, const ModelSpec& spec, const PluginClassifier& clf,
                       const LabeledDataset& data) {
    const int K = spec.num_classes;
    std::ofstream csv(dir / "predictions.csv");
    csv << "path_id,true_label,predicted_label";
    for (int k = 1; k <= K; ++k) csv << ",score_" << k;
    for (int k = 1; k <= K; ++k) csv << ",posterior_" << k;
    csv << "\n";
    std::vector<std::vector<int>> confusion(K, std::vector<int>(K, 0));
    int path_id = 0, errors = 0, total = 0;
    for (int k = 1; k <= K; ++k) {
        for (const auto& traj : data.paths[k - 1]) {
            auto scores = clf.scores(traj);
            auto post = posteriors(scores, clf.priors);
            int pred = classify(post);
            csv << path_id << ',' << k << ',' << pred;
            for (double s : scores) csv << ',' << format_g17(s);
            for (double p : post) csv << ',' << format_g17(p);
            csv << "\n";
            confusion[k - 1][pred - 1] += 1;
            errors += (pred != k);
            ++total;
            ++path_id;
        }
    }
    std::ofstream conf(dir / "confusion.csv");
    conf << "true,predicted,count\n";
    for (int t = 1; t <= K; ++t)
        for (int p = 1; p <= K; ++p) conf << t << ',' << p << ',' << confusion[t - 1][p - 1] << "\n";
    std::cout << "error_rate " << static_cast<double>(errors) / total << " over " << total
              << " paths\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diffusion-trajectory classification by class-specific drift"};
    app.require_subcommand(1);

    CommonOpts opts;
    int n_override = 0;
    int paths_per_class = 10000;
    std::string data_stem, models_dir;

    auto* simulate = app.add_subcommand("simulate", "generate a labeled trajectory dataset");
    add_common(simulate, opts);
    simulate->add_option("--n", n_override, "dataset size (overrides the first train size)");

    auto* train_drift = app.add_subcommand("train-drift", "train per-class drift estimators");
    add_common(train_drift, opts);
    train_drift->add_option("--data", data_stem, "dataset stem (CSV + JSON sidecar)")->required();

    auto* train_direct = app.add_subcommand("train-direct", "train the direct pathwise baseline");
    add_common(train_direct, opts);
    train_direct->add_option("--data", data_stem, "dataset stem (CSV + JSON sidecar)")->required();

    auto* evaluate = app.add_subcommand("evaluate", "classify a dataset with saved models");
    add_common(evaluate, opts);
    evaluate->add_option("--data", data_stem, "dataset stem (CSV + JSON sidecar)")->required();
    evaluate->add_option("--models", models_dir, "directory with model_<k>.json files")->required();

    auto* bayes = app.add_subcommand("bayes-risk", "Monte Carlo Bayes error for a preset");
    add_common(bayes, opts);
    bayes->add_option("--paths-per-class", paths_per_class, "test paths per class");

    auto* experiment = app.add_subcommand("experiment", "run the full seeded repetition sweep");
    add_common(experiment, opts);

    auto* report = app.add_subcommand("report", "re-aggregate saved repetition records");
    add_common(report, opts);

    CLI11_PARSE(app, argc, argv);

    ExperimentConfig cfg;
    try {
        cfg = load_config(opts);
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        fs::create_directories(cfg.out_dir);
        if (simulate->parsed()) {
            if (n_override > 0) cfg.train_sizes = {n_override};
            ModelSpec spec = cfg.model();
            long total = cfg.sizes_per_class ? cfg.train_sizes[0] * spec.num_classes
                                             : cfg.train_sizes[0];
            SizeMode mode = cfg.size_mode == SizeModeKind::Balanced
                                ? SizeMode{Balanced{static_cast<int>(total)}}
                                : SizeMode{Multinomial{static_cast<int>(total)}};
            LabeledDataset ds = generate_dataset(spec, mode, cfg.steps, cfg.horizon,
                                                 cfg.master_seed);
            save_dataset(ds, fs::path(cfg.out_dir) / "dataset");
            std::cout << "wrote " << ds.total() << " paths to " << cfg.out_dir << "/dataset.csv\n";
        } else if (train_drift->parsed()) {
            LabeledDataset ds = load_dataset(data_stem);
            for (int k = 1; k <= ds.num_classes(); ++k) {
                TrainConfig tc = cfg.train;
                tc.seed = derive_seed(cfg.master_seed, purpose_tag("train"),
                                      static_cast<std::uint64_t>(k));
                auto est = train_drift_estimator(ds.paths[k - 1], k, cfg.widths(), tc, cfg.s_ratio);
                fs::path path = fs::path(cfg.out_dir) / ("model_" + std::to_string(k) + ".json");
                save_estimator(est, path);
                std::cout << "wrote " << path.string() << "\n";
            }
        } else if (train_direct->parsed()) {
            LabeledDataset ds = load_dataset(data_stem);
            TrainConfig tc = cfg.train;
            tc.seed = derive_seed(cfg.master_seed, purpose_tag("direct"));
            DirectClassifier clf = train_direct_classifier(ds, cfg.direct_search_budget, tc);
            fs::path path = fs::path(cfg.out_dir) / "direct.json";
            std::ofstream out(path);
            out << direct_to_json(clf).dump(2) << "\n";
            std::cout << "wrote " << path.string() << " (val accuracy " << clf.val_accuracy
                      << ")\n";
        } else if (evaluate->parsed()) {
            LabeledDataset ds = load_dataset(data_stem);
            ModelSpec spec = cfg.model();
            std::vector<DriftEstimator> estimators;
            for (int k = 1; k <= spec.num_classes; ++k)
                estimators.push_back(load_estimator(
                    fs::path(models_dir) / ("model_" + std::to_string(k) + ".json")));
            std::vector<DriftEvaluator> drifts;
            for (const auto& est : estimators) drifts.push_back(estimated_drift(est));
            std::vector<double> priors = cfg.prior_mode == PriorMode::True
                                             ? spec.priors
                                             : empirical_priors(ds);
            PluginClassifier clf = make_plugin_classifier(spec, std::move(drifts), priors);
            write_predictions(cfg.out_dir, spec, clf, ds);
        } else if (bayes->parsed()) {
            ExperimentConfig ref = cfg;
            ref.bayes_ref_per_class = paths_per_class;
            double risk = bayes_reference_risk(ref);
            std::cout << "bayes_risk " << risk << " (" << paths_per_class << " paths per class)\n";
        } else if (experiment->parsed()) {
            RiskReport rep = run_experiment(cfg);
            std::cout << "bayes reference risk " << rep.bayes_reference << "\n";
            for (const auto& [method, curve] : rep.curves) {
                for (const auto& pt : curve)
                    std::cout << method << " N=" << pt.N << " mean_excess=" << pt.mean_excess
                              << " ci=[" << pt.ci_lower << "," << pt.ci_upper << "] reps="
                              << pt.n_reps << "\n";
                auto it = rep.slopes.find(method);
                if (it != rep.slopes.end())
                    std::cout << method << " fitted log2-log2 slope " << it->second << "\n";
            }
            if (rep.n_failed > 0) std::cout << rep.n_failed << " repetitions failed\n";
        } else if (report->parsed()) {
            RiskReport rep = reaggregate_from_dir(cfg.out_dir);
            std::cout << "re-aggregated " << rep.curves.size() << " method curves into "
                      << cfg.out_dir << "\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
