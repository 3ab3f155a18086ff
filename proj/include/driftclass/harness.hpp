#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "driftclass/checkpoint.hpp"
#include "driftclass/classify.hpp"
#include "driftclass/direct.hpp"
#include "driftclass/io.hpp"
#include "driftclass/metrics.hpp"
#include "driftclass/nn.hpp"
#include "driftclass/sde.hpp"

namespace driftclass {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Preset { Example1, Example2, Custom };
enum class SizeModeKind { Balanced, Multinomial };
enum class PriorMode { True, Empirical };

struct ExperimentConfig {
    Preset preset = Preset::Example1;
    int d = 1;
    double theta = 5.0;
    double horizon = 1.0;
    int steps = 100;
    std::vector<long> train_sizes;  // per class (Example 1) or total (Example 2)
    bool sizes_per_class = true;
    SizeModeKind size_mode = SizeModeKind::Balanced;
    int test_per_class = 1000;
    int repetitions = 50;
    PriorMode prior_mode = PriorMode::True;
    TrainConfig train;
    double s_ratio = 0.75;
    std::vector<int> hidden_widths = {16, 32, 32, 16};
    bool direct_enabled = false;
    int direct_search_budget = 5;
    int bayes_ref_per_class = 10000;
    std::uint64_t master_seed = 0;
    std::string out_dir = "out";

    ModelSpec model() const {
        switch (preset) {
            case Preset::Example1:
                return make_double_layer_spec(d, theta);
            case Preset::Example2:
                return make_cosine_spec(theta);
            default:
                throw ConfigError("model: custom preset has no built-in ModelSpec");
        }
    }

    std::vector<int> widths() const {
        std::vector<int> w;
        w.push_back(d);
        w.insert(w.end(), hidden_widths.begin(), hidden_widths.end());
        w.push_back(1);
        return w;
    }

    void validate() const {
        if (train_sizes.empty()) throw ConfigError("train_sizes: must be nonempty");
        for (long n : train_sizes)
            if (n <= 0) throw ConfigError("train_sizes: all sizes must be positive");
        if (test_per_class <= 0) throw ConfigError("test_per_class: must be positive");
        if (repetitions < 1) throw ConfigError("repetitions: must be positive");
        if (preset == Preset::Example2 && d != 1) throw ConfigError("d: Example 2 forces d = 1");
        if (steps < 1 || horizon <= 0.0) throw ConfigError("grid: need M >= 1 and T > 0");
        if (s_ratio <= 0.0 || s_ratio > 1.0) throw ConfigError("s_ratio: must be in (0,1]");
        train.validate();
    }
};

namespace detail {

inline void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& scope) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown config key: " + scope + it.key());
}

}  // namespace detail

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["preset"] = c.preset == Preset::Example1 ? "example1"
                  : c.preset == Preset::Example2 ? "example2"
                                                 : "custom";
    j["d"] = c.d;
    j["theta"] = c.theta;
    j["T"] = c.horizon;
    j["M"] = c.steps;
    j["train_sizes"] = c.train_sizes;
    j["sizes_per_class"] = c.sizes_per_class;
    j["size_mode"] = c.size_mode == SizeModeKind::Balanced ? "balanced" : "multinomial";
    j["test_per_class"] = c.test_per_class;
    j["repetitions"] = c.repetitions;
    j["prior_mode"] = c.prior_mode == PriorMode::True ? "true" : "empirical";
    j["train"] = {{"learning_rate", c.train.learning_rate},
                  {"batch_size", c.train.batch_size},
                  {"max_epochs", c.train.max_epochs},
                  {"patience", c.train.patience},
                  {"val_fraction", c.train.val_fraction},
                  {"retrain_multiplier", c.train.retrain_multiplier},
                  {"improvement_threshold", c.train.improvement_threshold}};
    j["s_ratio"] = c.s_ratio;
    j["hidden_widths"] = c.hidden_widths;
    j["direct"] = {{"enabled", c.direct_enabled}, {"search_budget", c.direct_search_budget}};
    j["bayes_ref_per_class"] = c.bayes_ref_per_class;
    j["seed"] = c.master_seed;
    j["out"] = c.out_dir;
    return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    detail::require_keys(j, {"preset", "d", "theta", "T", "M", "train_sizes", "sizes_per_class",
                             "size_mode", "test_per_class", "repetitions", "prior_mode", "train",
                             "s_ratio", "hidden_widths", "direct", "bayes_ref_per_class", "seed",
                             "out"},
                         "");
    ExperimentConfig c;
    std::string preset = j.value("preset", "example1");
    if (preset == "example1") {
        c.preset = Preset::Example1;
        c.theta = 5.0;
        c.train_sizes = {32, 64, 128, 256, 512, 1024, 2048, 4096};
        c.sizes_per_class = true;
        c.size_mode = SizeModeKind::Balanced;
        c.repetitions = 50;
        c.prior_mode = PriorMode::True;
    } else if (preset == "example2") {
        c.preset = Preset::Example2;
        c.d = 1;
        c.theta = 4.0;
        c.train_sizes = {100, 1000};
        c.sizes_per_class = false;
        c.size_mode = SizeModeKind::Multinomial;
        c.repetitions = 100;
        c.prior_mode = PriorMode::Empirical;
    } else {
        throw ConfigError("preset: must be example1 or example2");
    }
    if (j.contains("d")) c.d = j.at("d").get<int>();
    if (j.contains("theta")) c.theta = j.at("theta").get<double>();
    if (j.contains("T")) c.horizon = j.at("T").get<double>();
    if (j.contains("M")) c.steps = j.at("M").get<int>();
    if (j.contains("train_sizes")) c.train_sizes = j.at("train_sizes").get<std::vector<long>>();
    if (j.contains("sizes_per_class")) c.sizes_per_class = j.at("sizes_per_class").get<bool>();
    if (j.contains("size_mode")) {
        std::string m = j.at("size_mode").get<std::string>();
        if (m == "balanced")
            c.size_mode = SizeModeKind::Balanced;
        else if (m == "multinomial")
            c.size_mode = SizeModeKind::Multinomial;
        else
            throw ConfigError("size_mode: must be balanced or multinomial");
    }
    if (j.contains("test_per_class")) c.test_per_class = j.at("test_per_class").get<int>();
    if (j.contains("repetitions")) c.repetitions = j.at("repetitions").get<int>();
    if (j.contains("prior_mode")) {
        std::string m = j.at("prior_mode").get<std::string>();
        if (m == "true")
            c.prior_mode = PriorMode::True;
        else if (m == "empirical")
            c.prior_mode = PriorMode::Empirical;
        else
            throw ConfigError("prior_mode: must be true or empirical");
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        detail::require_keys(t, {"learning_rate", "batch_size", "max_epochs", "patience",
                                 "val_fraction", "retrain_multiplier", "improvement_threshold"},
                             "train.");
        if (t.contains("learning_rate")) c.train.learning_rate = t.at("learning_rate").get<double>();
        if (t.contains("batch_size")) c.train.batch_size = t.at("batch_size").get<int>();
        if (t.contains("max_epochs")) c.train.max_epochs = t.at("max_epochs").get<int>();
        if (t.contains("patience")) c.train.patience = t.at("patience").get<int>();
        if (t.contains("val_fraction")) c.train.val_fraction = t.at("val_fraction").get<double>();
        if (t.contains("retrain_multiplier"))
            c.train.retrain_multiplier = t.at("retrain_multiplier").get<int>();
        if (t.contains("improvement_threshold"))
            c.train.improvement_threshold = t.at("improvement_threshold").get<double>();
    }
    if (j.contains("s_ratio")) c.s_ratio = j.at("s_ratio").get<double>();
    if (j.contains("hidden_widths")) c.hidden_widths = j.at("hidden_widths").get<std::vector<int>>();
    if (j.contains("direct")) {
        const auto& d = j.at("direct");
        detail::require_keys(d, {"enabled", "search_budget"}, "direct.");
        if (d.contains("enabled")) c.direct_enabled = d.at("enabled").get<bool>();
        if (d.contains("search_budget")) c.direct_search_budget = d.at("search_budget").get<int>();
    }
    if (j.contains("bayes_ref_per_class"))
        c.bayes_ref_per_class = j.at("bayes_ref_per_class").get<int>();
    if (j.contains("seed")) c.master_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    return c;
}

inline std::string config_hash(const ExperimentConfig& c) {
    nlohmann::json j = config_to_json(c);
    j.erase("out");  // output location does not change the experiment
    std::string dump = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : dump) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct MethodResult {
    double error_rate = 0.0;
    // Rao-Blackwellized excess vs the Bayes oracle on the shared test set
    // (see conditional_excess_risk); identically zero for the oracle itself.
    double conditional_excess = 0.0;
};

struct SizeRecord {
    long train_size = 0;  // per class or total, per config.sizes_per_class
    std::map<std::string, MethodResult> methods;  // "plugin", "bayes", "direct"
    std::vector<double> estimation_error_by_class;  // E(b_hat_k, b_k) on the test paths
};

struct RepetitionRecord {
    int rep_index = 0;
    bool failed = false;
    std::string error;
    std::vector<SizeRecord> sizes;
};

inline int worker_count() {
    if (const char* env = std::getenv("DRIFTCLASS_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

inline RepetitionRecord run_repetition(const ExperimentConfig& cfg, int rep_index) {
    cfg.validate();
    const ModelSpec spec = cfg.model();
    const int K = spec.num_classes;
    const std::uint64_t rep_seed = derive_seed(cfg.master_seed, purpose_tag("rep"),
                                               static_cast<std::uint64_t>(rep_index));

    RepetitionRecord rec;
    rec.rep_index = rep_index;

    const std::uint64_t test_seed = derive_seed(rep_seed, purpose_tag("test"));
    LabeledDataset test = generate_dataset(spec, Balanced{cfg.test_per_class * K}, cfg.steps,
                                           cfg.horizon, test_seed);
    auto oracle = bayes_oracle(spec);
    RiskEstimate bayes_risk = misclassification_risk(oracle, test);

    for (long size : cfg.train_sizes) {
        SizeRecord sr;
        sr.train_size = size;
        const long total = cfg.sizes_per_class ? size * K : size;
        // Balanced sweeps share one data stream per repetition: per-path RNG
        // substreams are indexed by (class, path), so the size-N dataset is a
        // prefix of the size-2N dataset. Common random numbers across sizes
        // make the rate curve comparison much tighter at fixed repetitions.
        const std::uint64_t data_seed =
            cfg.size_mode == SizeModeKind::Balanced
                ? derive_seed(rep_seed, purpose_tag("data"))
                : derive_seed(rep_seed, purpose_tag("data"), static_cast<std::uint64_t>(size));
        SizeMode mode = cfg.size_mode == SizeModeKind::Balanced
                            ? SizeMode{Balanced{static_cast<int>(total)}}
                            : SizeMode{Multinomial{static_cast<int>(total)}};
        LabeledDataset train = generate_dataset(spec, mode, cfg.steps, cfg.horizon, data_seed);

        std::vector<double> priors = cfg.prior_mode == PriorMode::True ? spec.priors
                                                                       : empirical_priors(train);

        std::vector<DriftEstimator> estimators;
        estimators.reserve(K);
        for (int k = 1; k <= K; ++k) {
            TrainConfig tc = cfg.train;
            // No size index: with nested balanced datasets, sharing the train
            // stream across sizes acts as common random numbers for the sweep.
            tc.seed = derive_seed(rep_seed, purpose_tag("train"), static_cast<std::uint64_t>(k));
            estimators.push_back(train_drift_estimator(train.paths[k - 1], k, cfg.widths(), tc,
                                                       cfg.s_ratio));
        }

        std::vector<DriftEvaluator> drifts;
        for (const auto& est : estimators) drifts.push_back(estimated_drift(est));
        PluginClassifier plugin = make_plugin_classifier(spec, std::move(drifts), priors);

        RiskEstimate plugin_risk = misclassification_risk(plugin, test);
        sr.methods["plugin"] = {plugin_risk.error_rate,
                                conditional_excess_risk(plugin, oracle, test)};
        sr.methods["bayes"] = {bayes_risk.error_rate, 0.0};

        for (int k = 1; k <= K; ++k) {
            sr.estimation_error_by_class.push_back(estimation_error(
                estimated_drift(estimators[k - 1]), true_drift(spec, k), test, AllClasses{}));
        }

        if (cfg.direct_enabled) {
            TrainConfig tc = cfg.train;
            tc.seed = derive_seed(rep_seed, purpose_tag("direct"));
            DirectClassifier direct = train_direct_classifier(train, cfg.direct_search_budget, tc);
            RiskEstimate direct_risk = misclassification_risk(direct, test);
            sr.methods["direct"] = {direct_risk.error_rate,
                                    conditional_excess_risk(direct, oracle, test)};
        }
        rec.sizes.push_back(std::move(sr));
    }
    return rec;
}

struct RiskReport {
    // method -> rate curve over train sizes (excess risk against the Bayes reference)
    std::map<std::string, std::vector<RateCurvePoint>> curves;
    // method -> per-size mean raw risk (Table-1-style output)
    std::map<std::string, std::vector<std::pair<long, double>>> mean_risks;
    std::map<std::string, double> slopes;  // fitted log2-log2 slopes per method
    double bayes_reference = 0.0;
    std::string hash;
    int n_failed = 0;
    double wall_seconds = 0.0;
};

inline double bayes_reference_risk(const ExperimentConfig& cfg) {
    const ModelSpec spec = cfg.model();
    const std::uint64_t seed = derive_seed(cfg.master_seed, purpose_tag("bayesref"));
    LabeledDataset ref = generate_dataset(spec, Balanced{cfg.bayes_ref_per_class * spec.num_classes},
                                          cfg.steps, cfg.horizon, seed);
    return misclassification_risk(bayes_oracle(spec), ref).error_rate;
}

inline nlohmann::json record_to_json(const RepetitionRecord& rec, const std::string& hash) {
    nlohmann::json j;
    j["config_hash"] = hash;
    j["rep_index"] = rec.rep_index;
    j["failed"] = rec.failed;
    if (rec.failed) j["error"] = rec.error;
    j["sizes"] = nlohmann::json::array();
    for (const auto& sr : rec.sizes) {
        nlohmann::json s;
        s["train_size"] = sr.train_size;
        for (const auto& [name, res] : sr.methods) {
            s["error"][name] = res.error_rate;
            s["cond_excess"][name] = res.conditional_excess;
        }
        s["estimation_error_by_class"] = sr.estimation_error_by_class;
        j["sizes"].push_back(std::move(s));
    }
    return j;
}

inline RepetitionRecord record_from_json(const nlohmann::json& j) {
    RepetitionRecord rec;
    rec.rep_index = j.at("rep_index").get<int>();
    rec.failed = j.at("failed").get<bool>();
    if (rec.failed) rec.error = j.value("error", "");
    for (const auto& s : j.at("sizes")) {
        SizeRecord sr;
        sr.train_size = s.at("train_size").get<long>();
        if (s.contains("error"))
            for (auto it = s.at("error").begin(); it != s.at("error").end(); ++it)
                sr.methods[it.key()] = {it.value().get<double>()};
        if (s.contains("cond_excess"))
            for (auto it = s.at("cond_excess").begin(); it != s.at("cond_excess").end(); ++it)
                sr.methods[it.key()].conditional_excess = it.value().get<double>();
        if (s.contains("estimation_error_by_class"))
            sr.estimation_error_by_class = s.at("estimation_error_by_class").get<std::vector<double>>();
        rec.sizes.push_back(std::move(sr));
    }
    return rec;
}

// Aggregate repetition records into rate curves; failed repetitions are
// excluded with n_reps adjusted.
inline RiskReport aggregate_records(const ExperimentConfig& cfg,
                                    const std::vector<RepetitionRecord>& records,
                                    double bayes_ref) {
    RiskReport report;
    report.bayes_reference = bayes_ref;
    report.hash = config_hash(cfg);

    std::set<std::string> methods;
    for (const auto& rec : records)
        if (!rec.failed)
            for (const auto& sr : rec.sizes)
                for (const auto& [name, _] : sr.methods) methods.insert(name);

    for (const auto& method : methods) {
        std::vector<RateCurvePoint> curve;
        std::vector<std::pair<long, double>> means;
        for (std::size_t si = 0; si < cfg.train_sizes.size(); ++si) {
            std::vector<double> excess, raw;
            for (const auto& rec : records) {
                if (rec.failed || si >= rec.sizes.size()) continue;
                auto it = rec.sizes[si].methods.find(method);
                if (it == rec.sizes[si].methods.end()) continue;
                raw.push_back(it->second.error_rate);
                excess.push_back(it->second.error_rate - bayes_ref);
            }
            if (excess.empty()) continue;
            RateCurvePoint pt;
            pt.N = cfg.sizes_per_class ? cfg.train_sizes[si] * cfg.model().num_classes
                                       : cfg.train_sizes[si];
            pt.n_reps = static_cast<int>(excess.size());
            if (excess.size() >= 2) {
                auto ci = confidence_interval(excess);
                pt.mean_excess = ci.mean;
                pt.ci_lower = ci.lower;
                pt.ci_upper = ci.upper;
            } else {
                pt.mean_excess = excess[0];
                pt.ci_lower = pt.ci_upper = excess[0];
            }
            curve.push_back(pt);
            double mean_raw = 0.0;
            for (double r : raw) mean_raw += r;
            means.emplace_back(pt.N, mean_raw / raw.size());
        }
        if (curve.size() >= 2) {
            try {
                report.slopes[method] = fit_rate(curve, 0, curve.size() - 1).slope;
            } catch (const std::invalid_argument&) {
                // all-nonpositive excess: no slope
            }
        }
        report.mean_risks[method] = std::move(means);
        report.curves[method] = std::move(curve);
    }
    for (const auto& rec : records) report.n_failed += rec.failed;
    return report;
}

inline void write_report_files(const ExperimentConfig& cfg, const RiskReport& report,
                               const std::vector<RepetitionRecord>& records) {
    namespace fs = std::filesystem;
    fs::path out(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    {
        std::ofstream probe(out / ".write_probe");
        if (!probe) throw std::runtime_error("output directory not writable: " + out.string());
    }
    fs::remove(out / ".write_probe", ec);

    {
        std::ofstream csv(out / "report.csv");
        csv << "N,method,mean_excess,ci_lower,ci_upper,n_reps\n";
        for (const auto& [method, curve] : report.curves)
            for (const auto& pt : curve)
                csv << pt.N << ',' << method << ',' << format_g17(pt.mean_excess) << ','
                    << format_g17(pt.ci_lower) << ',' << format_g17(pt.ci_upper) << ',' << pt.n_reps
                    << "\n";
    }
    {
        std::ofstream csv(out / "table.csv");
        csv << "theta,N,method,mean_risk\n";
        for (const auto& [method, rows] : report.mean_risks)
            for (const auto& [N, risk] : rows)
                csv << format_g17(cfg.theta) << ',' << N << ',' << method << ','
                    << format_g17(risk) << "\n";
        const int K = cfg.model().num_classes;
        for (long size : cfg.train_sizes) {
            long N = cfg.sizes_per_class ? size * K : size;
            csv << format_g17(cfg.theta) << ',' << N << ",bspline,\n";  // prior-work baseline, not built here
        }
    }
    {
        std::ofstream jsonl(out / "records.jsonl");
        for (const auto& rec : records) jsonl << record_to_json(rec, report.hash).dump() << "\n";
    }
    {
        nlohmann::json meta;
        meta["config"] = config_to_json(cfg);
        meta["config_hash"] = report.hash;
        meta["master_seed"] = cfg.master_seed;
        meta["bayes_reference_risk"] = report.bayes_reference;
        meta["slopes"] = report.slopes;
        meta["n_failed"] = report.n_failed;
        meta["wall_seconds"] = report.wall_seconds;
        // Theoretical reference curves alongside the empirical rates: the
        // log-factor exponent is not pinned down, so both are emitted.
        nlohmann::json refs = nlohmann::json::array();
        for (const auto& [method, curve] : report.curves) {
            if (method != "plugin") continue;
            for (const auto& pt : curve) {
                double n = static_cast<double>(pt.N);
                refs.push_back({{"N", pt.N},
                                {"nhalf_log32", std::pow(n, -0.5) * std::pow(std::log2(n), 1.5)},
                                {"nhalf_log3", std::pow(n, -0.5) * std::pow(std::log2(n), 3.0)},
                                {"phi_N", phi_rate({1.0}, {1.0}, n)}});
            }
        }
        meta["reference_curves"] = refs;
        std::ofstream mf(out / "meta.json");
        mf << meta.dump(2) << "\n";
    }
}

inline RiskReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    const double bayes_ref = bayes_reference_risk(cfg);

    std::vector<RepetitionRecord> records(cfg.repetitions);
    std::atomic<int> next{0};
    const int workers = std::min(worker_count(), cfg.repetitions);
    auto work = [&]() {
        for (;;) {
            int rep = next.fetch_add(1);
            if (rep >= cfg.repetitions) break;
            try {
                records[rep] = run_repetition(cfg, rep);
            } catch (const std::exception& e) {
                records[rep].rep_index = rep;
                records[rep].failed = true;
                records[rep].error = e.what();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    int failed = 0;
    for (const auto& rec : records) failed += rec.failed;
    if (failed * 5 > cfg.repetitions) {
        std::ostringstream msg;
        msg << "run_experiment: " << failed << "/" << cfg.repetitions << " repetitions failed;";
        for (const auto& rec : records)
            if (rec.failed) {
                msg << " first error: " << rec.error;
                break;
            }
        throw std::runtime_error(msg.str());
    }

    RiskReport report = aggregate_records(cfg, records, bayes_ref);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_report_files(cfg, report, records);
    return report;
}

// Re-aggregate saved records; refuses to mix records from different config hashes.
inline RiskReport reaggregate_from_dir(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "meta.json");
    if (!mf) throw std::runtime_error("report: missing meta.json in " + dir.string());
    nlohmann::json meta;
    mf >> meta;
    ExperimentConfig cfg = config_from_json(meta.at("config"));
    const std::string hash = meta.at("config_hash").get<std::string>();
    const double bayes_ref = meta.at("bayes_reference_risk").get<double>();

    std::vector<RepetitionRecord> records;
    std::ifstream jsonl(dir / "records.jsonl");
    if (!jsonl) throw std::runtime_error("report: missing records.jsonl in " + dir.string());
    std::string line;
    while (std::getline(jsonl, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.at("config_hash").get<std::string>() != hash)
            throw std::runtime_error("report: record config hash mismatch; refusing to mix runs");
        records.push_back(record_from_json(j));
    }
    std::sort(records.begin(), records.end(),
              [](const RepetitionRecord& a, const RepetitionRecord& b) {
                  return a.rep_index < b.rep_index;
              });
    RiskReport report = aggregate_records(cfg, records, bayes_ref);
    write_report_files(cfg, report, records);
    return report;
}

}  // namespace driftclass
