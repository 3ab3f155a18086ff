#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "driftclass/direct.hpp"
#include "driftclass/nn.hpp"

namespace driftclass {

inline nlohmann::json mlp_to_json(const MlpParams& mlp) {
    nlohmann::json j;
    j["widths"] = mlp.widths;
    j["weights"] = mlp.weights;
    j["shifts"] = mlp.shifts;
    j["weight_mask"] = mlp.weight_mask;
    j["shift_mask"] = mlp.shift_mask;
    j["s_ratio"] = mlp.s_ratio;
    j["F"] = mlp.clamp;
    if (mlp.support.unbounded()) {
        j["support"] = nullptr;
    } else {
        j["support"] = {{"lo", mlp.support.lo}, {"hi", mlp.support.hi}};
    }
    return j;
}

inline MlpParams mlp_from_json(const nlohmann::json& j) {
    MlpParams mlp;
    mlp.widths = j.at("widths").get<std::vector<int>>();
    mlp.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    mlp.shifts = j.at("shifts").get<std::vector<std::vector<double>>>();
    mlp.weight_mask = j.at("weight_mask").get<std::vector<std::vector<std::uint8_t>>>();
    mlp.shift_mask = j.at("shift_mask").get<std::vector<std::vector<std::uint8_t>>>();
    mlp.s_ratio = j.at("s_ratio").get<double>();
    mlp.clamp = j.at("F").get<double>();
    if (!j.at("support").is_null()) {
        mlp.support.lo = j.at("support").at("lo").get<Vec>();
        mlp.support.hi = j.at("support").at("hi").get<Vec>();
    }
    return mlp;
}

inline nlohmann::json estimator_to_json(const DriftEstimator& est) {
    nlohmann::json j;
    j["label"] = est.label;
    j["nets"] = nlohmann::json::array();
    for (const auto& net : est.nets) j["nets"].push_back(mlp_to_json(net));
    j["meta"] = nlohmann::json::array();
    for (const auto& m : est.meta) {
        j["meta"].push_back({{"stop_epoch", m.stop_epoch},
                             {"best_epoch", m.best_epoch},
                             {"retrain_epochs", m.retrain_epochs},
                             {"early_stopped", m.early_stopped},
                             {"final_train_loss", m.final_train_loss},
                             {"final_val_loss", m.final_val_loss}});
    }
    return j;
}

inline DriftEstimator estimator_from_json(const nlohmann::json& j) {
    DriftEstimator est;
    est.label = j.at("label").get<int>();
    for (const auto& net : j.at("nets")) est.nets.push_back(mlp_from_json(net));
    for (const auto& m : j.at("meta")) {
        TrainMeta tm;
        tm.stop_epoch = m.at("stop_epoch").get<int>();
        tm.best_epoch = m.at("best_epoch").get<int>();
        tm.retrain_epochs = m.at("retrain_epochs").get<int>();
        tm.early_stopped = m.at("early_stopped").get<bool>();
        tm.final_train_loss = m.at("final_train_loss").is_number()
                                  ? m.at("final_train_loss").get<double>()
                                  : std::numeric_limits<double>::quiet_NaN();
        tm.final_val_loss = m.at("final_val_loss").is_number()
                                ? m.at("final_val_loss").get<double>()
                                : std::numeric_limits<double>::quiet_NaN();
        est.meta.push_back(tm);
    }
    return est;
}

inline void save_estimator(const DriftEstimator& est, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_estimator: cannot open " + path.string());
    out << estimator_to_json(est).dump(2) << "\n";
}

inline DriftEstimator load_estimator(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_estimator: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    return estimator_from_json(j);
}

inline nlohmann::json direct_to_json(const DirectClassifier& clf) {
    nlohmann::json j;
    j["widths"] = clf.widths;
    j["weights"] = clf.weights;
    j["biases"] = clf.biases;
    j["num_classes"] = clf.num_classes;
    j["val_accuracy"] = clf.val_accuracy;
    j["config"] = {{"learning_rate", clf.config.learning_rate},
                   {"weight_decay", clf.config.weight_decay},
                   {"hidden1", clf.config.hidden1},
                   {"hidden2", clf.config.hidden2},
                   {"batch_size", clf.config.batch_size}};
    return j;
}

inline DirectClassifier direct_from_json(const nlohmann::json& j) {
    DirectClassifier clf;
    clf.widths = j.at("widths").get<std::vector<int>>();
    clf.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    clf.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    clf.num_classes = j.at("num_classes").get<int>();
    clf.input_dim = clf.widths.front();
    clf.val_accuracy = j.at("val_accuracy").get<double>();
    const auto& c = j.at("config");
    clf.config.learning_rate = c.at("learning_rate").get<double>();
    clf.config.weight_decay = c.at("weight_decay").get<double>();
    clf.config.hidden1 = c.at("hidden1").get<int>();
    clf.config.hidden2 = c.at("hidden2").get<int>();
    clf.config.batch_size = c.at("batch_size").get<int>();
    return clf;
}

}  // namespace driftclass
