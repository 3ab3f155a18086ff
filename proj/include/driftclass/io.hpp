#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "driftclass/sde.hpp"

namespace driftclass {

inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Dataset on disk: <stem>.csv with rows (class, path_id, m, x_1..x_d) and
// <stem>.json sidecar carrying the grid header.
inline void save_dataset(const LabeledDataset& ds, const std::filesystem::path& stem) {
    const Trajectory* first = nullptr;
    for (const auto& cls : ds.paths)
        if (!cls.empty()) {
            first = &cls[0];
            break;
        }
    if (!first) throw std::invalid_argument("save_dataset: empty dataset");

    nlohmann::json header;
    header["d"] = first->dim;
    header["K"] = ds.num_classes();
    header["M"] = first->steps;
    header["delta"] = first->delta;
    header["T"] = first->horizon;
    header["seed"] = ds.seed;
    header["class_counts"] = ds.class_counts();
    {
        std::ofstream js(stem.string() + ".json");
        if (!js) throw std::runtime_error("save_dataset: cannot open sidecar for writing");
        js << header.dump(2) << "\n";
    }

    std::ofstream csv(stem.string() + ".csv");
    if (!csv) throw std::runtime_error("save_dataset: cannot open csv for writing");
    csv << "class,path_id,m";
    for (int i = 1; i <= first->dim; ++i) csv << ",x_" << i;
    csv << "\n";
    for (int k = 0; k < ds.num_classes(); ++k) {
        for (std::size_t n = 0; n < ds.paths[k].size(); ++n) {
            const Trajectory& t = ds.paths[k][n];
            for (int m = 0; m <= t.steps; ++m) {
                csv << (k + 1) << ',' << n << ',' << m;
                const double* row = t.state(m);
                for (int i = 0; i < t.dim; ++i) csv << ',' << format_g17(row[i]);
                csv << "\n";
            }
        }
    }
}

inline LabeledDataset load_dataset(const std::filesystem::path& stem) {
    nlohmann::json header;
    {
        std::ifstream js(stem.string() + ".json");
        if (!js) throw std::runtime_error("load_dataset: missing sidecar " + stem.string() + ".json");
        js >> header;
    }
    const int d = header.at("d").get<int>();
    const int K = header.at("K").get<int>();
    const int M = header.at("M").get<int>();
    const double delta = header.at("delta").get<double>();
    const double T = header.at("T").get<double>();
    const auto counts = header.at("class_counts").get<std::vector<int>>();

    LabeledDataset ds;
    ds.seed = header.at("seed").get<std::uint64_t>();
    ds.paths.resize(K);
    for (int k = 0; k < K; ++k) {
        ds.paths[k].resize(counts[k]);
        for (auto& t : ds.paths[k]) {
            t.dim = d;
            t.steps = M;
            t.delta = delta;
            t.horizon = T;
            t.states.assign(static_cast<std::size_t>(M + 1) * d, 0.0);
        }
    }

    std::ifstream csv(stem.string() + ".csv");
    if (!csv) throw std::runtime_error("load_dataset: missing csv " + stem.string() + ".csv");
    std::string line;
    std::getline(csv, line);  // header row
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ',');
        int k = std::stoi(tok);
        std::getline(ss, tok, ',');
        int n = std::stoi(tok);
        std::getline(ss, tok, ',');
        int m = std::stoi(tok);
        if (k < 1 || k > K || n < 0 || n >= counts[k - 1] || m < 0 || m > M)
            throw std::runtime_error("load_dataset: row out of range");
        double* row = ds.paths[k - 1][n].state(m);
        for (int i = 0; i < d; ++i) {
            std::getline(ss, tok, ',');
            row[i] = std::stod(tok);
        }
    }
    return ds;
}

}  // namespace driftclass
