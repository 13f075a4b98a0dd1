#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfalab/errors.hpp"
#include "qfalab/expsim.hpp"
#include "qfalab/tomography.hpp"

namespace qfalab {

// On-disk formats: histograms as (bin_index, count) CSV with the full
// ExperimentConfig as a JSON sidecar; analysis results as (n, P_n, sigma_n)
// CSV; tomography as JSON records of six projection counts per input state.

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["mode"] = {{"gaussian_reference", cfg.mode.gaussian_reference},
                 {"ells", cfg.mode.ells},
                 {"phi_rad", cfg.mode.phi}};
    j["loop"] = {{"R", cfg.loop.reflectance},
                 {"T", cfg.loop.transmittance},
                 {"eta_loop", cfg.loop.eta_loop},
                 {"delta_t_s", cfg.loop.delta_t_s},
                 {"dove_phi_rad", cfg.loop.dove.phi}};
    j["n_max"] = cfg.n_max;
    j["r1_hz"] = cfg.r1_hz;
    j["r2_hz"] = cfg.r2_hz;
    j["budget"] = cfg.budget;
    j["bin_width_s"] = cfg.bin_width_s;
    j["window_bins"] = cfg.window_bins;
    j["peak_spacing_bins"] = cfg.peak_spacing_bins;
    j["pre_record_s"] = cfg.pre_record_s;
    j["accidental_avg_s"] = cfg.accidental_avg_s;
    j["jitter_sigma_bins"] = cfg.jitter_sigma_bins;
    j["encoding_efficiency"] = cfg.encoding_efficiency;
    j["depolarization"] = cfg.depolarization;
    j["seed"] = cfg.seed;
    return j;
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        const auto& mode = j.at("mode");
        cfg.mode.gaussian_reference = mode.at("gaussian_reference").get<bool>();
        cfg.mode.ells = mode.at("ells").get<std::vector<int>>();
        cfg.mode.phi = mode.at("phi_rad").get<double>();
        const auto& loop = j.at("loop");
        cfg.loop.reflectance = loop.at("R").get<double>();
        cfg.loop.transmittance = loop.at("T").get<double>();
        cfg.loop.eta_loop = loop.at("eta_loop").get<double>();
        cfg.loop.delta_t_s = loop.at("delta_t_s").get<double>();
        cfg.loop.dove.phi = loop.at("dove_phi_rad").get<double>();
        cfg.n_max = j.at("n_max").get<int>();
        cfg.r1_hz = j.at("r1_hz").get<double>();
        cfg.r2_hz = j.at("r2_hz").get<double>();
        cfg.budget = j.at("budget").get<std::uint64_t>();
        cfg.bin_width_s = j.at("bin_width_s").get<double>();
        cfg.window_bins = j.at("window_bins").get<int>();
        cfg.peak_spacing_bins = j.at("peak_spacing_bins").get<int>();
        cfg.pre_record_s = j.at("pre_record_s").get<double>();
        cfg.accidental_avg_s = j.at("accidental_avg_s").get<double>();
        cfg.jitter_sigma_bins = j.at("jitter_sigma_bins").get<double>();
        cfg.encoding_efficiency = j.at("encoding_efficiency").get<double>();
        cfg.depolarization = j.at("depolarization").get<double>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed experiment config: ") + e.what());
    }
    return cfg;
}

inline void save_histogram_csv(const TimeHistogram& hist, const std::string& csv_path,
                               const std::string& sidecar_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot open for writing: " + csv_path);
    csv << "bin_index,count\n";
    for (std::size_t b = 0; b < hist.counts.size(); ++b) csv << b << ',' << hist.counts[b] << '\n';
    std::ofstream sidecar(sidecar_path);
    if (!sidecar) throw IoError("cannot open for writing: " + sidecar_path);
    sidecar << experiment_config_to_json(hist.cfg).dump(2) << '\n';
}

inline TimeHistogram load_histogram_csv(const std::string& csv_path, const std::string& sidecar_path) {
    std::ifstream sidecar(sidecar_path);
    if (!sidecar) throw IoError("cannot open: " + sidecar_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(sidecar);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(sidecar_path + ": " + e.what());
    }
    TimeHistogram hist;
    hist.cfg = experiment_config_from_json(j);
    hist.counts.assign(std::size_t(hist.cfg.span_bins()), 0);

    std::ifstream csv(csv_path);
    if (!csv) throw IoError("cannot open: " + csv_path);
    std::string line;
    std::getline(csv, line);  // header
    std::size_t row = 0;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError(csv_path + ": malformed row " + std::to_string(row));
        const std::size_t bin = std::stoull(line.substr(0, comma));
        if (bin >= hist.counts.size()) throw ConfigError(csv_path + ": bin index outside the span");
        hist.counts[bin] = std::stoull(line.substr(comma + 1));
        ++row;
    }
    return hist;
}

inline void save_results_csv(const LoopProbabilities& probs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "n,P_n,sigma_n\n";
    out.precision(17);
    for (const LoopPoint& pt : probs.points) out << pt.n << ',' << pt.p << ',' << pt.sigma << '\n';
}

/// One tomography record: a labelled input state with its six projection
/// counts (Table-style rows).
struct TomographyRecord {
    std::string label;
    ProjectionCounts counts{};
};

inline std::vector<TomographyRecord> tomography_records_from_json(const nlohmann::json& j) {
    static constexpr const char* keys[6] = {"z+", "z-", "x+", "x-", "y+", "y-"};
    std::vector<TomographyRecord> records;
    try {
        for (const auto& row : j.at("states")) {
            TomographyRecord rec;
            rec.label = row.at("label").get<std::string>();
            const auto& counts = row.at("counts");
            for (int i = 0; i < 6; ++i) rec.counts[std::size_t(i)] = counts.at(keys[i]).get<double>();
            records.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed tomography input: ") + e.what());
    }
    if (records.empty()) throw ConfigError("tomography input contains no states");
    return records;
}

inline nlohmann::json tomography_report_json(const std::vector<TomographyRecord>& records) {
    static constexpr const char* keys[6] = {"z+", "z-", "x+", "x-", "y+", "y-"};
    nlohmann::json out;
    out["states"] = nlohmann::json::array();
    for (const TomographyRecord& rec : records) {
        const BlochVector r = qst_direct_inversion(rec.counts);
        nlohmann::json counts;
        for (int i = 0; i < 6; ++i) counts[keys[i]] = rec.counts[std::size_t(i)];
        out["states"].push_back({{"label", rec.label},
                                 {"counts", counts},
                                 {"bloch", {r.x, r.y, r.z}},
                                 {"bloch_norm", r.norm()},
                                 {"unphysical", bloch_vector_unphysical(rec.counts, r)}});
    }
    return out;
}

}  // namespace qfalab
