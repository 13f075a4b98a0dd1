#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfalab/automata.hpp"
#include "qfalab/errors.hpp"
#include "qfalab/photonic.hpp"

namespace qfalab {

// JSON schema for machines. Matrices are row-major arrays of [re, im] pairs;
// doubles survive the round trip exactly (nlohmann emits shortest
// round-trippable decimal representations).

/// Optional photonic realization attached to a serialized QFA.
struct PhotonicSection {
    std::vector<int> ells;
    double phi_rad = 0.0;
    double reflectance = 0.5;
    double transmittance = 0.5;
    double eta_loop = 1.0;
    double delta_t_s = 2.262e-9;
};

namespace io_detail {

inline nlohmann::json matrix_to_json(const CMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline CMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
    const std::size_t n = j.size();
    CMatrix m(n, j.front().size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = j.at(i);
        if (row.size() != m.cols()) throw ConfigError("ragged matrix in JSON");
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const auto& pair = row.at(c);
            if (!pair.is_array() || pair.size() != 2) throw ConfigError("matrix entry must be [re, im]");
            m(i, c) = cplx{pair.at(0).get<double>(), pair.at(1).get<double>()};
        }
    }
    return m;
}

inline nlohmann::json vector_to_json(const CVector& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const cplx& x : v) arr.push_back({x.real(), x.imag()});
    return arr;
}

inline CVector vector_from_json(const nlohmann::json& j) {
    CVector v;
    v.reserve(j.size());
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2) throw ConfigError("vector entry must be [re, im]");
        v.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    return v;
}

}  // namespace io_detail

inline nlohmann::json qfa_to_json(const QfaSpec& spec,
                                  const std::optional<PhotonicSection>& photonic = std::nullopt) {
    nlohmann::json j;
    j["dim"] = spec.dim;
    j["v0"] = io_detail::vector_to_json(spec.v0);
    j["V_cent"] = io_detail::matrix_to_json(spec.V_cent);
    j["V_a"] = io_detail::matrix_to_json(spec.V_a);
    j["V_dollar"] = io_detail::matrix_to_json(spec.V_dollar);
    j["accepting"] = std::vector<int>(spec.accepting.begin(), spec.accepting.end());
    if (photonic) {
        j["photonic"] = {{"ells", photonic->ells},
                         {"phi_rad", photonic->phi_rad},
                         {"R", photonic->reflectance},
                         {"T", photonic->transmittance},
                         {"eta_loop", photonic->eta_loop},
                         {"delta_t_s", photonic->delta_t_s}};
    }
    return j;
}

inline QfaSpec qfa_from_json(const nlohmann::json& j) {
    QfaSpec spec;
    try {
        spec.dim = j.at("dim").get<int>();
        spec.v0 = io_detail::vector_from_json(j.at("v0"));
        spec.V_cent = io_detail::matrix_from_json(j.at("V_cent"));
        spec.V_a = io_detail::matrix_from_json(j.at("V_a"));
        spec.V_dollar = io_detail::matrix_from_json(j.at("V_dollar"));
        for (int s : j.at("accepting").get<std::vector<int>>()) spec.accepting.insert(s);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed QFA document: ") + e.what());
    }
    spec.validate();
    return spec;
}

inline std::optional<PhotonicSection> photonic_from_json(const nlohmann::json& j) {
    if (!j.contains("photonic")) return std::nullopt;
    const auto& p = j.at("photonic");
    PhotonicSection s;
    try {
        s.ells = p.at("ells").get<std::vector<int>>();
        s.phi_rad = p.at("phi_rad").get<double>();
        s.reflectance = p.at("R").get<double>();
        s.transmittance = p.at("T").get<double>();
        s.eta_loop = p.at("eta_loop").get<double>();
        s.delta_t_s = p.at("delta_t_s").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed photonic section: ") + e.what());
    }
    return s;
}

inline void save_qfa(const std::string& path, const QfaSpec& spec,
                     const std::optional<PhotonicSection>& photonic = std::nullopt) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << qfa_to_json(spec, photonic).dump(2) << '\n';
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline QfaSpec load_qfa(const std::string& path) { return qfa_from_json(load_json(path)); }

}  // namespace qfalab
