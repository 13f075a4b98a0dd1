#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfalab/errors.hpp"
#include "qfalab/version.hpp"

namespace qfatool {

/// FNV-1a over the exact config/argument text; stable across platforms.
inline std::string config_digest(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)(h));
    return buf;
}

/// Audit record written next to every command's outputs.
struct RunManifest {
    std::string command;
    std::string digest;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    double wall_ms = 0.0;

    void write(const std::string& path) const {
        nlohmann::json j;
        j["command"] = command;
        j["config_digest"] = digest;
        j["seed"] = seed;
        j["tool_version"] = qfalab::kVersion;
        j["outputs"] = outputs;
        j["wall_ms"] = wall_ms;
        std::ofstream out(path);
        if (!out) throw qfalab::IoError("cannot write manifest: " + path);
        out << j.dump(2) << '\n';
    }
};

}  // namespace qfatool
