#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qfalab/errors.hpp"

namespace qfatool {

// Sectioned key-value config files: `[section]` headers, `key = value` lines,
// `#` or `;` comments. Every key remembers its line so schema violations can
// point at the offending text; keys never read by the command are rejected.

struct ConfigValue {
    std::string text;
    int line = 0;
};

class ConfigFile {
  public:
    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw qfalab::IoError("cannot open config: " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_text(buf.str(), path);
    }

    static ConfigFile parse_text(const std::string& text, const std::string& name = "<config>") {
        ConfigFile cfg;
        cfg.name_ = name;
        cfg.text_ = text;
        std::istringstream in(text);
        std::string line, section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string stripped = strip(line);
            if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
            if (stripped.front() == '[') {
                if (stripped.back() != ']')
                    throw qfalab::ConfigError(cfg.where(line_no) + "unterminated section header");
                section = strip(stripped.substr(1, stripped.size() - 2));
                if (section.empty()) throw qfalab::ConfigError(cfg.where(line_no) + "empty section name");
                continue;
            }
            const auto eq = stripped.find('=');
            if (eq == std::string::npos)
                throw qfalab::ConfigError(cfg.where(line_no) + "expected `key = value`");
            const std::string key = strip(stripped.substr(0, eq));
            const std::string value = strip(stripped.substr(eq + 1));
            if (key.empty()) throw qfalab::ConfigError(cfg.where(line_no) + "empty key");
            const std::string full = section + "." + key;
            if (cfg.values_.count(full))
                throw qfalab::ConfigError(cfg.where(line_no) + "duplicate key `" + full + "`");
            cfg.values_[full] = {value, line_no};
        }
        return cfg;
    }

    const std::string& text() const { return text_; }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(key);
        return it->second.text;
    }

    double get_double(const std::string& key, double fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(key);
        return parse_double(it->second, key);
    }

    double require_double(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) throw qfalab::ConfigError(name_ + ": missing required key `" + key + "`");
        consumed_.insert(key);
        return parse_double(it->second, key);
    }

    long long get_int(const std::string& key, long long fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(key);
        const double v = parse_double(it->second, key);
        const long long i = (long long)(v);
        if (double(i) != v)
            throw qfalab::ConfigError(where(it->second.line) + "`" + key + "` must be an integer");
        return i;
    }

    bool get_bool(const std::string& key, bool fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(key);
        const std::string& t = it->second.text;
        if (t == "true" || t == "1" || t == "yes") return true;
        if (t == "false" || t == "0" || t == "no") return false;
        throw qfalab::ConfigError(where(it->second.line) + "`" + key + "` must be a boolean");
    }

    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        consumed_.insert(key);
        std::vector<int> out;
        std::stringstream ss(it->second.text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string s = strip(item);
            if (s.empty()) throw qfalab::ConfigError(where(it->second.line) + "empty list element");
            char* end = nullptr;
            const long v = std::strtol(s.c_str(), &end, 10);
            if (end == s.c_str() || *end != '\0')
                throw qfalab::ConfigError(where(it->second.line) + "`" + key + "`: bad integer `" + s + "`");
            out.push_back(int(v));
        }
        if (out.empty()) throw qfalab::ConfigError(where(it->second.line) + "`" + key + "` is empty");
        return out;
    }

    /// Any key the command never consumed is a schema violation.
    void reject_unknown() const {
        for (const auto& [key, value] : values_)
            if (!consumed_.count(key))
                throw qfalab::ConfigError(where(value.line) + "unknown key `" + key + "`");
    }

  private:
    static std::string strip(const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace((unsigned char)(s[b]))) ++b;
        while (e > b && std::isspace((unsigned char)(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    std::string where(int line) const { return name_ + ":" + std::to_string(line) + ": "; }

    double parse_double(const ConfigValue& v, const std::string& key) const {
        char* end = nullptr;
        const double x = std::strtod(v.text.c_str(), &end);
        if (end == v.text.c_str() || *end != '\0')
            throw qfalab::ConfigError(where(v.line) + "`" + key + "`: bad number `" + v.text + "`");
        return x;
    }

    std::string name_, text_;
    std::map<std::string, ConfigValue> values_;
    std::set<std::string> consumed_;
};

}  // namespace qfatool
