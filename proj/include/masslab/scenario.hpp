#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "masslab/errors.hpp"

namespace masslab {

enum class ScenarioKind {
    free_covariance,
    ep_check,
    bargmann_scan,
    algebra_check,
    poincare_reduction,
};

inline const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::free_covariance: return "free_covariance";
        case ScenarioKind::ep_check: return "ep_check";
        case ScenarioKind::bargmann_scan: return "bargmann_scan";
        case ScenarioKind::algebra_check: return "algebra_check";
        case ScenarioKind::poincare_reduction: return "poincare_reduction";
    }
    return "?";
}

/// Parsed scenario file: flat `key = value` lines grouped by `[section]`
/// headers, `#` comments, keys addressed as "section.key". The full schema
/// is documented in the repository README.
class ScenarioConfig {
  public:
    static ScenarioConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open scenario file: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    static ScenarioConfig parse(const std::string& text, const std::string& origin = "<memory>") {
        ScenarioConfig cfg;
        cfg.origin_ = origin;
        std::istringstream in(text);
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw config_error(origin + ":" + std::to_string(lineno) +
                                       ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error(origin + ":" + std::to_string(lineno) +
                                   ": expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
            if (!section.empty()) key = section + "." + key;
            cfg.values_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string raw(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end())
            throw config_error("missing field '" + key + "' in " + origin_);
        return it->second;
    }

    std::string get_string(const std::string& key) const { return raw(key); }
    std::string get_string(const std::string& key, const std::string& fallback) const {
        return has(key) ? raw(key) : fallback;
    }

    double get_double(const std::string& key) const { return to_double(key, raw(key)); }
    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    std::size_t get_size(const std::string& key) const {
        const double d = get_double(key);
        if (d < 0 || d != std::floor(d))
            throw config_error("field '" + key + "' must be a non-negative integer");
        return static_cast<std::size_t>(d);
    }
    std::size_t get_size(const std::string& key, std::size_t fallback) const {
        return has(key) ? get_size(key) : fallback;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        std::string v = raw(key);
        std::transform(v.begin(), v.end(), v.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "off" || v == "0" || v == "no") return false;
        throw config_error("field '" + key + "' must be a boolean");
    }

    std::vector<double> get_list(const std::string& key) const {
        std::vector<double> out;
        std::istringstream ss(raw(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            out.push_back(to_double(key, item));
        }
        if (out.empty()) throw config_error("field '" + key + "' is an empty list");
        return out;
    }
    std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
        return has(key) ? get_list(key) : std::move(fallback);
    }

    /// A per-channel list: a single value broadcasts to `count` entries.
    std::vector<double> get_broadcast_list(const std::string& key, std::size_t count,
                                           double fallback) const {
        if (!has(key)) return std::vector<double>(count, fallback);
        std::vector<double> v = get_list(key);
        if (v.size() == 1) return std::vector<double>(count, v[0]);
        if (v.size() != count)
            throw config_error("field '" + key + "' must carry 1 or " +
                               std::to_string(count) + " entries");
        return v;
    }

    ScenarioKind kind() const {
        const std::string s = raw("scenario");
        if (s == "free_covariance") return ScenarioKind::free_covariance;
        if (s == "ep_check") return ScenarioKind::ep_check;
        if (s == "bargmann_scan") return ScenarioKind::bargmann_scan;
        if (s == "algebra_check") return ScenarioKind::algebra_check;
        if (s == "poincare_reduction") return ScenarioKind::poincare_reduction;
        throw config_error("field 'scenario' has unknown value '" + s + "'");
    }

    /// All key/value pairs in deterministic (sorted) order, for report echo.
    const std::map<std::string, std::string>& entries() const { return values_; }

    const std::string& origin() const { return origin_; }

  private:
    static std::string trim(const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    static double to_double(const std::string& key, const std::string& text) {
        std::string v = text;
        std::transform(v.begin(), v.end(), v.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
        try {
            std::size_t pos = 0;
            const double d = std::stod(text, &pos);
            if (pos != text.size())
                throw config_error("field '" + key + "' has trailing characters: '" + text + "'");
            return d;
        } catch (const config_error&) {
            throw;
        } catch (const std::exception&) {
            throw config_error("field '" + key + "' is not a number: '" + text + "'");
        }
    }

    std::map<std::string, std::string> values_;
    std::string origin_;
};

}  // namespace masslab
