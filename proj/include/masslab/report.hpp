#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "masslab/errors.hpp"
#include "masslab/state.hpp"
#include "masslab/verify.hpp"

namespace masslab {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Machine-readable outcome of one scenario run. Everything except the
/// `timing.` lines is deterministic for a given config on one platform.
struct RunReport {
    std::string scenario;
    std::map<std::string, std::string> config_echo;
    std::vector<std::pair<std::string, std::string>> metrics;  // emission order
    std::vector<CheckResult> checks;
    std::vector<LoopScanPoint> scan;  // populated by scan scenarios
    std::vector<std::pair<std::string, SuperpositionState>> states;  // snapshot candidates
    double wall_seconds = 0.0;

    void metric(const std::string& name, double value) {
        metrics.emplace_back(name, format_double(value));
    }
    void metric(const std::string& name, const std::string& value) {
        metrics.emplace_back(name, value);
    }
    void check(const std::string& name, bool pass, const std::string& detail) {
        checks.push_back(CheckResult{name, pass, detail});
    }

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    /// Line-oriented report text: `key = value` per line.
    std::string to_text() const {
        std::string out;
        out += "scenario = " + scenario + "\n";
        for (const auto& [k, v] : config_echo) out += "config." + k + " = " + v + "\n";
        for (const auto& [k, v] : metrics) out += "metric." + k + " = " + v + "\n";
        for (const auto& c : checks)
            out += "check." + c.name + " = " + (c.pass ? "PASS" : "FAIL") +
                   (c.detail.empty() ? "" : " (" + c.detail + ")") + "\n";
        out += std::string("result = ") + (pass() ? "PASS" : "FAIL") + "\n";
        out += "timing.wall_seconds = " + format_double(wall_seconds) + "\n";
        return out;
    }

    std::string scan_csv() const {
        std::string out = "av,fidelity,predicted\n";
        for (const auto& p : scan)
            out += format_double(p.av) + "," + format_double(p.fidelity) + "," +
                   format_double(p.predicted) + "\n";
        return out;
    }
};

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw error("cannot open for writing: " + path);
    out << text;
    if (!out) throw error("write failed: " + path);
}

}  // namespace masslab
