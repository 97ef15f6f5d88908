// Machine-readable suite reports. Serialization is deterministic: checks are
// sorted by id, keys keep insertion order, and expected/computed values are
// strings so golden files never depend on numeric formatting. The "ms" timing
// fields are the only nondeterministic part; comparisons normalize them away.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace su4check {

struct CheckResult {
    std::string id;
    std::string anchor; // claim label, or "plumbing"
    std::string expected;
    std::string computed;
    bool pass = false;
    double ms = 0.0;
};

struct SuiteReport {
    std::string suite;
    int prime = 0;
    std::vector<CheckResult> checks;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    void sort_checks() {
        std::stable_sort(checks.begin(), checks.end(),
                         [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
    }
};

inline nlohmann::ordered_json report_to_json(const SuiteReport& rep) {
    nlohmann::ordered_json j;
    j["suite"] = rep.suite;
    j["prime"] = rep.prime;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : rep.checks) {
        nlohmann::ordered_json cj;
        cj["id"] = c.id;
        cj["anchor"] = c.anchor;
        cj["expected"] = c.expected;
        cj["computed"] = c.computed;
        cj["pass"] = c.pass;
        cj["ms"] = c.ms;
        j["checks"].push_back(cj);
    }
    j["pass"] = rep.pass();
    return j;
}

inline std::string report_to_text(const SuiteReport& rep) {
    std::string out = "suite " + rep.suite + " (p = " + std::to_string(rep.prime) + ")\n";
    for (const auto& c : rep.checks) {
        out += c.pass ? "  pass  " : "  FAIL  ";
        out += c.id + "  expected=" + c.expected + "  computed=" + c.computed;
        out += "  [" + c.anchor + "]\n";
    }
    out += rep.pass() ? "PASS\n" : "FAIL\n";
    return out;
}

// strip timing so reruns compare byte-identically
inline nlohmann::ordered_json normalize_timestamps(nlohmann::ordered_json j) {
    if (j.contains("checks")) {
        for (auto& c : j["checks"]) c["ms"] = 0.0;
    }
    return j;
}

inline bool reports_equal_modulo_timestamps(const nlohmann::ordered_json& a,
                                            const nlohmann::ordered_json& b) {
    return normalize_timestamps(a).dump(2) == normalize_timestamps(b).dump(2);
}

class CheckTimer {
  public:
    CheckTimer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        auto end = std::chrono::steady_clock::now();
        return std::chrono::duration<double, std::milli>(end - start_).count();
    }
    void reset() { start_ = std::chrono::steady_clock::now(); }

  private:
    std::chrono::steady_clock::time_point start_;
};

// helper for suite builders
class SuiteBuilder {
  public:
    SuiteBuilder(std::string suite, int prime) {
        rep_.suite = std::move(suite);
        rep_.prime = prime;
    }

    template <class T, class U>
    void check(const std::string& id, const std::string& anchor, const T& expected,
               const U& computed) {
        CheckResult c;
        c.id = id;
        c.anchor = anchor;
        c.expected = to_str(expected);
        c.computed = to_str(computed);
        c.pass = c.expected == c.computed;
        c.ms = timer_.ms();
        timer_.reset();
        rep_.checks.push_back(std::move(c));
    }

    SuiteReport finish() {
        rep_.sort_checks();
        return std::move(rep_);
    }

  private:
    static std::string to_str(const std::string& s) { return s; }
    static std::string to_str(const char* s) { return s; }
    static std::string to_str(bool b) { return b ? "true" : "false"; }
    template <class T>
    static std::string to_str(const T& v) {
        return std::to_string(v);
    }
    static std::string to_str(const std::vector<int>& v) {
        std::string s = "(";
        for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s + ")";
    }
    static std::string to_str(const std::vector<std::uint64_t>& v) {
        std::string s = "(";
        for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s + ")";
    }

    SuiteReport rep_;
    CheckTimer timer_;
};

} // namespace su4check
