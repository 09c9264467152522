#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sobmat {

/// One named check: a measured statistic against its threshold. `pass` is
/// authoritative; for residual-style checks it means value <= tolerance, for
/// bound-style checks (minimum eigenvalue, positive determinant) the note
/// says what was required.
struct CheckRecord {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    std::optional<double> worst_z;
    std::string note;

    static CheckRecord residual(std::string name, double value, double tol,
                                std::optional<double> worst_z = std::nullopt,
                                std::string note = {}) {
        CheckRecord r;
        r.name = std::move(name);
        r.value = value;
        r.tolerance = tol;
        r.pass = value <= tol;
        r.worst_z = worst_z;
        r.note = std::move(note);
        return r;
    }

    static CheckRecord bound(std::string name, double value, double tol, bool pass,
                             std::optional<double> worst_z = std::nullopt,
                             std::string note = {}) {
        CheckRecord r;
        r.name = std::move(name);
        r.value = value;
        r.tolerance = tol;
        r.pass = pass;
        r.worst_z = worst_z;
        r.note = std::move(note);
        return r;
    }
};

/// Structured result of a verification pass, serializable to JSON. `details`
/// carries check-specific payloads (deviation matrices, per-point tables).
struct VerificationReport {
    std::vector<CheckRecord> checks;
    std::vector<std::string> warnings;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();

    bool overall_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    void add(CheckRecord c) { checks.push_back(std::move(c)); }

    void warn(std::string msg) { warnings.push_back(std::move(msg)); }

    /// Appends another report's records, optionally prefixing check names.
    void merge(const VerificationReport& other, const std::string& prefix = {}) {
        for (auto c : other.checks) {
            if (!prefix.empty()) c.name = prefix + "." + c.name;
            checks.push_back(std::move(c));
        }
        for (const auto& w : other.warnings) warnings.push_back(w);
        for (auto it = other.details.begin(); it != other.details.end(); ++it)
            details[prefix.empty() ? it.key() : prefix + "." + it.key()] = it.value();
    }

    const CheckRecord* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["checks"] = nlohmann::ordered_json::array();
        for (const auto& c : checks) {
            nlohmann::ordered_json jc;
            jc["name"] = c.name;
            jc["max_residual"] = c.value;
            jc["tolerance"] = c.tolerance;
            jc["pass"] = c.pass;
            if (c.worst_z) jc["worst_z"] = *c.worst_z;
            if (!c.note.empty()) jc["note"] = c.note;
            j["checks"].push_back(std::move(jc));
        }
        if (!warnings.empty()) j["warnings"] = warnings;
        if (!details.empty()) j["details"] = details;
        j["overall_pass"] = overall_pass();
        return j;
    }
};

}  // namespace sobmat
