#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sobmat/functions.hpp"
#include "sobmat/weight.hpp"

namespace sobmat {

/// Invalid or inconsistent configuration (as opposed to unparseable text).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double symmetry = 1e-10;
    double orthogonality = 1e-8;
    double factorization = 1e-10;
    double singular = 1e-12;
};

/// Run configuration, read from a JSON file. Example:
///   {"interval":[-1,1],"rho":1,"weight":[["1","0"],["0","z^2+1"]],
///    "density":"1","grid_points":201,"seed":24301}
struct Config {
    double a = -1.0;
    double b = 1.0;
    int rho = 1;
    std::vector<std::vector<std::string>> weight;  // (rho+1) x (rho+1) expression texts
    std::string density = "1";
    int grid_points = 201;
    int quad_max_order = 512;
    Tolerances tolerances;
    std::uint64_t seed = 0x5EED;
    std::optional<std::vector<std::string>> free_row;

    static Config from_json(const nlohmann::json& j) {
        Config cfg;
        if (j.contains("interval")) {
            const auto& iv = j.at("interval");
            if (!iv.is_array() || iv.size() != 2)
                throw ConfigError("interval must be an array [a, b]");
            cfg.a = iv[0].get<double>();
            cfg.b = iv[1].get<double>();
        }
        if (j.contains("rho")) cfg.rho = j.at("rho").get<int>();
        if (!j.contains("weight")) throw ConfigError("missing required field: weight");
        cfg.weight = j.at("weight").get<std::vector<std::vector<std::string>>>();
        if (j.contains("density")) cfg.density = j.at("density").get<std::string>();
        if (j.contains("grid_points")) cfg.grid_points = j.at("grid_points").get<int>();
        if (j.contains("quad_max_order")) cfg.quad_max_order = j.at("quad_max_order").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("free_row"))
            cfg.free_row = j.at("free_row").get<std::vector<std::string>>();
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            if (t.contains("symmetry")) cfg.tolerances.symmetry = t.at("symmetry").get<double>();
            if (t.contains("orthogonality"))
                cfg.tolerances.orthogonality = t.at("orthogonality").get<double>();
            if (t.contains("factorization"))
                cfg.tolerances.factorization = t.at("factorization").get<double>();
            if (t.contains("singular")) cfg.tolerances.singular = t.at("singular").get<double>();
        }
        cfg.validate();
        return cfg;
    }

    /// Reads and parses the file. Missing files raise ConfigError; malformed
    /// JSON propagates nlohmann's parse_error.
    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        nlohmann::json j = nlohmann::json::parse(in);
        return from_json(j);
    }

    void validate() const {
        if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
            throw ConfigError("interval must be finite with a < b");
        if (rho < 0) throw ConfigError("rho must be >= 0");
        const std::size_t d = static_cast<std::size_t>(rho) + 1;
        if (weight.size() != d)
            throw ConfigError("weight grid must be square of size rho+1 = " + std::to_string(d));
        for (const auto& row : weight)
            if (row.size() != d)
                throw ConfigError("weight grid must be square of size rho+1 = " +
                                  std::to_string(d));
        if (grid_points < 2) throw ConfigError("grid_points must be >= 2");
        if (quad_max_order < 1) throw ConfigError("quad_max_order must be >= 1");
        if (tolerances.symmetry <= 0 || tolerances.orthogonality <= 0 ||
            tolerances.factorization <= 0 || tolerances.singular <= 0)
            throw ConfigError("all tolerances must be positive");
        if (free_row && free_row->size() != d)
            throw ConfigError("free_row must have rho+1 entries");
    }

    /// Parses the weight expressions. ParseError carries the entry location.
    MatrixWeight make_weight() const { return MatrixWeight::parse(rho, a, b, weight, density); }

    /// Parses the configured free row, if any.
    std::optional<std::vector<ScalarFunction>> make_free_row() const {
        if (!free_row) return std::nullopt;
        std::vector<ScalarFunction> fns;
        fns.reserve(free_row->size());
        for (std::size_t k = 0; k < free_row->size(); ++k) {
            try {
                fns.push_back(ScalarFunction::from_expr(parse_expr((*free_row)[k])));
            } catch (const ParseError& e) {
                throw ParseError("free_row[" + std::to_string(k) + "]: " + e.what(), e.offset());
            }
        }
        return fns;
    }

    /// Effective configuration (defaults filled in), echoed into reports.
    nlohmann::ordered_json echo() const {
        nlohmann::ordered_json j;
        j["interval"] = {a, b};
        j["rho"] = rho;
        j["weight"] = weight;
        j["density"] = density;
        j["grid_points"] = grid_points;
        j["quad_max_order"] = quad_max_order;
        j["tolerances"] = {{"symmetry", tolerances.symmetry},
                           {"orthogonality", tolerances.orthogonality},
                           {"factorization", tolerances.factorization},
                           {"singular", tolerances.singular}};
        j["seed"] = seed;
        if (free_row) j["free_row"] = *free_row;
        return j;
    }
};

}  // namespace sobmat
