#pragma once

#include <cstdint>
#include <cstdio>
#include <json.hpp>
#include <random>
#include <string>
#include <vector>

#include "sobmat/polynomial.hpp"
#include "sobmat/weight.hpp"

namespace sobmat {

/// Renders a polynomial as expression text with %.17g coefficients, so the
/// parsed form evaluates to the exact same doubles.
inline std::string polynomial_to_expr(const Polynomial& p) {
    if (p.is_zero()) return "0";
    std::string out;
    char buf[48];
    const auto& c = p.coeffs();
    for (std::size_t k = c.size(); k-- > 0;) {
        if (c[k] == 0.0 && c.size() > 1) continue;
        const double mag = std::abs(c[k]);
        if (out.empty()) {
            if (c[k] < 0) out += "-";
        } else {
            out += (c[k] < 0) ? " - " : " + ";
        }
        std::snprintf(buf, sizeof(buf), "%.17g", mag);
        out += buf;
        if (k == 1) out += "*z";
        else if (k > 1) {
            out += "*z^";
            out += std::to_string(k);
        }
    }
    return out.empty() ? "0" : out;
}

/// Entry expressions of the weight L(z) L(z)^T + shift*I with a random lower
/// triangular polynomial factor. Positive definite by construction with
/// minimum eigenvalue >= shift everywhere.
inline std::vector<std::vector<std::string>> random_spd_weight_exprs(int rho, int factor_degree,
                                                                     std::uint64_t seed,
                                                                     double shift = 0.1) {
    const int d = rho + 1;
    std::mt19937_64 rng(seed);
    std::vector<std::vector<Polynomial>> L(d);
    for (int i = 0; i < d; ++i) {
        L[i].resize(d);
        for (int j = 0; j <= i; ++j) L[i][j] = random_polynomial(factor_degree, rng);
    }
    std::vector<std::vector<std::string>> grid(d, std::vector<std::string>(d));
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            Polynomial sum;
            for (int k = 0; k <= std::min(i, j); ++k) sum = sum + L[i][k] * L[j][k];
            if (i == j) sum = sum + Polynomial::constant(shift);
            grid[i][j] = polynomial_to_expr(sum);
            grid[j][i] = grid[i][j];  // textual symmetry, exact under evaluation
        }
    return grid;
}

/// Seeded SPD polynomial weight on [a,b].
inline MatrixWeight random_spd_weight(int rho, double a, double b, int factor_degree,
                                      std::uint64_t seed, double shift = 0.1) {
    return MatrixWeight::parse(rho, a, b, random_spd_weight_exprs(rho, factor_degree, seed, shift));
}

/// Full config JSON for a seeded SPD fixture, as consumed by the CLI.
inline nlohmann::ordered_json spd_weight_config_json(int rho, double a, double b,
                                                     int factor_degree, std::uint64_t seed,
                                                     int grid_points = 201) {
    nlohmann::ordered_json j;
    j["interval"] = {a, b};
    j["rho"] = rho;
    j["weight"] = random_spd_weight_exprs(rho, factor_degree, seed);
    j["density"] = "1";
    j["grid_points"] = grid_points;
    j["seed"] = seed;
    return j;
}

}  // namespace sobmat
