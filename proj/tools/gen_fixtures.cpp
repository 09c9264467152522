// Regenerates the JSON fixture configs under configs/. The seeded SPD weights
// are the weights the test suite builds in memory; keeping the files
// generated guarantees the CLI route and the in-process route agree.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "sobmat/fixtures.hpp"

using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kBaseSeed = 0x5EED;

void write(const std::filesystem::path& dir, const std::string& name, const ordered_json& j) {
    const auto path = dir / name;
    std::ofstream out(path);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        std::exit(1);
    }
    out << j.dump(2) << "\n";
    std::cout << "wrote " << path << "\n";
}

ordered_json manual_config(int rho, std::vector<std::vector<std::string>> weight) {
    ordered_json j;
    j["interval"] = {-1.0, 1.0};
    j["rho"] = rho;
    j["weight"] = std::move(weight);
    j["density"] = "1";
    j["grid_points"] = 201;
    j["seed"] = kBaseSeed;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "configs";
    std::filesystem::create_directories(dir);

    write(dir, "example1.json", manual_config(1, {{"1", "0"}, {"0", "z^2+1"}}));
    write(dir, "identity_rho1.json", manual_config(1, {{"1", "0"}, {"0", "1"}}));
    write(dir, "identity_rho2.json",
          manual_config(2, {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}}));

    // Weight that loses full rank at z <= 0; validation must reject it.
    write(dir, "rank_deficient.json", manual_config(1, {{"1", "0"}, {"0", "z"}}));

    // Free row forcing det B = 0 everywhere: b_{1,0} = 0 removes the only
    // entry of column 0, so the build is rejected by the det-B scan.
    {
        auto j = manual_config(1, {{"1", "0"}, {"0", "z^2+1"}});
        j["free_row"] = {"0", "1"};
        write(dir, "example1_degenerate_free_row.json", j);
    }

    // Seeded SPD fixtures, L(z) L(z)^T + 0.1 I with degree-3 factors.
    write(dir, "spd_rho1.json", sobmat::spd_weight_config_json(1, -1.0, 1.0, 3, kBaseSeed + 100));
    write(dir, "spd_rho2.json", sobmat::spd_weight_config_json(2, -1.0, 1.0, 3, kBaseSeed + 200));

    // Conjecture probes at rho = 3 on a 101-point grid.
    for (int k = 0; k < 3; ++k) {
        const char suffix = static_cast<char>('a' + k);
        write(dir, std::string("conjecture_rho3_") + suffix + ".json",
              sobmat::spd_weight_config_json(3, -1.0, 1.0, 3, kBaseSeed + 300 + k, 101));
    }
    return 0;
}
