#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path(NESS_TEST_WORK_DIR) / "cli";

fs::path config(const std::string& name) { return fs::path(NESS_CONFIG_DIR) / name; }

int ness(const std::string& args, const std::string& stdout_file = "/dev/null") {
    const std::string cmd =
        std::string(NESS_CLI_PATH) + " " + args + " > " + stdout_file + " 2> " + (kWork / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path write(const std::string& name, const std::string& text) {
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("ness run: shipped configs succeed and are byte-reproducible") {
    fs::create_directories(kWork);
    for (const char* name : {"fig1", "fig2", "fig3", "fig4", "ribbon_demo"}) {
        CAPTURE(name);
        const fs::path first = kWork / (std::string(name) + "_a.csv");
        const fs::path second = kWork / (std::string(name) + "_b.csv");
        const std::string cfg = config(std::string(name) + ".json").string();
        CHECK(ness("run --config " + cfg + " --out " + first.string()) == 0);
        CHECK(ness("run --config " + cfg + " --jobs 2 --out " + second.string()) == 0);
        const std::string a = slurp(first);
        CHECK(!a.empty());
        CHECK(a == slurp(second));
    }
}

TEST_CASE("ness run: summary on stdout, seed override changes the data") {
    const fs::path summary = kWork / "summary.json";
    const fs::path csv = kWork / "seeded.csv";
    const std::string cfg = config("fig1.json").string();
    REQUIRE(ness("run --config " + cfg + " --seed 5 --out " + csv.string(), summary.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(summary));
    CHECK(j["seed"] == 5);
    CHECK(j["bound_violations"] == 0);
    CHECK(slurp(csv) != slurp(kWork / "fig1_a.csv"));
}

TEST_CASE("ness run --validate-only echoes the parsed config") {
    const fs::path out = kWork / "validated.json";
    REQUIRE(ness("run --validate-only --config " + config("fig4.json").string(), out.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["experiment"] == "fig4_boson_scatter");
    CHECK(j["seed"] == 7);
}

TEST_CASE("ness run: config errors exit with 1") {
    CHECK(ness("run --config " + (kWork / "missing.json").string()) == 1);
    CHECK(ness("run --config " + write("bad_json.json", "{ not json").string()) == 1);
    CHECK(ness("run --config " + write("unknown_key.json", R"({"experiment": "fig1_fermion_scatter", "x": 1})").string()) == 1);
    CHECK(ness("run --config " + write("bad_range.json",
                                       R"({"experiment": "fig1_fermion_scatter", "lambda_log_range": [1]})")
                                     .string()) == 1);
    CHECK(ness("run") == 1);
    CHECK(ness("frobnicate") == 1);
}

TEST_CASE("ness run: solver failures above the allowed fraction exit with 2") {
    // seed 7 contains one draw whose P is too ill-conditioned to meet the residual tolerance
    const fs::path cfg = write("strict_fig4.json", R"({"experiment": "fig4_boson_scatter", "n_realizations": 1000,
                                                       "seed": 7, "max_failure_fraction": 0.0})");
    CHECK(ness("run --config " + cfg.string() + " --out " + (kWork / "strict.csv").string()) == 2);
}

TEST_CASE("ness run: a detected bound violation exits with 3") {
    // Single bosonic modes sit exactly on J_min, so with a zero-width slack
    // rounding alone puts some of them a hair below the bound.
    const fs::path cfg = write("tight_fig4.json", R"({"experiment": "fig4_boson_scatter", "n_realizations": 200,
                                                      "seed": 1, "ensemble": {"m": 1, "m_A": 1, "m_P": 1},
                                                      "tolerances": {"bound": 1e-300}})");
    CHECK(ness("run --config " + cfg.string() + " --out " + (kWork / "tight.csv").string()) == 3);
}

TEST_CASE("ness single") {
    const fs::path out = kWork / "single.json";
    REQUIRE(ness("single --input " + config("single_fermion.json").string(), out.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["J"].get<double>() <= j["J_bound"].get<double>());
    CHECK(j["transient"].size() == 4);

    REQUIRE(ness("single --input " + config("single_boson.json").string(), out.string()) == 0);
    const auto b = nlohmann::json::parse(slurp(out));
    CHECK(b["J"].get<double>() >= b["J_bound"].get<double>());

    const fs::path scalar = write("scalar.json", R"({"H": [[0]], "A": [[1]], "D": [[1]]})");
    REQUIRE(ness("single --input " + scalar.string(), out.string()) == 0);
    CHECK(nlohmann::json::parse(slurp(out))["J"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));

    const fs::path bad = write("nonhermitian.json", R"({"H": [[0, 1], [0, 0]], "A": [[1, 0], [0, 1]],
                                                        "D": [[1, 0], [0, 1]]})");
    CHECK(ness("single --input " + bad.string()) == 1);
    CHECK(slurp(kWork / "stderr.txt").find("matrix H") != std::string::npos);

    const fs::path unstable = write("unstable.json", R"({"statistics": "boson", "H": [[0]], "A": [[2]], "D": [[1]]})");
    CHECK(ness("single --input " + unstable.string()) == 2);
    CHECK(ness("single --validate-only --input " + scalar.string()) == 0);

    REQUIRE(ness("run --config " + config("single_system.json").string(), out.string()) == 0);
    CHECK(nlohmann::json::parse(slurp(out)).contains("Q_ness"));
}

TEST_CASE("ness ribbon") {
    const fs::path out = kWork / "ribbon.json";
    const fs::path csv = kWork / "ribbon_nodes.csv";
    REQUIRE(ness("ribbon --config " + config("ribbon_chain.json").string() + " --out " + csv.string(),
                 out.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["j_density"].get<double>() <= j["j_density_bound"].get<double>());
    const std::string nodes = slurp(csv);
    CHECK(nodes.rfind("x,tr_DQ,tr_A_one_minus_Q,local_bound\n", 0) == 0);
    CHECK(std::count(nodes.begin(), nodes.end(), '\n') == 129);

    const fs::path bad = write("bad_ribbon.json", R"({"d": 1, "hoppings_H": [{"r": 1, "re": [[1]]}],
                                                      "hoppings_A": [{"r": 0, "re": [[1]]}],
                                                      "hoppings_D": [{"r": 0, "re": [[1]]}]})");
    CHECK(ness("ribbon --config " + bad.string()) == 1);
    CHECK(ness("ribbon --validate-only --config " + config("ribbon_chain.json").string()) == 0);
}
