// Command-line entry point: seeded scatter experiments, single-system NESS
// reports and ribbon current densities.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ness/config.hpp"
#include "ness/experiments.hpp"
#include "ness/ribbon.hpp"

namespace {

bool is_input_error(ness::ErrorCode code) {
    using ness::ErrorCode;
    switch (code) {
        case ErrorCode::NotSquare:
        case ErrorCode::NotHermitian:
        case ErrorCode::NotPsd:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::InvalidHopping:
        case ErrorCode::InvalidArgument:
        case ErrorCode::SymbolNotPsd:
        case ErrorCode::ConfigError:
            return true;
        default:
            return false;
    }
}

// Writes to `path`, or to stdout when path is empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ness::Error(ness::ErrorCode::ConfigError, "cannot write '" + path + "'");
    fn(out);
}

bool to_stdout(const std::string& path) { return path.empty() || path == "-"; }

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_override,
            int jobs, bool validate_only) {
    ness::RunConfig config = ness::load_run_config(config_path);
    if (seed) {
        config.seed = *seed;
        config.ensemble.seed = *seed;
    }
    if (!out_override.empty()) config.output_path = out_override;
    if (validate_only) {
        std::cout << ness::to_json(config).dump(2) << '\n';
        return ness::kExitOk;
    }

    if (config.experiment == ness::Experiment::single_system) {
        // A relative input path is taken relative to the config file.
        std::filesystem::path input(config.input_path);
        if (input.is_relative()) input = std::filesystem::path(config_path).parent_path() / input;
        const ness::Json report = ness::run_single(ness::read_json_file(input.string()), config.tolerances);
        with_output(config.output_path, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
        return ness::kExitOk;
    }

    const ness::RunResult result = ness::run_experiment(config, jobs);
    with_output(config.output_path, [&](std::ostream& os) { ness::write_csv(os, result); });
    std::ostream& summary_stream = to_stdout(config.output_path) ? std::cerr : std::cout;
    summary_stream << result.summary.dump(2) << '\n';
    return result.exit_code;
}

int cmd_single(const std::string& input_path, const std::string& out, bool validate_only) {
    const ness::Json input = ness::read_json_file(input_path);
    if (validate_only) {
        // run_single validates every matrix before solving; a dry run only parses.
        for (const char* key : {"H", "A", "D"}) {
            if (!input.contains(key)) {
                throw ness::Error(ness::ErrorCode::ConfigError, std::string("input requires matrix ") + key);
            }
            ness::parse_matrix(input.at(key), key);
        }
        std::cout << "{\"valid\": true}\n";
        return ness::kExitOk;
    }
    const ness::Json report = ness::run_single(input);
    with_output(out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
    return ness::kExitOk;
}

int cmd_ribbon(const std::string& config_path, const std::string& out, bool validate_only) {
    const ness::Json j = ness::read_json_file(config_path);
    const ness::RibbonSpec spec = ness::parse_ribbon_spec(j);
    if (validate_only) {
        std::cout << ness::to_json(spec).dump(2) << '\n';
        return ness::kExitOk;
    }
    const ness::RibbonReport report = ness::current_density(spec);
    std::string csv_path = out;
    if (csv_path.empty() && j.contains("output_path")) csv_path = j.at("output_path").get<std::string>();
    if (!csv_path.empty()) {
        with_output(csv_path, [&](std::ostream& os) { ness::write_ribbon_csv(os, report); });
    }
    std::cout << ness::to_json(report).dump(2) << '\n';
    const double slack = ness::default_tolerances().bound;
    return report.j_density > report.j_density_bound * (1.0 + slack) ? ness::kExitBoundViolation : ness::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state currents of open non-interacting fermion and boson systems"};
    app.require_subcommand(1);

    std::string config_path, input_path, out_path;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    bool validate_only = false;

    CLI::App* run = app.add_subcommand("run", "Run a seeded scatter experiment from a JSON config");
    run->add_option("--config", config_path, "Run config (JSON)")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out_path, "CSV output path ('-' for stdout)");
    run->add_option("--jobs", jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    run->add_flag("--validate-only", validate_only, "Parse and echo the config without running");

    CLI::App* single = app.add_subcommand("single", "NESS report for explicit H, A, D matrices");
    single->add_option("--input", input_path, "Matrices file (JSON)")->required();
    single->add_option("--out", out_path, "Report output path");
    single->add_flag("--validate-only", validate_only, "Parse the input without solving");

    CLI::App* ribbon = app.add_subcommand("ribbon", "Current density of a shift-invariant ribbon");
    ribbon->add_option("--config", config_path, "Ribbon spec (JSON)")->required();
    ribbon->add_option("--out", out_path, "Per-momentum CSV output path");
    ribbon->add_flag("--validate-only", validate_only, "Parse and echo the ribbon spec without solving");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ness::kExitConfigError;
    }

    try {
        if (*run) return cmd_run(config_path, seed, out_path, jobs, validate_only);
        if (*single) return cmd_single(input_path, out_path, validate_only);
        if (*ribbon) return cmd_ribbon(config_path, out_path, validate_only);
    } catch (const ness::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return is_input_error(e.code()) ? ness::kExitConfigError : ness::kExitSolverFailure;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << '\n';
        return ness::kExitConfigError;
    }
    return ness::kExitOk;
}
