#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ness/ensembles.hpp"
#include "ness/ribbon.hpp"

namespace ness {

using Json = nlohmann::json;

enum class Experiment {
    fig1_fermion_scatter,
    fig2_designed_scatter,
    fig3_gamma_absolute,
    fig4_boson_scatter,
    ribbon_demo,
    single_system,
};

std::string_view to_string(Experiment e) noexcept;
Experiment experiment_from_string(std::string_view s);

struct RibbonDemoConfig {
    std::vector<int> d_values{1, 2, 4};
    int range = 2;
    int n_k = 128;
};

struct RunConfig {
    Experiment experiment = Experiment::fig1_fermion_scatter;
    int n_realizations = 1000;
    std::uint64_t seed = 42;
    EnsembleConfig ensemble;
    std::array<double, 2> lambda_log_range{-5.0, 5.0};
    std::array<double, 2> gamma_log_range{-5.0, 5.0};
    /// When set, every realization uses this λ instead of a log-uniform draw.
    std::optional<double> lambda_fixed;
    /// Replace sampled A and D by their diagonals (commuting-channel checks).
    bool diagonal_channels = false;
    RibbonDemoConfig ribbon;
    ToleranceConfig tolerances;
    /// Solver failures above this fraction of realizations make the run fail.
    double max_failure_fraction = 0.01;
    std::string output_path;
    /// single_system only: path of the matrices file.
    std::string input_path;

    void validate() const;
};

/// Defaults for an experiment kind (m_A = 10 for the designed runs, etc.).
RunConfig default_run_config(Experiment e);

/// Parses a run config; unknown keys are rejected with ConfigError.
RunConfig parse_run_config(const Json& j);
RunConfig load_run_config(const std::string& path);
Json to_json(const RunConfig& c);

Json to_json(const EnsembleConfig& c);
EnsembleConfig parse_ensemble_config(const Json& j, EnsembleConfig base = {});

Json to_json(const ToleranceConfig& t);
ToleranceConfig parse_tolerances(const Json& j, ToleranceConfig base = {});

/// A matrix is either a nested array of reals or {"re": [[...]], "im": [[...]]}.
Matrix parse_matrix(const Json& j, const std::string& name);
Json matrix_to_json(const Matrix& m);

/// Ribbon file: {"d", "n_k", "hoppings_H", "hoppings_A", "hoppings_D"} with
/// hopping entries {"r", "re", "im"}.
RibbonSpec parse_ribbon_spec(const Json& j);
Json to_json(const RibbonSpec& spec);

Json read_json_file(const std::string& path);

}  // namespace ness
