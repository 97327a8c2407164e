#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ness/config.hpp"
#include "ness/fermion.hpp"

namespace ness {

/// One realization of a scatter experiment. `param` is λ (fig1/2/4), γ (fig3)
/// or the ribbon width (ribbon_demo). For bosons `bound` is J_min.
struct ScatterRecord {
    int realization = 0;
    double param = 0.0;
    double j = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
    bool designed = false;
    std::map<std::string, double> aux;
    bool ok = true;
    std::string failure;
};

struct RunResult {
    RunConfig config;
    std::vector<ScatterRecord> records;
    Json summary;
    int exit_code = 0;
};

enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,
    kExitSolverFailure = 2,
    kExitBoundViolation = 3,
};

/// Random GOE H with Wishart A, D and log-uniform λ; fermionic upper bound.
RunResult run_fig1(const RunConfig& config, int jobs = 1);
/// Designed systems (D = U†AU, [H, U] = 0) at log-uniform λ.
RunResult run_fig2(const RunConfig& config, int jobs = 1);
/// Fixed channels, rescaled by log-uniform γ; random and designed sub-runs.
RunResult run_fig3(const RunConfig& config, int jobs = 1);
/// Bosons with P, A Wishart and D = P + A; lower bound J_min.
RunResult run_fig4(const RunConfig& config, int jobs = 1);
/// Random shift-invariant ribbons; current density against its bound.
RunResult run_ribbon_demo(const RunConfig& config, int jobs = 1);

/// Dispatches on config.experiment. single_system is not a scatter run and
/// is rejected here; use run_single.
RunResult run_experiment(const RunConfig& config, int jobs = 1);

std::vector<std::string> csv_header(Experiment e);
void write_csv(std::ostream& out, const RunResult& result);

/// Shortest round-trip decimal form, used for every number written to CSV.
std::string format_number(double x);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Full NESS report for explicit matrices:
/// {"statistics", "H", "A", "D", optional "lambda", "times", "Q0"}.
Json run_single(const Json& input, const ToleranceConfig& tol = default_tolerances());

Json to_json(const NessReport& report);
Json to_json(const RibbonReport& report);
void write_ribbon_csv(std::ostream& out, const RibbonReport& report);

/// Runs `task(k)` for k in [0, n) on `jobs` threads; results are indexed by k,
/// so the outcome does not depend on scheduling.
void parallel_for(int n, int jobs, const std::function<void(int)>& task);

}  // namespace ness
