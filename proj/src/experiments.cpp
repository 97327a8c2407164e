#include "ness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <limits>
#include <thread>

#include "ness/boson.hpp"
#include "ness/ensembles.hpp"
#include "ness/ribbon.hpp"

namespace ness {

namespace {

// Stream ids for draws shared by every realization of a run. Realization k
// uses stream k (or 2k / 2k+1 in the two sub-runs of the γ sweep).
constexpr std::uint64_t kFixedRandomChannels = ~std::uint64_t{0};
constexpr std::uint64_t kFixedDesignedChannels = ~std::uint64_t{0} - 1;

double draw_log_uniform(RngStream& rng, const std::array<double, 2>& range) {
    const double u = rng.uniform(range[0], range[1]);
    return std::pow(10.0, range[0] == range[1] ? range[0] : u);
}

double draw_lambda(RngStream& rng, const RunConfig& c) {
    const double lambda = draw_log_uniform(rng, c.lambda_log_range);
    return c.lambda_fixed ? *c.lambda_fixed : lambda;
}

PsdMatrix maybe_diagonal(const PsdMatrix& m, const RunConfig& c) {
    if (!c.diagonal_channels) return m;
    const Matrix diag = m.matrix().diagonal().asDiagonal();
    return validate_psd(diag, c.tolerances);
}

double level_spacing(const HermitianMatrix& h) {
    if (h.dim() < 2) return 1.0;
    const RealVector ev = eigenvalues(h);
    return (ev.maxCoeff() - ev.minCoeff()) / static_cast<double>(h.dim() - 1);
}

void fill_fermion_record(ScatterRecord& rec, const SystemSpec& spec, const NessReport& rep) {
    rec.j = rep.current;
    rec.bound = rep.bound;
    rec.ratio = rep.ratio;
    rec.aux["tr_A"] = spec.A().trace();
    rec.aux["tr_D"] = spec.D().trace();
    rec.aux["particle_number"] = rep.particle_number;
    rec.aux["balance_residual"] = rep.balance_residual;
    rec.aux["q_min"] = rep.q_min_eigenvalue;
    rec.aux["q_max"] = rep.q_max_eigenvalue;
}

using RealizationFn = std::function<ScatterRecord(int)>;

std::vector<ScatterRecord> run_realizations(int n, int jobs, const RealizationFn& fn) {
    std::vector<ScatterRecord> records(static_cast<std::size_t>(n));
    parallel_for(n, jobs, [&](int k) {
        ScatterRecord& rec = records[static_cast<std::size_t>(k)];
        try {
            rec = fn(k);
        } catch (const Error& e) {
            rec = ScatterRecord{};
            rec.ok = false;
            rec.failure = std::string(to_string(e.code()));
        }
        rec.realization = k;
    });
    return records;
}

bool is_boson_experiment(Experiment e) { return e == Experiment::fig4_boson_scatter; }

struct Extremes {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double x) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    Json min_json() const { return std::isfinite(lo) ? Json(lo) : Json(nullptr); }
    Json max_json() const { return std::isfinite(hi) ? Json(hi) : Json(nullptr); }
};

double aux_or(const ScatterRecord& r, const char* key, double fallback) {
    const auto it = r.aux.find(key);
    return it == r.aux.end() ? fallback : it->second;
}

// Common summary block; experiment-specific fields are appended by callers.
Json summarize(const RunConfig& c, const std::vector<ScatterRecord>& records, int& exit_code) {
    const ToleranceConfig& tol = c.tolerances;
    const bool boson = is_boson_experiment(c.experiment);
    std::map<std::string, int> reasons;
    int failures = 0, violations = 0, pauli = 0, balance = 0;
    Extremes ratio, balance_rel;

    for (const ScatterRecord& r : records) {
        if (!r.ok) {
            ++failures;
            ++reasons[r.failure];
            continue;
        }
        ratio.add(r.ratio);
        const bool violated = boson ? r.j < r.bound * (1.0 - tol.bound) : r.j > r.bound * (1.0 + tol.bound);
        if (violated) ++violations;

        if (r.aux.count("q_min")) {
            const double qmin = r.aux.at("q_min");
            const double qmax = aux_or(r, "q_max", 0.0);
            if (qmin < -tol.pauli || (!boson && qmax > 1.0 + tol.pauli)) ++pauli;
        }
        if (r.aux.count("balance_residual")) {
            const double rel = r.aux.at("balance_residual") / std::max(1.0, r.j);
            balance_rel.add(rel);
            if (rel > tol.balance) ++balance;
        }
    }

    Json s;
    s["experiment"] = std::string(to_string(c.experiment));
    s["seed"] = c.seed;
    s["n_realizations"] = c.n_realizations;
    s["n_records"] = static_cast<int>(records.size());
    s["n_ok"] = static_cast<int>(records.size()) - failures;
    s["n_failures"] = failures;
    s["failure_reasons"] = reasons;
    s["bound_violations"] = violations;
    s["min_ratio"] = ratio.min_json();
    s["max_ratio"] = ratio.max_json();
    s[boson ? "positivity_violations" : "pauli_violations"] = pauli;
    s["balance_violations"] = balance;
    s["max_balance_residual_relative"] = balance_rel.max_json();

    const double allowed = c.max_failure_fraction * static_cast<double>(records.size());
    if (violations > 0) {
        exit_code = kExitBoundViolation;
    } else if (static_cast<double>(failures) > allowed) {
        exit_code = kExitSolverFailure;
    } else {
        exit_code = kExitOk;
    }
    return s;
}

RunResult finish(const RunConfig& c, std::vector<ScatterRecord> records) {
    RunResult result;
    result.config = c;
    result.summary = summarize(c, records, result.exit_code);
    result.records = std::move(records);
    return result;
}

void require_experiment(const RunConfig& c, Experiment expected) {
    if (c.experiment != expected) {
        throw Error(ErrorCode::ConfigError, "config is for " + std::string(to_string(c.experiment)) +
                                                ", expected " + std::string(to_string(expected)));
    }
    c.validate();
}

}  // namespace

void parallel_for(int n, int jobs, const std::function<void(int)>& task) {
    if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    jobs = std::min(jobs, std::max(n, 1));
    if (jobs == 1) {
        for (int k = 0; k < n; ++k) task(k);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (int k = next++; k < n; k = next++) {
                try {
                    task(k);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

RunResult run_fig1(const RunConfig& c, int jobs) {
    require_experiment(c, Experiment::fig1_fermion_scatter);
    const EnsembleConfig& e = c.ensemble;
    const int normalizer = e.m_A + e.m_D;
    auto records = run_realizations(c.n_realizations, jobs, [&](int k) {
        RngStream rng(c.seed, static_cast<std::uint64_t>(k));
        const HermitianMatrix h = sample_goe(e.m, e.v, rng, e.goe_convention);
        const PsdMatrix a = maybe_diagonal(sample_wishart_channel(e.m, e.m_A, normalizer, rng), c);
        const PsdMatrix d = maybe_diagonal(sample_wishart_channel(e.m, e.m_D, normalizer, rng), c);
        const double lambda = draw_lambda(rng, c);

        const SystemSpec spec(h.scaled(lambda), a, d, Statistics::fermion);
        ScatterRecord rec;
        rec.param = lambda;
        fill_fermion_record(rec, spec, fermion_report(spec, c.tolerances));
        return rec;
    });
    return finish(c, std::move(records));
}

RunResult run_fig2(const RunConfig& c, int jobs) {
    require_experiment(c, Experiment::fig2_designed_scatter);
    const EnsembleConfig& e = c.ensemble;
    auto records = run_realizations(c.n_realizations, jobs, [&](int k) {
        RngStream rng(c.seed, static_cast<std::uint64_t>(k));
        const DesignedSystem sys = build_designed_system(e.m, e.m_A, e.halfwidth(), rng, c.tolerances);
        const double lambda = draw_lambda(rng, c);

        const SystemSpec spec = sys.spec.with_hamiltonian(sys.spec.H().scaled(lambda));
        ScatterRecord rec;
        rec.param = lambda;
        rec.designed = true;
        fill_fermion_record(rec, spec, fermion_report(spec, c.tolerances));
        rec.aux["commutator_norm"] = sys.commutator_norm;
        return rec;
    });

    RunResult result = finish(c, std::move(records));
    Extremes high_lambda, comm;
    int n_high = 0;
    for (const ScatterRecord& r : result.records) {
        if (!r.ok) continue;
        comm.add(r.aux.at("commutator_norm"));
        if (r.param >= 1e3) {
            ++n_high;
            high_lambda.add(r.ratio);
        }
    }
    result.summary["n_lambda_ge_1e3"] = n_high;
    result.summary["min_ratio_lambda_ge_1e3"] = high_lambda.min_json();
    result.summary["max_commutator_norm"] = comm.max_json();
    return result;
}

RunResult run_fig3(const RunConfig& c, int jobs) {
    require_experiment(c, Experiment::fig3_gamma_absolute);
    const EnsembleConfig& e = c.ensemble;
    const int n = c.n_realizations;

    RngStream random_rng(c.seed, kFixedRandomChannels);
    const int normalizer = e.m_A + e.m_D;
    const PsdMatrix a_random = maybe_diagonal(sample_wishart_channel(e.m, e.m_A, normalizer, random_rng), c);
    const PsdMatrix d_random = maybe_diagonal(sample_wishart_channel(e.m, e.m_D, normalizer, random_rng), c);
    // Designed sub-run: A has m_A = m channels, normalized by 2m so that mean eig(P) ≈ 1.
    RngStream designed_rng(c.seed, kFixedDesignedChannels);
    const PsdMatrix a_designed = sample_wishart_channel(e.m, e.m, 2 * e.m, designed_rng);

    auto records = run_realizations(2 * n, jobs, [&](int idx) {
        const bool designed = idx >= n;
        const int k = designed ? idx - n : idx;
        RngStream rng(c.seed, 2 * static_cast<std::uint64_t>(k) + (designed ? 1 : 0));

        std::optional<SystemSpec> spec;
        if (designed) {
            spec = build_designed_system(a_designed, e.halfwidth(), rng, c.tolerances).spec;
        } else {
            spec.emplace(sample_goe(e.m, e.v, rng, e.goe_convention), a_random, d_random, Statistics::fermion);
        }
        const double gamma = draw_log_uniform(rng, c.gamma_log_range);
        const SystemSpec scaled = spec->with_rates(spec->A().scaled(gamma), spec->D().scaled(gamma));
        const NessReport rep = fermion_report(scaled, c.tolerances);
        const double spacing = level_spacing(spec->H());

        ScatterRecord rec;
        rec.param = gamma;
        rec.designed = designed;
        fill_fermion_record(rec, scaled, rep);
        rec.aux["spacing"] = spacing;
        rec.aux["J_gamma_in_spacing_units"] = rep.current / spacing;
        rec.aux["gamma_J_max_in_spacing_units"] = rep.bound / spacing;
        return rec;
    });
    for (int idx = n; idx < 2 * n; ++idx) records[static_cast<std::size_t>(idx)].realization = idx - n;

    RunResult result = finish(c, std::move(records));
    std::vector<double> g_random, j_random, g_designed, j_designed;
    Extremes small_gamma, tiny_gamma;
    int n_small = 0, n_tiny = 0;
    for (const ScatterRecord& r : result.records) {
        if (!r.ok) continue;
        (r.designed ? g_designed : g_random).push_back(r.param);
        (r.designed ? j_designed : j_random).push_back(r.j);
        if (r.designed && r.param <= 1e-2) {
            ++n_small;
            small_gamma.add(r.ratio);
        }
        if (r.designed && r.param <= 1e-3) {
            ++n_tiny;
            tiny_gamma.add(r.ratio);
        }
    }
    result.summary["spearman_random"] = g_random.size() > 1 ? Json(spearman(g_random, j_random)) : Json(nullptr);
    result.summary["spearman_designed"] =
        g_designed.size() > 1 ? Json(spearman(g_designed, j_designed)) : Json(nullptr);
    result.summary["n_designed_gamma_le_1e-2"] = n_small;
    result.summary["min_ratio_designed_gamma_le_1e-2"] = small_gamma.min_json();
    result.summary["n_designed_gamma_le_1e-3"] = n_tiny;
    result.summary["min_ratio_designed_gamma_le_1e-3"] = tiny_gamma.min_json();
    result.summary["J_max_random"] = current_bound_fermion(a_random, d_random);
    result.summary["J_max_designed"] = a_designed.trace();
    return result;
}

RunResult run_fig4(const RunConfig& c, int jobs) {
    require_experiment(c, Experiment::fig4_boson_scatter);
    const EnsembleConfig& e = c.ensemble;
    const int normalizer = e.m_A + e.m_P;
    auto records = run_realizations(c.n_realizations, jobs, [&](int k) {
        RngStream rng(c.seed, static_cast<std::uint64_t>(k));
        const HermitianMatrix h = sample_goe(e.m, e.v, rng, e.goe_convention);
        const PsdMatrix p = maybe_diagonal(sample_wishart_channel(e.m, e.m_P, normalizer, rng), c);
        const PsdMatrix a = maybe_diagonal(sample_wishart_channel(e.m, e.m_A, normalizer, rng), c);
        const PsdMatrix d = p + a;
        const double lambda = draw_lambda(rng, c);

        const SystemSpec spec(h.scaled(lambda), a, d, Statistics::boson);
        const BosonStabilityReport st = check_stability(a, d, c.tolerances);
        const NessReport rep = boson_report(spec, c.tolerances);
        // Continuity form: 2 tr(P Q) = 2 tr(A).
        const Matrix p_eff = d.matrix() - a.matrix();
        const double continuity = std::abs(2.0 * (p_eff * rep.q_ness.matrix()).trace().real() - 2.0 * a.trace());

        ScatterRecord rec;
        rec.param = lambda;
        rec.j = rep.current;
        rec.bound = rep.bound;
        rec.ratio = rep.ratio;
        rec.aux["lambda_min_D_minus_A"] = st.lambda_min_of_D_minus_A;
        rec.aux["tr_A"] = a.trace();
        rec.aux["tr_D"] = d.trace();
        rec.aux["particle_number"] = rep.particle_number;
        rec.aux["balance_residual"] = rep.balance_residual;
        rec.aux["continuity_residual"] = continuity;
        rec.aux["q_min"] = rep.q_min_eigenvalue;
        rec.aux["q_max"] = rep.q_max_eigenvalue;
        return rec;
    });

    RunResult result = finish(c, std::move(records));
    Extremes cont;
    int cont_violations = 0;
    for (const ScatterRecord& r : result.records) {
        if (!r.ok) continue;
        const double residual = r.aux.at("continuity_residual");
        cont.add(residual);
        if (residual > c.tolerances.balance) ++cont_violations;
    }
    result.summary["continuity_violations"] = cont_violations;
    result.summary["max_continuity_residual"] = cont.max_json();
    return result;
}

RunResult run_ribbon_demo(const RunConfig& c, int jobs) {
    require_experiment(c, Experiment::ribbon_demo);
    const RibbonDemoConfig& rc = c.ribbon;
    auto records = run_realizations(c.n_realizations, jobs, [&](int k) {
        RngStream rng(c.seed, static_cast<std::uint64_t>(k));
        const int d = rc.d_values[static_cast<std::size_t>(k) % rc.d_values.size()];
        const RibbonSpec spec = sample_ribbon(d, rc.range, rc.n_k, rng);
        const RibbonReport rep = current_density(spec, c.tolerances);

        int node_bound = 0, node_balance = 0;
        for (const RibbonNodeRecord& n : rep.per_k_records) {
            const double scale = std::max(1.0, n.local_bound);
            if (n.tr_dq > n.local_bound + c.tolerances.bound * scale) ++node_bound;
            if (std::abs(n.tr_dq - n.tr_a_one_minus_q) > c.tolerances.balance * scale) ++node_balance;
        }
        ScatterRecord rec;
        rec.param = d;
        rec.j = rep.j_density;
        rec.bound = rep.j_density_bound;
        rec.ratio = rep.j_density_bound > 0.0 ? rep.j_density / rep.j_density_bound : 0.0;
        rec.aux["rho"] = rep.rho;
        rec.aux["node_bound_violations"] = node_bound;
        rec.aux["node_balance_violations"] = node_balance;
        return rec;
    });

    RunResult result = finish(c, std::move(records));
    int node_bound = 0, node_balance = 0;
    for (const ScatterRecord& r : result.records) {
        if (!r.ok) continue;
        node_bound += static_cast<int>(r.aux.at("node_bound_violations"));
        node_balance += static_cast<int>(r.aux.at("node_balance_violations"));
    }
    result.summary["node_bound_violations"] = node_bound;
    result.summary["node_balance_violations"] = node_balance;
    if (node_bound > 0 && result.exit_code == kExitOk) result.exit_code = kExitBoundViolation;
    return result;
}

RunResult run_experiment(const RunConfig& c, int jobs) {
    switch (c.experiment) {
        case Experiment::fig1_fermion_scatter: return run_fig1(c, jobs);
        case Experiment::fig2_designed_scatter: return run_fig2(c, jobs);
        case Experiment::fig3_gamma_absolute: return run_fig3(c, jobs);
        case Experiment::fig4_boson_scatter: return run_fig4(c, jobs);
        case Experiment::ribbon_demo: return run_ribbon_demo(c, jobs);
        case Experiment::single_system: break;
    }
    throw Error(ErrorCode::ConfigError, "single_system is not a scatter experiment; use `ness single`");
}

std::vector<std::string> csv_header(Experiment e) {
    switch (e) {
        case Experiment::fig1_fermion_scatter:
        case Experiment::fig2_designed_scatter:
            return {"realization", "lambda", "J", "J_max", "ratio", "tr_A", "tr_D", "particle_number",
                    "balance_residual"};
        case Experiment::fig3_gamma_absolute:
            return {"realization", "gamma", "J_gamma_in_spacing_units", "gamma_J_max_in_spacing_units",
                    "designed_flag"};
        case Experiment::fig4_boson_scatter:
            return {"realization", "lambda", "J", "J_min", "ratio", "lambda_min_D_minus_A"};
        case Experiment::ribbon_demo:
            return {"realization", "d", "j_density", "j_density_bound", "ratio", "rho"};
        case Experiment::single_system: break;
    }
    throw Error(ErrorCode::ConfigError, "single_system has no CSV schema");
}

std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const RunResult& result) {
    const Experiment e = result.config.experiment;
    const std::vector<std::string> header = csv_header(e);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';

    for (const ScatterRecord& r : result.records) {
        if (!r.ok) continue;
        std::vector<std::string> row{std::to_string(r.realization), format_number(r.param)};
        switch (e) {
            case Experiment::fig1_fermion_scatter:
            case Experiment::fig2_designed_scatter:
                for (double v : {r.j, r.bound, r.ratio, r.aux.at("tr_A"), r.aux.at("tr_D"),
                                 r.aux.at("particle_number"), r.aux.at("balance_residual")}) {
                    row.push_back(format_number(v));
                }
                break;
            case Experiment::fig3_gamma_absolute:
                row.push_back(format_number(r.aux.at("J_gamma_in_spacing_units")));
                row.push_back(format_number(r.aux.at("gamma_J_max_in_spacing_units")));
                row.push_back(r.designed ? "1" : "0");
                break;
            case Experiment::fig4_boson_scatter:
                for (double v : {r.j, r.bound, r.ratio, r.aux.at("lambda_min_D_minus_A")}) {
                    row.push_back(format_number(v));
                }
                break;
            case Experiment::ribbon_demo:
                row[1] = std::to_string(static_cast<int>(r.param));
                for (double v : {r.j, r.bound, r.ratio, r.aux.at("rho")}) row.push_back(format_number(v));
                break;
            case Experiment::single_system: break;
        }
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "spearman needs two equally sized samples of length >= 2");
    }
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

Json to_json(const NessReport& r) {
    const bool fermion = r.statistics == Statistics::fermion;
    return {{"statistics", std::string(to_string(r.statistics))},
            {"m", r.q_ness.dim()},
            {"Q_ness", matrix_to_json(r.q_ness.matrix())},
            {"J", r.current},
            {"J_bound", r.bound},
            {"bound_kind", fermion ? "J_max" : "J_min"},
            {"ratio", r.ratio},
            {"balance_residual", r.balance_residual},
            {"particle_number", r.particle_number},
            {"q_eigenvalue_min", r.q_min_eigenvalue},
            {"q_eigenvalue_max", r.q_max_eigenvalue}};
}

Json run_single(const Json& input, const ToleranceConfig& tol) {
    if (!input.is_object()) throw Error(ErrorCode::ConfigError, "single-system input must be a JSON object");
    for (const auto& [key, value] : input.items()) {
        static const std::set<std::string> allowed{"statistics", "H", "A", "D", "lambda", "times", "Q0"};
        if (!allowed.count(key)) throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' in input");
    }
    for (const char* key : {"H", "A", "D"}) {
        if (!input.contains(key)) throw Error(ErrorCode::ConfigError, std::string("input requires matrix ") + key);
    }
    const Statistics stats = statistics_from_string(input.value("statistics", std::string("fermion")));

    auto named = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const Error& e) {
            throw Error(e.code(), std::string("matrix ") + name + ": " + e.what());
        }
    };
    HermitianMatrix h = named("H", [&] { return validate_hermitian(parse_matrix(input.at("H"), "H"), tol); });
    const PsdMatrix a = named("A", [&] { return validate_psd(parse_matrix(input.at("A"), "A"), tol); });
    const PsdMatrix d = named("D", [&] { return validate_psd(parse_matrix(input.at("D"), "D"), tol); });
    const double lambda = input.value("lambda", 1.0);
    if (!(lambda >= 0.0)) throw Error(ErrorCode::ConfigError, "lambda must be >= 0");
    const SystemSpec spec(h.scaled(lambda), a, d, stats);

    Json out;
    if (stats == Statistics::fermion) {
        out = to_json(fermion_report(spec, tol));
    } else {
        const BosonStabilityReport st = check_stability(a, d, tol);
        out = to_json(boson_report(spec, tol));
        out["stability"] = {{"stable", st.stable},
                            {"marginal", st.marginal},
                            {"lambda_min_of_D_minus_A", st.lambda_min_of_D_minus_A}};
    }
    out["lambda"] = lambda;

    CovarianceMatrix q0{HermitianMatrix::zero(spec.m())};
    if (input.contains("Q0")) {
        q0 = named("Q0", [&] { return CovarianceMatrix{validate_hermitian(parse_matrix(input.at("Q0"), "Q0"), tol)}; });
        if (q0.dim() != spec.m()) throw Error(ErrorCode::DimensionMismatch, "matrix Q0: wrong dimension");
    }
    Json transient = Json::array();
    if (input.contains("times")) {
        for (const Json& t : input.at("times")) {
            const CovarianceMatrix q = evolve_covariance(spec, q0, t.get<double>(), tol);
            transient.push_back({{"t", t.get<double>()},
                                 {"Q", matrix_to_json(q.matrix())},
                                 {"particle_number", particle_number(q)},
                                 {"outflow", 2.0 * (d.matrix() * q.matrix()).trace().real()}});
        }
    }
    out["transient"] = std::move(transient);
    return out;
}

Json to_json(const RibbonReport& r) {
    return {{"j_density", r.j_density},
            {"j_density_bound", r.j_density_bound},
            {"ratio", r.j_density_bound > 0.0 ? r.j_density / r.j_density_bound : 0.0},
            {"rho", r.rho},
            {"n_k", static_cast<int>(r.per_k_records.size())}};
}

void write_ribbon_csv(std::ostream& out, const RibbonReport& r) {
    out << "x,tr_DQ,tr_A_one_minus_Q,local_bound\n";
    for (const RibbonNodeRecord& n : r.per_k_records) {
        out << format_number(n.x) << ',' << format_number(n.tr_dq) << ',' << format_number(n.tr_a_one_minus_q) << ','
            << format_number(n.local_bound) << '\n';
    }
}

}  // namespace ness
