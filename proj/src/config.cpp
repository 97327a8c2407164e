#include "ness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ness {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) config_error(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_as(const Json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        config_error(where + "." + key + ": " + e.what());
    }
}

std::array<double, 2> get_range(const Json& j, const std::string& key) {
    const Json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        config_error(key + " must be a two-element numeric array");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

RealMatrix parse_real_rows(const Json& j, const std::string& name) {
    if (!j.is_array() || j.empty()) config_error("matrix " + name + " must be a non-empty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array()) config_error("matrix " + name + ": row " + std::to_string(i) + " is not an array");
        if (i == 0) cols = j[i].size();
        if (j[i].size() != cols) config_error("matrix " + name + ": ragged rows");
    }
    RealMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number()) config_error("matrix " + name + ": non-numeric entry");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
        }
    }
    return m;
}

Json real_rows(const RealMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Hopping> parse_hoppings(const Json& j, const std::string& name) {
    if (!j.is_array()) config_error(name + " must be an array of hoppings");
    std::vector<Hopping> out;
    for (const Json& entry : j) {
        reject_unknown_keys(entry, {"r", "re", "im"}, name + " entry");
        Hopping hop;
        hop.r = get_as<int>(entry, "r", name);
        Json as_matrix = Json::object();
        if (!entry.contains("re")) config_error(name + " entry r=" + std::to_string(hop.r) + " lacks 're'");
        as_matrix["re"] = entry.at("re");
        if (entry.contains("im")) as_matrix["im"] = entry.at("im");
        hop.t = parse_matrix(as_matrix, name + "[r=" + std::to_string(hop.r) + "]");
        out.push_back(std::move(hop));
    }
    return out;
}

Json hoppings_to_json(const std::vector<Hopping>& hops) {
    Json arr = Json::array();
    for (const Hopping& hop : hops) {
        arr.push_back({{"r", hop.r}, {"re", real_rows(hop.t.real())}, {"im", real_rows(hop.t.imag())}});
    }
    return arr;
}

}  // namespace

std::string_view to_string(Experiment e) noexcept {
    switch (e) {
        case Experiment::fig1_fermion_scatter: return "fig1_fermion_scatter";
        case Experiment::fig2_designed_scatter: return "fig2_designed_scatter";
        case Experiment::fig3_gamma_absolute: return "fig3_gamma_absolute";
        case Experiment::fig4_boson_scatter: return "fig4_boson_scatter";
        case Experiment::ribbon_demo: return "ribbon_demo";
        case Experiment::single_system: return "single_system";
    }
    return "fig1_fermion_scatter";
}

Experiment experiment_from_string(std::string_view s) {
    for (Experiment e : {Experiment::fig1_fermion_scatter, Experiment::fig2_designed_scatter,
                         Experiment::fig3_gamma_absolute, Experiment::fig4_boson_scatter, Experiment::ribbon_demo,
                         Experiment::single_system}) {
        if (to_string(e) == s) return e;
    }
    config_error("unknown experiment '" + std::string(s) + "'");
}

void RunConfig::validate() const {
    if (n_realizations < 1) config_error("n_realizations must be >= 1");
    if (lambda_log_range[0] > lambda_log_range[1]) config_error("lambda_log_range must be ordered");
    if (gamma_log_range[0] > gamma_log_range[1]) config_error("gamma_log_range must be ordered");
    if (lambda_fixed && !(*lambda_fixed >= 0.0)) config_error("lambda_fixed must be >= 0");
    if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0)) {
        config_error("max_failure_fraction must lie in [0, 1]");
    }
    if (ribbon.d_values.empty()) config_error("ribbon.d_values must be non-empty");
    for (int d : ribbon.d_values) {
        if (d < 1) config_error("ribbon.d_values entries must be >= 1");
    }
    if (ribbon.range < 0) config_error("ribbon.range must be >= 0");
    if (ribbon.n_k < 4 || ribbon.n_k % 2) config_error("ribbon.n_k must be even and >= 4");
    if (experiment == Experiment::single_system && input_path.empty()) {
        config_error("single_system requires input_path");
    }
    ensemble.validate();
}

RunConfig default_run_config(Experiment e) {
    RunConfig c;
    c.experiment = e;
    switch (e) {
        case Experiment::fig1_fermion_scatter:
            c.ensemble.kind = EnsembleKind::goe;
            break;
        case Experiment::fig2_designed_scatter:
            c.ensemble.kind = EnsembleKind::designed;
            c.ensemble.m_A = 10;
            break;
        case Experiment::fig3_gamma_absolute:
            c.ensemble.kind = EnsembleKind::designed;
            break;
        case Experiment::fig4_boson_scatter:
            c.ensemble.kind = EnsembleKind::wishart;
            break;
        case Experiment::ribbon_demo:
            c.n_realizations = 200;
            break;
        case Experiment::single_system:
            c.n_realizations = 1;
            break;
    }
    return c;
}

Json to_json(const EnsembleConfig& c) {
    return {{"m", c.m},
            {"v", c.v},
            {"m_A", c.m_A},
            {"m_D", c.m_D},
            {"m_P", c.m_P},
            {"energy_halfwidth", c.energy_halfwidth},
            {"seed", c.seed},
            {"kind", std::string(to_string(c.kind))},
            {"goe_convention", std::string(to_string(c.goe_convention))}};
}

EnsembleConfig parse_ensemble_config(const Json& j, EnsembleConfig c) {
    const std::string where = "ensemble";
    reject_unknown_keys(j, {"m", "v", "m_A", "m_D", "m_P", "energy_halfwidth", "seed", "kind", "goe_convention"},
                        where);
    if (j.contains("m")) c.m = get_as<int>(j, "m", where);
    if (j.contains("v")) c.v = get_as<double>(j, "v", where);
    if (j.contains("m_A")) c.m_A = get_as<int>(j, "m_A", where);
    if (j.contains("m_D")) c.m_D = get_as<int>(j, "m_D", where);
    if (j.contains("m_P")) c.m_P = get_as<int>(j, "m_P", where);
    if (j.contains("energy_halfwidth")) c.energy_halfwidth = get_as<double>(j, "energy_halfwidth", where);
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", where);
    if (j.contains("kind")) c.kind = ensemble_kind_from_string(get_as<std::string>(j, "kind", where));
    if (j.contains("goe_convention")) {
        c.goe_convention = goe_convention_from_string(get_as<std::string>(j, "goe_convention", where));
    }
    c.validate();
    return c;
}

Json to_json(const ToleranceConfig& t) {
    return {{"hermitian", t.hermitian}, {"psd", t.psd},         {"singular", t.singular},
            {"degeneracy", t.degeneracy}, {"residual", t.residual}, {"balance", t.balance},
            {"bound", t.bound},           {"pauli", t.pauli},       {"unitary", t.unitary}};
}

ToleranceConfig parse_tolerances(const Json& j, ToleranceConfig t) {
    const std::string where = "tolerances";
    reject_unknown_keys(
        j, {"hermitian", "psd", "singular", "degeneracy", "residual", "balance", "bound", "pauli", "unitary"}, where);
    auto read = [&](const char* key, double& slot) {
        if (!j.contains(key)) return;
        slot = get_as<double>(j, key, where);
        if (!(slot > 0.0)) config_error(where + "." + key + " must be positive");
    };
    read("hermitian", t.hermitian);
    read("psd", t.psd);
    read("singular", t.singular);
    read("degeneracy", t.degeneracy);
    read("residual", t.residual);
    read("balance", t.balance);
    read("bound", t.bound);
    read("pauli", t.pauli);
    read("unitary", t.unitary);
    return t;
}

RunConfig parse_run_config(const Json& j) {
    const std::string where = "config";
    reject_unknown_keys(j,
                        {"experiment", "n_realizations", "seed", "ensemble", "lambda_log_range", "gamma_log_range",
                         "lambda_fixed", "diagonal_channels", "ribbon", "tolerances", "max_failure_fraction",
                         "output_path", "input_path"},
                        where);
    if (!j.contains("experiment")) config_error("config.experiment is required");
    RunConfig c = default_run_config(experiment_from_string(get_as<std::string>(j, "experiment", where)));

    if (j.contains("n_realizations")) c.n_realizations = get_as<int>(j, "n_realizations", where);
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", where);
    if (j.contains("ensemble")) c.ensemble = parse_ensemble_config(j.at("ensemble"), c.ensemble);
    if (j.contains("lambda_log_range")) c.lambda_log_range = get_range(j, "lambda_log_range");
    if (j.contains("gamma_log_range")) c.gamma_log_range = get_range(j, "gamma_log_range");
    if (j.contains("lambda_fixed") && !j.at("lambda_fixed").is_null()) {
        c.lambda_fixed = get_as<double>(j, "lambda_fixed", where);
    }
    if (j.contains("diagonal_channels")) c.diagonal_channels = get_as<bool>(j, "diagonal_channels", where);
    if (j.contains("ribbon")) {
        const Json& r = j.at("ribbon");
        reject_unknown_keys(r, {"d_values", "range", "n_k"}, "ribbon");
        if (r.contains("d_values")) c.ribbon.d_values = get_as<std::vector<int>>(r, "d_values", "ribbon");
        if (r.contains("range")) c.ribbon.range = get_as<int>(r, "range", "ribbon");
        if (r.contains("n_k")) c.ribbon.n_k = get_as<int>(r, "n_k", "ribbon");
    }
    // The run seed drives every sampler; ensemble.seed is accepted as an alias.
    if (!j.contains("seed") && j.contains("ensemble") && j.at("ensemble").contains("seed")) {
        c.seed = c.ensemble.seed;
    }
    c.ensemble.seed = c.seed;
    if (j.contains("tolerances")) c.tolerances = parse_tolerances(j.at("tolerances"));
    if (j.contains("max_failure_fraction")) {
        c.max_failure_fraction = get_as<double>(j, "max_failure_fraction", where);
    }
    if (j.contains("output_path")) c.output_path = get_as<std::string>(j, "output_path", where);
    if (j.contains("input_path")) c.input_path = get_as<std::string>(j, "input_path", where);
    c.validate();
    return c;
}

Json to_json(const RunConfig& c) {
    Json j = {{"experiment", std::string(to_string(c.experiment))},
              {"n_realizations", c.n_realizations},
              {"seed", c.seed},
              {"ensemble", to_json(c.ensemble)},
              {"lambda_log_range", c.lambda_log_range},
              {"gamma_log_range", c.gamma_log_range},
              {"diagonal_channels", c.diagonal_channels},
              {"ribbon", {{"d_values", c.ribbon.d_values}, {"range", c.ribbon.range}, {"n_k", c.ribbon.n_k}}},
              {"tolerances", to_json(c.tolerances)},
              {"max_failure_fraction", c.max_failure_fraction},
              {"output_path", c.output_path},
              {"input_path", c.input_path}};
    j["lambda_fixed"] = c.lambda_fixed ? Json(*c.lambda_fixed) : Json(nullptr);
    return j;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        config_error("'" + path + "' is not valid JSON: " + e.what());
    }
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_json_file(path)); }

Matrix parse_matrix(const Json& j, const std::string& name) {
    if (j.is_array()) return parse_real_rows(j, name).cast<Complex>();
    if (!j.is_object() || !j.contains("re")) {
        config_error("matrix " + name + " must be an array of rows or an object with 're' (and optional 'im')");
    }
    reject_unknown_keys(j, {"re", "im"}, "matrix " + name);
    const RealMatrix re = parse_real_rows(j.at("re"), name + ".re");
    RealMatrix im = RealMatrix::Zero(re.rows(), re.cols());
    if (j.contains("im")) {
        im = parse_real_rows(j.at("im"), name + ".im");
        if (im.rows() != re.rows() || im.cols() != re.cols()) {
            config_error("matrix " + name + ": 're' and 'im' shapes differ");
        }
    }
    Matrix m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    return m;
}

Json matrix_to_json(const Matrix& m) { return {{"re", real_rows(m.real())}, {"im", real_rows(m.imag())}}; }

RibbonSpec parse_ribbon_spec(const Json& j) {
    reject_unknown_keys(j, {"d", "n_k", "hoppings_H", "hoppings_A", "hoppings_D", "output_path"}, "ribbon config");
    for (const char* key : {"d", "hoppings_H", "hoppings_A", "hoppings_D"}) {
        if (!j.contains(key)) config_error(std::string("ribbon config requires '") + key + "'");
    }
    RibbonSpec spec;
    spec.d = get_as<int>(j, "d", "ribbon");
    if (j.contains("n_k")) spec.n_k = get_as<int>(j, "n_k", "ribbon");
    spec.hoppings_h = parse_hoppings(j.at("hoppings_H"), "hoppings_H");
    spec.hoppings_a = parse_hoppings(j.at("hoppings_A"), "hoppings_A");
    spec.hoppings_d = parse_hoppings(j.at("hoppings_D"), "hoppings_D");
    spec.validate();
    return spec;
}

Json to_json(const RibbonSpec& spec) {
    return {{"d", spec.d},
            {"n_k", spec.n_k},
            {"hoppings_H", hoppings_to_json(spec.hoppings_h)},
            {"hoppings_A", hoppings_to_json(spec.hoppings_a)},
            {"hoppings_D", hoppings_to_json(spec.hoppings_d)}};
}

}  // namespace ness
