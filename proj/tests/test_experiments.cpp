#include "doctest.h"

#include <sstream>

#include "ness/boson.hpp"
#include "ness/experiments.hpp"

using namespace ness;

namespace {

RunConfig small_config(Experiment e, int n, std::uint64_t seed) {
    RunConfig c = default_run_config(e);
    c.n_realizations = n;
    c.seed = seed;
    c.ensemble.seed = seed;
    return c;
}

std::string csv_of(const RunResult& r) {
    std::ostringstream os;
    write_csv(os, r);
    return os.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("CSV headers are fixed per experiment") {
    auto header = [](Experiment e) {
        const RunResult r = run_experiment(small_config(e, 1, 1));
        return first_line(csv_of(r));
    };
    CHECK(header(Experiment::fig1_fermion_scatter) ==
          "realization,lambda,J,J_max,ratio,tr_A,tr_D,particle_number,balance_residual");
    CHECK(header(Experiment::fig2_designed_scatter) ==
          "realization,lambda,J,J_max,ratio,tr_A,tr_D,particle_number,balance_residual");
    CHECK(header(Experiment::fig3_gamma_absolute) ==
          "realization,gamma,J_gamma_in_spacing_units,gamma_J_max_in_spacing_units,designed_flag");
    CHECK(header(Experiment::fig4_boson_scatter) == "realization,lambda,J,J_min,ratio,lambda_min_D_minus_A");
    CHECK(header(Experiment::ribbon_demo) == "realization,d,j_density,j_density_bound,ratio,rho");
    CHECK_THROWS_AS(csv_header(Experiment::single_system), Error);
}

TEST_CASE("fig1: bound holds and the summary is consistent") {
    const RunResult r = run_fig1(small_config(Experiment::fig1_fermion_scatter, 200, 42));
    CHECK(r.records.size() == 200);
    CHECK(r.summary["bound_violations"] == 0);
    CHECK(r.summary["pauli_violations"] == 0);
    CHECK(r.summary["balance_violations"] == 0);
    CHECK(r.exit_code == kExitOk);
    for (const ScatterRecord& rec : r.records) {
        REQUIRE(rec.ok);
        CHECK(rec.ratio <= 1.0 + 1e-9);
        CHECK(rec.param >= 1e-5);
        CHECK(rec.param <= 1e5);
    }
}

TEST_CASE("fig1: lambda = 0 with diagonal channels matches the commuting closed form") {
    RunConfig c = small_config(Experiment::fig1_fermion_scatter, 20, 9);
    c.lambda_fixed = 0.0;
    c.diagonal_channels = true;
    const RunResult r = run_fig1(c);
    const int normalizer = c.ensemble.m_A + c.ensemble.m_D;
    for (const ScatterRecord& rec : r.records) {
        // redraw the realization's channels from its stream
        RngStream rng(c.seed, static_cast<std::uint64_t>(rec.realization));
        sample_goe(c.ensemble.m, c.ensemble.v, rng);
        const Matrix a = sample_wishart_channel(c.ensemble.m, c.ensemble.m_A, normalizer, rng).matrix();
        const Matrix d = sample_wishart_channel(c.ensemble.m, c.ensemble.m_D, normalizer, rng).matrix();
        double closed = 0.0;
        for (int k = 0; k < c.ensemble.m; ++k) {
            const double ak = a(k, k).real(), dk = d(k, k).real();
            closed += 2.0 * ak * dk / (ak + dk);
        }
        CHECK(rec.param == 0.0);
        CHECK(rec.j == doctest::Approx(closed).epsilon(1e-12));
    }
}

TEST_CASE("fig2: designed systems track the bound at large lambda") {
    RunConfig c = small_config(Experiment::fig2_designed_scatter, 40, 5);
    c.lambda_log_range = {3.0, 5.0};
    const RunResult r = run_fig2(c);
    CHECK(r.summary["bound_violations"] == 0);
    CHECK(r.summary["n_lambda_ge_1e3"] == 40);
    CHECK(r.summary["min_ratio_lambda_ge_1e3"].get<double>() >= 0.99);
    CHECK(r.summary["max_commutator_norm"].get<double>() <= 1e-10);
    for (const ScatterRecord& rec : r.records) {
        CHECK(rec.bound == doctest::Approx(rec.aux.at("tr_A")).epsilon(1e-12));
    }
}

TEST_CASE("fig3: currents grow with gamma and the designed branch saturates at small gamma") {
    RunConfig c = small_config(Experiment::fig3_gamma_absolute, 200, 44);
    const RunResult r = run_fig3(c);
    CHECK(r.records.size() == 400);
    CHECK(r.summary["bound_violations"] == 0);
    CHECK(r.summary["spearman_random"].get<double>() > 0.9);
    CHECK(r.summary["spearman_designed"].get<double>() > 0.9);
    const double jmax_random = r.summary["J_max_random"].get<double>();
    for (const ScatterRecord& rec : r.records) {
        if (!rec.designed) CHECK(rec.bound == doctest::Approx(rec.param * jmax_random).epsilon(1e-12));
    }

    // the γ = 10⁻³ designed point
    c.gamma_log_range = {-3.0, -3.0};
    c.n_realizations = 30;
    const RunResult tiny = run_fig3(c);
    for (const ScatterRecord& rec : tiny.records) {
        if (rec.designed) CHECK(rec.ratio >= 0.99);
    }
}

TEST_CASE("fig4: lower bound, and single modes saturate it") {
    const RunResult r = run_fig4(small_config(Experiment::fig4_boson_scatter, 200, 7));
    CHECK(r.summary["bound_violations"] == 0);
    CHECK(r.summary["positivity_violations"] == 0);
    CHECK(r.summary["continuity_violations"] == 0);
    for (const ScatterRecord& rec : r.records) {
        if (rec.ok) CHECK(rec.ratio >= 1.0 - 1e-9);
    }

    RunConfig one = small_config(Experiment::fig4_boson_scatter, 100, 8);
    one.ensemble.m = 1;
    const RunResult single = run_fig4(one);
    for (const ScatterRecord& rec : single.records) {
        REQUIRE(rec.ok);
        CHECK(std::abs(rec.ratio - 1.0) <= 1e-9);
    }
}

TEST_CASE("ribbon_demo: density bound") {
    RunConfig c = small_config(Experiment::ribbon_demo, 12, 3);
    c.ribbon.n_k = 32;
    const RunResult r = run_ribbon_demo(c);
    CHECK(r.summary["bound_violations"] == 0);
    CHECK(r.summary["node_bound_violations"] == 0);
    CHECK(r.records[0].param == 1.0);
    CHECK(r.records[1].param == 2.0);
    CHECK(r.records[2].param == 4.0);
}

TEST_CASE("runs are deterministic and independent of the worker count") {
    for (Experiment e : {Experiment::fig1_fermion_scatter, Experiment::fig2_designed_scatter,
                         Experiment::fig3_gamma_absolute, Experiment::fig4_boson_scatter}) {
        const RunConfig c = small_config(e, 30, 123);
        const std::string once = csv_of(run_experiment(c, 1));
        CHECK(once == csv_of(run_experiment(c, 1)));
        CHECK(once == csv_of(run_experiment(c, 3)));
    }
    // realization k draws from stream k, so a longer run extends a shorter one
    const std::string short_run = csv_of(run_fig1(small_config(Experiment::fig1_fermion_scatter, 5, 77)));
    const std::string long_run = csv_of(run_fig1(small_config(Experiment::fig1_fermion_scatter, 10, 77)));
    CHECK(long_run.rfind(short_run, 0) == 0);
}

TEST_CASE("config parsing") {
    const Json j = Json::parse(R"({"experiment": "fig4_boson_scatter", "n_realizations": 3, "seed": 11,
                                   "ensemble": {"m": 4, "m_P": 6}, "lambda_log_range": [-1, 1]})");
    const RunConfig c = parse_run_config(j);
    CHECK(c.experiment == Experiment::fig4_boson_scatter);
    CHECK(c.seed == 11);
    CHECK(c.ensemble.seed == 11);
    CHECK(c.ensemble.m_P == 6);
    CHECK(parse_run_config(to_json(c)).seed == 11);

    auto config_error = [](const char* text) {
        try {
            parse_run_config(Json::parse(text));
        } catch (const Error& e) {
            return e.code() == ErrorCode::ConfigError;
        }
        return false;
    };
    CHECK(config_error(R"({"experiment": "fig1_fermion_scatter", "bogus": 1})"));
    CHECK(config_error(R"({"experiment": "fig9"})"));
    CHECK(config_error(R"({"n_realizations": 3})"));
    CHECK(config_error(R"({"experiment": "fig1_fermion_scatter", "n_realizations": 0})"));
    CHECK(config_error(R"({"experiment": "fig1_fermion_scatter", "lambda_log_range": [2, 1]})"));
    CHECK(config_error(R"({"experiment": "fig1_fermion_scatter", "ensemble": {"m": 0}})"));
    CHECK(config_error(R"({"experiment": "fig1_fermion_scatter", "ensemble": {"colour": 1}})"));
    CHECK(config_error(R"({"experiment": "fig1_fermion_scatter", "tolerances": {"bound": -1}})"));
    CHECK(config_error(R"({"experiment": "single_system"})"));

    const RunConfig alias = parse_run_config(Json::parse(R"({"experiment": "fig1_fermion_scatter",
                                                             "ensemble": {"seed": 99}})"));
    CHECK(alias.seed == 99);
}

TEST_CASE("matrix parsing accepts real rows and re/im objects") {
    const Matrix m = parse_matrix(Json::parse(R"({"re": [[1, 2], [2, 1]], "im": [[0, -1], [1, 0]]})"), "H");
    CHECK(m(0, 1) == Complex(2.0, -1.0));
    CHECK(parse_matrix(Json::parse("[[3]]"), "A")(0, 0) == Complex(3.0, 0.0));
    CHECK_THROWS_AS(parse_matrix(Json::parse("[[1, 2], [3]]"), "A"), Error);
    CHECK_THROWS_AS(parse_matrix(Json::parse(R"({"im": [[1]]})"), "A"), Error);
    CHECK((parse_matrix(matrix_to_json(m), "H") - m).norm() == 0.0);
}

TEST_CASE("run_single: scalar fermion and boson reports") {
    const Json f = run_single(Json::parse(R"({"H": [[0]], "A": [[1]], "D": [[1]], "times": [0, 1]})"));
    CHECK(f["J"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f["J_bound"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f["ratio"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f["transient"].size() == 2);
    CHECK(f["transient"][0]["particle_number"].get<double>() == 0.0);
    // Q(t) = ½(1 − e^{−4t}) for a = d = 1 from an empty start
    CHECK(f["transient"][1]["particle_number"].get<double>() ==
          doctest::Approx(0.5 * (1.0 - std::exp(-4.0))).epsilon(1e-12));

    const Json b = run_single(Json::parse(R"({"statistics": "boson", "H": [[2]], "A": [[0.25]], "D": [[1]]})"));
    CHECK(b["J"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(b["J_bound"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(b["bound_kind"] == "J_min");

    try {
        run_single(Json::parse(R"({"H": [[0, 1], [0, 0]], "A": [[1, 0], [0, 1]], "D": [[1, 0], [0, 1]]})"));
        FAIL("expected NotHermitian");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotHermitian);
        CHECK(std::string(e.what()).find("matrix H") != std::string::npos);
    }
    CHECK_THROWS_AS(run_single(Json::parse(R"({"H": [[0]], "A": [[1]]})")), Error);
}

TEST_CASE("spearman and format_number") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 1, 2}, {1, 1, 2}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(spearman({1}, {1}), Error);
    CHECK(format_number(0.1) == "0.1");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
