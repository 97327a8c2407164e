#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "ness/boson.hpp"
#include "ness/experiments.hpp"
#include "ness/perturbative.hpp"

namespace py = pybind11;
using namespace ness;

namespace {

HermitianMatrix herm(const Matrix& m, const char* name) {
    try {
        return validate_hermitian(m);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("matrix ") + name + ": " + e.what());
    }
}

PsdMatrix psd(const Matrix& m, const char* name) {
    try {
        return validate_psd(m);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("matrix ") + name + ": " + e.what());
    }
}

SystemSpec make_spec(const Matrix& h, const Matrix& a, const Matrix& d, const std::string& statistics) {
    return SystemSpec(herm(h, "H"), psd(a, "A"), psd(d, "D"), statistics_from_string(statistics));
}

py::dict report_dict(const NessReport& r) {
    py::dict out;
    out["statistics"] = std::string(to_string(r.statistics));
    out["Q_ness"] = r.q_ness.matrix();
    out["J"] = r.current;
    out["J_bound"] = r.bound;
    out["ratio"] = r.ratio;
    out["balance_residual"] = r.balance_residual;
    out["particle_number"] = r.particle_number;
    out["q_eigenvalue_min"] = r.q_min_eigenvalue;
    out["q_eigenvalue_max"] = r.q_max_eigenvalue;
    return out;
}

}  // namespace

PYBIND11_MODULE(_ness, m) {
    m.doc() = "Steady-state currents of open non-interacting fermion and boson systems";
    py::register_exception<Error>(m, "NessError", PyExc_ValueError);

    m.def(
        "solve_damped_fixed_point",
        [](const Matrix& p, const Matrix& h, const Matrix& s) {
            return Matrix(solve_damped_fixed_point(psd(p, "P"), herm(h, "H"), psd(s, "S")).matrix());
        },
        py::arg("P"), py::arg("H"), py::arg("S"), "Solve (P+iH)X + X(P-iH) = 2S.");

    m.def(
        "ness_covariance",
        [](const Matrix& h, const Matrix& a, const Matrix& d, const std::string& statistics) {
            const SystemSpec spec = make_spec(h, a, d, statistics);
            const CovarianceMatrix q =
                spec.statistics() == Statistics::fermion ? ness_covariance(spec) : ness_covariance_boson(spec);
            return Matrix(q.matrix());
        },
        py::arg("H"), py::arg("A"), py::arg("D"), py::arg("statistics") = "fermion");

    m.def(
        "evolve_covariance",
        [](const Matrix& h, const Matrix& a, const Matrix& d, const Matrix& q0, double t,
           const std::string& statistics) {
            const SystemSpec spec = make_spec(h, a, d, statistics);
            return Matrix(evolve_covariance(spec, CovarianceMatrix{herm(q0, "Q0")}, t).matrix());
        },
        py::arg("H"), py::arg("A"), py::arg("D"), py::arg("Q0"), py::arg("t"), py::arg("statistics") = "fermion");

    m.def(
        "report",
        [](const Matrix& h, const Matrix& a, const Matrix& d, const std::string& statistics) {
            const SystemSpec spec = make_spec(h, a, d, statistics);
            return report_dict(spec.statistics() == Statistics::fermion ? fermion_report(spec) : boson_report(spec));
        },
        py::arg("H"), py::arg("A"), py::arg("D"), py::arg("statistics") = "fermion",
        "Full NESS report: covariance, current, bound, ratio and diagnostics.");

    m.def(
        "current_bound_fermion",
        [](const Matrix& a, const Matrix& d) { return current_bound_fermion(psd(a, "A"), psd(d, "D")); },
        py::arg("A"), py::arg("D"));
    m.def(
        "current_lower_bound_boson",
        [](const Matrix& a, const Matrix& d) { return current_lower_bound_boson(psd(a, "A"), psd(d, "D")); },
        py::arg("A"), py::arg("D"));

    m.def(
        "current_lambda",
        [](const Matrix& h, const Matrix& a, const Matrix& d, double lambda, const std::string& statistics) {
            const SystemSpec spec = make_spec(h, a, d, statistics);
            return spec.statistics() == Statistics::fermion ? current_lambda(spec, lambda)
                                                            : current_lambda_boson(spec, lambda);
        },
        py::arg("H"), py::arg("A"), py::arg("D"), py::arg("lam"), py::arg("statistics") = "fermion");
    m.def(
        "current_gamma",
        [](const Matrix& h, const Matrix& a, const Matrix& d, double gamma) {
            return current_gamma(make_spec(h, a, d, "fermion"), gamma);
        },
        py::arg("H"), py::arg("A"), py::arg("D"), py::arg("gamma"));

    m.def(
        "check_stability",
        [](const Matrix& a, const Matrix& d) {
            const BosonStabilityReport r = check_stability(psd(a, "A"), psd(d, "D"));
            py::dict out;
            out["stable"] = r.stable;
            out["marginal"] = r.marginal;
            out["lambda_min_of_D_minus_A"] = r.lambda_min_of_D_minus_A;
            return out;
        },
        py::arg("A"), py::arg("D"));

    m.def(
        "current_infinite_lambda",
        [](const Matrix& h, const Matrix& a, const Matrix& d, std::optional<double> degeneracy_tol) {
            const SystemSpec spec = make_spec(h, a, d, "fermion");
            return degeneracy_tol ? current_infinite_lambda(spec, *degeneracy_tol) : current_infinite_lambda(spec);
        },
        py::arg("H"), py::arg("A"), py::arg("D"), py::arg("degeneracy_tol") = py::none());

    m.def(
        "verify_design_saturation",
        [](const Matrix& u, const Matrix& a, const std::vector<double>& energies) {
            const SaturationReport r = verify_design_saturation(u, psd(a, "A"), energies);
            py::dict out;
            out["J_inf"] = r.j_inf;
            out["J_max"] = r.j_max;
            out["commutator_norm"] = r.commutator_norm;
            out["ratio"] = r.ratio;
            return out;
        },
        py::arg("U"), py::arg("A"), py::arg("energies"));

    m.def(
        "sample_goe",
        [](int n, double v, std::uint64_t seed, std::uint64_t stream, const std::string& convention) {
            RngStream rng(seed, stream);
            return Matrix(sample_goe(n, v, rng, goe_convention_from_string(convention)).matrix());
        },
        py::arg("m"), py::arg("v") = 1.0, py::arg("seed") = 0, py::arg("stream") = 0,
        py::arg("convention") = "variance");
    m.def(
        "sample_wishart_channel",
        [](int n, int m_ch, int normalizer, std::uint64_t seed, std::uint64_t stream) {
            RngStream rng(seed, stream);
            return Matrix(sample_wishart_channel(n, m_ch, normalizer, rng).matrix());
        },
        py::arg("m"), py::arg("m_ch"), py::arg("normalizer"), py::arg("seed") = 0, py::arg("stream") = 0);
    m.def(
        "sample_haar_unitary",
        [](int n, std::uint64_t seed, std::uint64_t stream) {
            RngStream rng(seed, stream);
            return sample_haar_unitary(n, rng);
        },
        py::arg("m"), py::arg("seed") = 0, py::arg("stream") = 0);
    m.def(
        "build_designed_system",
        [](int n, int m_a, double halfwidth, std::uint64_t seed, std::uint64_t stream) {
            RngStream rng(seed, stream);
            const DesignedSystem ds = build_designed_system(n, m_a, halfwidth, rng);
            py::dict out;
            out["H"] = ds.spec.H().matrix();
            out["A"] = ds.spec.A().matrix();
            out["D"] = ds.spec.D().matrix();
            out["U"] = ds.u;
            out["energies"] = ds.energies;
            out["commutator_norm"] = ds.commutator_norm;
            return out;
        },
        py::arg("m"), py::arg("m_A"), py::arg("energy_halfwidth"), py::arg("seed") = 0, py::arg("stream") = 0);

    // JSON-in/JSON-out entry points; the Python package wraps them with dicts.
    m.def("_ribbon_current_density", [](const std::string& spec_json) {
        const RibbonReport r = current_density(parse_ribbon_spec(Json::parse(spec_json)));
        Json out = to_json(r);
        Json nodes = Json::array();
        for (const RibbonNodeRecord& n : r.per_k_records) {
            nodes.push_back({{"x", n.x}, {"tr_DQ", n.tr_dq}, {"tr_A_one_minus_Q", n.tr_a_one_minus_q},
                             {"local_bound", n.local_bound}});
        }
        out["nodes"] = std::move(nodes);
        return out.dump();
    });
    m.def(
        "_run_experiment",
        [](const std::string& config_json, int jobs) {
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run_experiment(parse_run_config(Json::parse(config_json)), jobs);
            }
            std::ostringstream csv;
            write_csv(csv, r);
            return py::make_tuple(csv.str(), r.summary.dump(), r.exit_code);
        },
        py::arg("config_json"), py::arg("jobs") = 1);
    m.def("_run_single", [](const std::string& input_json) { return run_single(Json::parse(input_json)).dump(); });
}
