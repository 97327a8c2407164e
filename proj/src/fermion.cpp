#include "ness/fermion.hpp"

#include <cmath>
#include <sstream>

#include "ness/boson.hpp"

namespace ness {

std::string_view to_string(Statistics s) noexcept { return s == Statistics::fermion ? "fermion" : "boson"; }

Statistics statistics_from_string(std::string_view s) {
    if (s == "fermion") return Statistics::fermion;
    if (s == "boson") return Statistics::boson;
    throw Error(ErrorCode::InvalidArgument, "unknown statistics '" + std::string(s) + "'");
}

SystemSpec::SystemSpec(HermitianMatrix h, PsdMatrix a, PsdMatrix d, Statistics statistics)
    : h_(std::move(h)), a_(std::move(a)), d_(std::move(d)), statistics_(statistics) {
    if (h_.dim() != a_.dim() || h_.dim() != d_.dim()) {
        std::ostringstream os;
        os << "H, A, D have dimensions " << h_.dim() << ", " << a_.dim() << ", " << d_.dim();
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
}

bool satisfies_pauli(const CovarianceMatrix& q, double slack) {
    const RealVector ev = q.spectrum();
    return ev.minCoeff() >= -slack && ev.maxCoeff() <= 1.0 + slack;
}

bool is_positive(const CovarianceMatrix& q, double slack) { return q.spectrum().minCoeff() >= -slack; }

namespace {

void require_statistics(const SystemSpec& spec, Statistics expected, const char* op) {
    if (spec.statistics() != expected) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string(op) + " requires a " + std::string(to_string(expected)) + " system");
    }
}

double trace_product(const Matrix& a, const Matrix& b) {
    // tr(AB) = Σ_ij A_ij B_ji
    return (a.array() * b.transpose().array()).sum().real();
}

}  // namespace

PsdMatrix damping_matrix(const SystemSpec& spec, const ToleranceConfig& tol) {
    if (spec.statistics() == Statistics::fermion) return spec.A() + spec.D();

    const BosonStabilityReport st = check_stability(spec.A(), spec.D(), tol);
    if (!st.stable) {
        std::ostringstream os;
        os << "lambda_min(D - A) = " << st.lambda_min_of_D_minus_A;
        throw Error(st.marginal ? ErrorCode::NumericallyMarginal : ErrorCode::Unstable, os.str());
    }
    return validate_psd(spec.D().matrix() - spec.A().matrix(), tol);
}

CovarianceMatrix ness_covariance(const SystemSpec& spec, const ToleranceConfig& tol) {
    require_statistics(spec, Statistics::fermion, "ness_covariance");
    return {solve_damped_fixed_point(spec.A() + spec.D(), spec.H(), spec.A(), tol)};
}

CovarianceMatrix evolve_covariance(const SystemSpec& spec, const CovarianceMatrix& q0, double t,
                                   const ToleranceConfig& tol) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::InvalidArgument, "evolution time must be finite and non-negative");
    }
    if (q0.dim() != spec.m()) {
        throw Error(ErrorCode::DimensionMismatch, "initial covariance does not match system dimension");
    }
    if (t == 0.0) return q0;

    const PsdMatrix p = damping_matrix(spec, tol);
    const HermitianMatrix stationary = solve_damped_fixed_point(p, spec.H(), spec.A(), tol);
    // The transient integral equals X∞ − E X∞ E†, so Q(t) = X∞ + E (Q0 − X∞) E†.
    const Matrix e = damped_propagator(p.matrix(), spec.H().matrix(), t);
    const Matrix q = stationary.matrix() + e * (q0.matrix() - stationary.matrix()) * e.adjoint();
    return {HermitianMatrix::from_trusted(q)};
}

double current(const SystemSpec& spec, const CovarianceMatrix& q) {
    const double j = 2.0 * trace_product(spec.D().matrix(), q.matrix());
    const double scale = std::max(1.0, spec.D().trace());
    if (j < -1e-12 * scale) {
        std::ostringstream os;
        os << "negative current " << j;
        throw Error(ErrorCode::SolverFailure, os.str());
    }
    return j;
}

double current_bound_fermion(const PsdMatrix& a, const PsdMatrix& d) {
    const double ta = a.trace();
    const double td = d.trace();
    if (!(ta + td > 0.0)) {
        throw Error(ErrorCode::DegenerateChannels, "tr(A) + tr(D) must be positive");
    }
    return 2.0 * ta * td / (ta + td);
}

double balance_residual(const SystemSpec& spec, const CovarianceMatrix& q) {
    const double inflow = 2.0 * (spec.A().trace() - trace_product(spec.A().matrix(), q.matrix()));
    const double outflow = 2.0 * trace_product(spec.D().matrix(), q.matrix());
    return std::abs(inflow - outflow);
}

double particle_number(const CovarianceMatrix& q) { return q.matrix().trace().real(); }

double current_lambda(const SystemSpec& spec, double lambda, const ToleranceConfig& tol) {
    if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be non-negative");
    const SystemSpec scaled = spec.with_hamiltonian(spec.H().scaled(lambda));
    return current(scaled, ness_covariance(scaled, tol));
}

double current_gamma(const SystemSpec& spec, double gamma, const ToleranceConfig& tol) {
    if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
    const SystemSpec scaled = spec.with_rates(spec.A().scaled(gamma), spec.D().scaled(gamma));
    return current(scaled, ness_covariance(scaled, tol));
}

NessReport fermion_report(const SystemSpec& spec, const ToleranceConfig& tol) {
    NessReport r;
    r.statistics = Statistics::fermion;
    r.q_ness = ness_covariance(spec, tol);
    r.current = current(spec, r.q_ness);
    r.bound = current_bound_fermion(spec.A(), spec.D());
    r.ratio = r.bound > 0.0 ? r.current / r.bound : 0.0;
    r.balance_residual = balance_residual(spec, r.q_ness);
    r.particle_number = particle_number(r.q_ness);
    const RealVector ev = r.q_ness.spectrum();
    r.q_min_eigenvalue = ev.minCoeff();
    r.q_max_eigenvalue = ev.maxCoeff();
    return r;
}

}  // namespace ness
