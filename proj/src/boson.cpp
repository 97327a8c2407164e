#include "ness/boson.hpp"

#include <cmath>
#include <sstream>

namespace ness {

BosonStabilityReport check_stability(const PsdMatrix& a, const PsdMatrix& d, const ToleranceConfig& tol) {
    if (a.dim() != d.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "A and D dimensions differ");
    }
    const RealVector ev = eigenvalues(HermitianMatrix::from_trusted(d.matrix() - a.matrix()));
    const double lmin = ev.minCoeff();
    const double threshold = tol.singular * std::max(1.0, ev.maxCoeff());

    BosonStabilityReport r;
    r.lambda_min_of_D_minus_A = lmin;
    r.stable = lmin > threshold;
    r.marginal = lmin > 0.0 && !r.stable;
    return r;
}

CovarianceMatrix ness_covariance_boson(const SystemSpec& spec, const ToleranceConfig& tol) {
    if (spec.statistics() != Statistics::boson) {
        throw Error(ErrorCode::InvalidArgument, "ness_covariance_boson requires a boson system");
    }
    return {solve_damped_fixed_point(damping_matrix(spec, tol), spec.H(), spec.A(), tol)};
}

double current_boson(const SystemSpec& spec, const CovarianceMatrix& q) { return current(spec, q); }

double current_lower_bound_boson(const PsdMatrix& a, const PsdMatrix& d) {
    const double ta = a.trace();
    const double td = d.trace();
    if (!(td - ta > 0.0)) {
        throw Error(ErrorCode::DegenerateChannels, "tr(D - A) must be positive");
    }
    return 2.0 * ta * td / (td - ta);
}

double balance_residual_boson(const SystemSpec& spec, const CovarianceMatrix& q) {
    const Matrix& a = spec.A().matrix();
    const Eigen::Index m = spec.m();
    const double inflow = 2.0 * (a * (Matrix::Identity(m, m) + q.matrix())).trace().real();
    const double outflow = 2.0 * (spec.D().matrix() * q.matrix()).trace().real();
    return std::abs(inflow - outflow);
}

double current_lambda_boson(const SystemSpec& spec, double lambda, const ToleranceConfig& tol) {
    if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be non-negative");
    const SystemSpec scaled = spec.with_hamiltonian(spec.H().scaled(lambda));
    return current_boson(scaled, ness_covariance_boson(scaled, tol));
}

NessReport boson_report(const SystemSpec& spec, const ToleranceConfig& tol) {
    NessReport r;
    r.statistics = Statistics::boson;
    r.q_ness = ness_covariance_boson(spec, tol);
    r.current = current_boson(spec, r.q_ness);
    r.bound = current_lower_bound_boson(spec.A(), spec.D());
    r.ratio = r.bound > 0.0 ? r.current / r.bound : 0.0;
    r.balance_residual = balance_residual_boson(spec, r.q_ness);
    r.particle_number = particle_number(r.q_ness);
    const RealVector ev = r.q_ness.spectrum();
    r.q_min_eigenvalue = ev.minCoeff();
    r.q_max_eigenvalue = ev.maxCoeff();
    return r;
}

}  // namespace ness
