#pragma once

#include "ness/system.hpp"

namespace ness {

struct NessReport {
    Statistics statistics = Statistics::fermion;
    CovarianceMatrix q_ness;
    double current = 0.0;
    /// J_max for fermions, J_min for bosons.
    double bound = 0.0;
    double ratio = 0.0;
    double balance_residual = 0.0;
    double particle_number = 0.0;
    double q_min_eigenvalue = 0.0;
    double q_max_eigenvalue = 0.0;
};

/// Generator damping part: A + D for fermions, D − A for bosons (stability-checked).
PsdMatrix damping_matrix(const SystemSpec& spec, const ToleranceConfig& tol = default_tolerances());

/// Q_NESS = 2∫₀^∞ e^{−(P+iH)s} A e^{−(P−iH)s} ds with P = A + D.
CovarianceMatrix ness_covariance(const SystemSpec& spec, const ToleranceConfig& tol = default_tolerances());

/// Q(t) = e^{−(P+iH)t} Q0 e^{−(P−iH)t} + 2∫₀^t e^{−(P+iH)s} A e^{−(P−iH)s} ds.
/// Works for both statistics; the damping part follows spec.statistics().
CovarianceMatrix evolve_covariance(const SystemSpec& spec, const CovarianceMatrix& q0, double t,
                                   const ToleranceConfig& tol = default_tolerances());

/// J = 2 tr(D Q). Throws SolverFailure if the trace comes out negative.
double current(const SystemSpec& spec, const CovarianceMatrix& q);

/// J_max = 2 tr(A) tr(D) / tr(A + D).
double current_bound_fermion(const PsdMatrix& a, const PsdMatrix& d);

/// |2 tr(A(1 − Q)) − 2 tr(D Q)|
double balance_residual(const SystemSpec& spec, const CovarianceMatrix& q);

double particle_number(const CovarianceMatrix& q);

/// Current with H → λH.
double current_lambda(const SystemSpec& spec, double lambda, const ToleranceConfig& tol = default_tolerances());

/// Current with A → γA, D → γD.
double current_gamma(const SystemSpec& spec, double gamma, const ToleranceConfig& tol = default_tolerances());

NessReport fermion_report(const SystemSpec& spec, const ToleranceConfig& tol = default_tolerances());

}  // namespace ness
