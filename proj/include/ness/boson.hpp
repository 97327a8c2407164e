#pragma once

#include "ness/fermion.hpp"

namespace ness {

struct BosonStabilityReport {
    bool stable = false;
    /// λ_min(D − A) is positive but below the strict-positivity threshold.
    bool marginal = false;
    double lambda_min_of_D_minus_A = 0.0;
};

BosonStabilityReport check_stability(const PsdMatrix& a, const PsdMatrix& d,
                                     const ToleranceConfig& tol = default_tolerances());

/// Stationary covariance with P = D − A. Throws Unstable (or NumericallyMarginal)
/// when D − A is not strictly positive.
CovarianceMatrix ness_covariance_boson(const SystemSpec& spec, const ToleranceConfig& tol = default_tolerances());

double current_boson(const SystemSpec& spec, const CovarianceMatrix& q);

/// J_min = 2 tr(A) tr(D) / tr(D − A).
double current_lower_bound_boson(const PsdMatrix& a, const PsdMatrix& d);

/// |2 tr(A(1 + Q)) − 2 tr(D Q)|
double balance_residual_boson(const SystemSpec& spec, const CovarianceMatrix& q);

double current_lambda_boson(const SystemSpec& spec, double lambda, const ToleranceConfig& tol = default_tolerances());

NessReport boson_report(const SystemSpec& spec, const ToleranceConfig& tol = default_tolerances());

}  // namespace ness
