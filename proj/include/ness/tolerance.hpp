#pragma once

namespace ness {

/// Every numerical threshold used by the library, gathered in one place so
/// runs can override them from a config file.
struct ToleranceConfig {
    /// Relative asymmetry (against max |entry|) below which a matrix is symmetrized.
    double hermitian = 1e-12;
    /// Relative negative-eigenvalue slack for PSD validation.
    double psd = 1e-10;
    /// λ_min(P) must exceed this times max(1, λ_max(P)).
    double singular = 1e-12;
    /// Eigenvalue merge tolerance, relative to the spectral range.
    double degeneracy = 1e-8;
    /// Relative Frobenius residual accepted from the fixed-point solver.
    double residual = 1e-10;
    /// Balance residual slack, relative to max(1, J).
    double balance = 1e-9;
    /// Relative slack on J <= J_max and J >= J_min.
    double bound = 1e-9;
    /// Absolute slack on the covariance eigenvalue window.
    double pauli = 1e-10;
    /// Required unitarity of user-supplied symmetry operators.
    double unitary = 1e-10;
};

inline const ToleranceConfig& default_tolerances() {
    static const ToleranceConfig tol{};
    return tol;
}

}  // namespace ness
