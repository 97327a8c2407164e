#pragma once

#include <vector>

#include "ness/fermion.hpp"

namespace ness {

/// λ → ∞ limit of the fermionic current. Each eigenspace R_k of H contributes
/// 2 tr(D R_k X_k R_k), where X_k solves the damped fixed point for the
/// compressed blocks R_k P R_k and R_k A R_k with no Hamiltonian part.
double current_infinite_lambda(const SystemSpec& spec, double degeneracy_tol,
                               const ToleranceConfig& tol = default_tolerances());

/// Uses default_degeneracy_tol(spec.H()).
double current_infinite_lambda(const SystemSpec& spec, const ToleranceConfig& tol = default_tolerances());

struct SaturationReport {
    double j_inf = 0.0;
    double j_max = 0.0;
    double commutator_norm = 0.0;
    double ratio = 0.0;
};

/// Builds H = Σ_k E_k |e_k⟩⟨e_k| on the eigenbasis of U and D = U†AU, then
/// evaluates the λ → ∞ current against J_max. Throws DegenerateSpectrum when
/// two energies lie within the degeneracy tolerance and NotUnitary when U†U ≠ 1.
SaturationReport verify_design_saturation(const Matrix& u, const PsdMatrix& a, const std::vector<double>& energies,
                                          const ToleranceConfig& tol = default_tolerances());

/// Orthonormal eigenbasis of a unitary (columns), from its complex Schur form.
Matrix unitary_eigenbasis(const Matrix& u);

/// Throws NotUnitary unless ‖U†U − 1‖_max ≤ tol.unitary.
void require_unitary(const Matrix& u, const ToleranceConfig& tol = default_tolerances());

}  // namespace ness
