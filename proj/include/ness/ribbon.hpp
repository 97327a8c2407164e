#pragma once

#include <functional>
#include <vector>

#include "ness/ensembles.hpp"
#include "ness/fermion.hpp"

namespace ness {

/// One Fourier coefficient of a translation-invariant operator: the d×d block
/// coupling a slice to the slice r steps along the ribbon.
struct Hopping {
    int r = 0;
    Matrix t;
};

/// Shift-invariant ribbon of transverse width d. Each operator is a finite
/// list of hoppings with T_{-r} = T_r†, so its symbol X̂(x) = Σ_r T_r e^{irx}
/// is Hermitian at every momentum x.
struct RibbonSpec {
    int d = 1;
    std::vector<Hopping> hoppings_h;
    std::vector<Hopping> hoppings_a;
    std::vector<Hopping> hoppings_d;
    int n_k = 128;

    /// Throws InvalidHopping / InvalidArgument on malformed input.
    void validate(const ToleranceConfig& tol = default_tolerances()) const;
    RibbonSpec with_nodes(int n) const;
};

struct RibbonSymbols {
    HermitianMatrix h;
    PsdMatrix a;
    PsdMatrix d;
};

struct RibbonNodeRecord {
    double x = 0.0;
    double tr_dq = 0.0;
    double tr_a_one_minus_q = 0.0;
    /// tr Â tr D̂ / (tr Â + tr D̂) at this node.
    double local_bound = 0.0;
};

struct RibbonReport {
    double j_density = 0.0;
    double j_density_bound = 0.0;
    double rho = 0.0;
    std::vector<RibbonNodeRecord> per_k_records;
};

using Symbol = std::function<Matrix(double)>;

/// x_j = 2πj/n, j = 0..n-1.
std::vector<double> quadrature_nodes(int n_k);

/// Σ_r T_r e^{irx} for an arbitrary hopping list (no validation).
Matrix symbol_sum(const std::vector<Hopping>& hoppings, int d, double x);

/// Throws SymbolNotPsd naming x if Â(x) or D̂(x) fails PSD validation.
RibbonSymbols eval_symbol(const RibbonSpec& spec, double x, const ToleranceConfig& tol = default_tolerances());

/// Per-momentum fermionic NESS covariance Q̂(x).
CovarianceMatrix ribbon_ness_symbol(const RibbonSpec& spec, double x,
                                    const ToleranceConfig& tol = default_tolerances());

/// (1/2π)∫ tr(X̂ Q̂) dx by the periodic trapezoid rule on spec.n_k nodes.
double observable_density(const RibbonSpec& spec, const Symbol& x_hat, const Symbol& q_hat);

/// (1/2πd)∫ tr Q̂_NESS(x) dx
double particle_density(const RibbonSpec& spec, const ToleranceConfig& tol = default_tolerances());

/// Current density (1/πd)∫ tr D̂Q̂ dx, its upper bound, the particle density
/// and per-node diagnostics.
RibbonReport current_density(const RibbonSpec& spec, const ToleranceConfig& tol = default_tolerances());

/// Random ribbon with hopping range `range`. Â and D̂ are built as B̂†B̂ plus a
/// small on-site offset so they are PSD at every x.
RibbonSpec sample_ribbon(int d, int range, int n_k, RngStream& rng, double onsite_offset = 0.1);

/// Fixed-order pairwise summation.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace ness
