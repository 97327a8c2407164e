#pragma once

#include <string_view>

#include "ness/linalg.hpp"

namespace ness {

enum class Statistics { fermion, boson };

std::string_view to_string(Statistics s) noexcept;
Statistics statistics_from_string(std::string_view s);

/// Hamiltonian plus absorption (A) and dissipation (D) rate matrices of a
/// non-interacting open system.
class SystemSpec {
public:
    SystemSpec(HermitianMatrix h, PsdMatrix a, PsdMatrix d, Statistics statistics = Statistics::fermion);

    Eigen::Index m() const noexcept { return h_.dim(); }
    const HermitianMatrix& H() const noexcept { return h_; }
    const PsdMatrix& A() const noexcept { return a_; }
    const PsdMatrix& D() const noexcept { return d_; }
    Statistics statistics() const noexcept { return statistics_; }

    SystemSpec with_hamiltonian(HermitianMatrix h) const { return {std::move(h), a_, d_, statistics_}; }
    SystemSpec with_rates(PsdMatrix a, PsdMatrix d) const { return {h_, std::move(a), std::move(d), statistics_}; }

private:
    HermitianMatrix h_;
    PsdMatrix a_;
    PsdMatrix d_;
    Statistics statistics_;
};

/// Single-particle covariance Q_ij = ω(c†(e_j) c(e_i)).
struct CovarianceMatrix {
    HermitianMatrix q;

    const Matrix& matrix() const noexcept { return q.matrix(); }
    Eigen::Index dim() const noexcept { return q.dim(); }
    RealVector spectrum() const { return eigenvalues(q); }
};

/// True when the spectrum lies in [−slack, 1 + slack].
bool satisfies_pauli(const CovarianceMatrix& q, double slack = default_tolerances().pauli);

/// True when the spectrum is ≥ −slack.
bool is_positive(const CovarianceMatrix& q, double slack = default_tolerances().pauli);

}  // namespace ness
