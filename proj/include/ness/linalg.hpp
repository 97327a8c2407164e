#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ness/error.hpp"
#include "ness/tolerance.hpp"

namespace ness {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Complex square matrix equal to its adjoint. Construct through
/// validate_hermitian(), or from a real symmetric sample via from_trusted().
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }

    HermitianMatrix scaled(double factor) const { return HermitianMatrix(m_ * factor); }

    /// Wraps a matrix already known to be Hermitian; the lower triangle is
    /// rebuilt from the upper one so the result is exactly self-adjoint.
    static HermitianMatrix from_trusted(const Matrix& m);

    static HermitianMatrix zero(Eigen::Index dim) { return HermitianMatrix(Matrix::Zero(dim, dim)); }
    static HermitianMatrix identity(Eigen::Index dim) { return HermitianMatrix(Matrix::Identity(dim, dim)); }

private:
    explicit HermitianMatrix(Matrix m) : m_(std::move(m)) {}
    friend HermitianMatrix validate_hermitian(const Matrix&, const ToleranceConfig&);

    Matrix m_;
};

/// Hermitian matrix with non-negative spectrum.
class PsdMatrix {
public:
    PsdMatrix() = default;

    Eigen::Index dim() const noexcept { return h_.dim(); }
    const Matrix& matrix() const noexcept { return h_.matrix(); }
    const HermitianMatrix& hermitian() const noexcept { return h_; }
    double trace() const { return matrix().trace().real(); }

    /// Non-negative rescaling keeps the cone.
    PsdMatrix scaled(double factor) const;

    static PsdMatrix zero(Eigen::Index dim) { return PsdMatrix(HermitianMatrix::zero(dim)); }
    static PsdMatrix identity(Eigen::Index dim) { return PsdMatrix(HermitianMatrix::identity(dim)); }

    friend PsdMatrix operator+(const PsdMatrix& a, const PsdMatrix& b);

private:
    explicit PsdMatrix(HermitianMatrix h) : h_(std::move(h)) {}
    friend PsdMatrix validate_psd(const Matrix&, const ToleranceConfig&);
    friend PsdMatrix gram_matrix(const Matrix&, double);

    HermitianMatrix h_;
};

struct SpectralDecomposition {
    std::vector<double> eigenvalues;  // ascending, one per eigenspace
    std::vector<Matrix> projectors;
    std::vector<int> multiplicities;
    std::vector<Matrix> bases;  // orthonormal columns spanning each eigenspace

    std::size_t size() const noexcept { return eigenvalues.size(); }
};

HermitianMatrix validate_hermitian(const Matrix& raw, const ToleranceConfig& tol = default_tolerances());

PsdMatrix validate_psd(const Matrix& raw, const ToleranceConfig& tol = default_tolerances());

/// W†W / normalizer; PSD by construction, so no eigen check is performed.
PsdMatrix gram_matrix(const Matrix& w, double normalizer = 1.0);

/// Eigenvalues within `degeneracy_tol` of their neighbour are merged into one
/// eigenspace (single linkage over the sorted spectrum).
SpectralDecomposition spectral_decompose(const HermitianMatrix& h, double degeneracy_tol);

/// relative_tol × spectral range, with the range floored at 1.
double default_degeneracy_tol(const HermitianMatrix& h, double relative_tol = default_tolerances().degeneracy);

RealVector eigenvalues(const HermitianMatrix& h);

/// Throws SingularGenerator unless λ_min(P) > tol.singular · max(1, λ_max(P)).
void require_strictly_positive(const HermitianMatrix& p, const ToleranceConfig& tol = default_tolerances());

/// Solves (P + iH) X + X (P − iH) = 2S, i.e. X = 2∫₀^∞ e^{−(P+iH)s} S e^{−(P−iH)s} ds,
/// by complex Schur reduction of P + iH followed by column back-substitution.
HermitianMatrix solve_damped_fixed_point(const PsdMatrix& p, const HermitianMatrix& h, const PsdMatrix& s,
                                         const ToleranceConfig& tol = default_tolerances());

/// Same equation through the m²×m² Kronecker system. Reference path for small m.
HermitianMatrix solve_damped_fixed_point_dense(const PsdMatrix& p, const HermitianMatrix& h, const PsdMatrix& s,
                                               const ToleranceConfig& tol = default_tolerances());

/// ‖(P+iH)X + X(P−iH) − 2S‖_F / ‖2S‖_F (absolute when S = 0).
double damped_fixed_point_residual(const Matrix& p, const Matrix& h, const Matrix& s, const Matrix& x);

/// e^{−(P+iH)t}
Matrix damped_propagator(const Matrix& p, const Matrix& h, double t);

double frobenius_distance(const Matrix& a, const Matrix& b);

}  // namespace ness
