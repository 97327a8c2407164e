#include "ness/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace ness {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotSquare: return "NotSquare";
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NotPsd: return "NotPsd";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SingularGenerator: return "SingularGenerator";
        case ErrorCode::DegenerateChannels: return "DegenerateChannels";
        case ErrorCode::Unstable: return "Unstable";
        case ErrorCode::NumericallyMarginal: return "NumericallyMarginal";
        case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
        case ErrorCode::NotUnitary: return "NotUnitary";
        case ErrorCode::SymbolNotPsd: return "SymbolNotPsd";
        case ErrorCode::InvalidHopping: return "InvalidHopping";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::SolverFailure: return "SolverFailure";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

namespace {

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

void require_square(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        std::ostringstream os;
        os << "expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
        throw Error(ErrorCode::NotSquare, os.str());
    }
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": dimensions " << a << " and " << b << " differ";
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
}

// Factorization of G = P + iH reused for the solve and its refinement steps.
class LyapunovSchur {
public:
    explicit LyapunovSchur(const Matrix& g) : schur_(g) {
        if (schur_.info() != Eigen::Success) {
            throw Error(ErrorCode::SolverFailure, "complex Schur decomposition did not converge");
        }
    }

    // Solves G X + X G† = C.
    Matrix solve(const Matrix& c) const {
        const Matrix& t = schur_.matrixT();
        const Matrix& z = schur_.matrixU();
        const Eigen::Index n = t.rows();

        Matrix rhs = z.adjoint() * c * z;
        Matrix y = Matrix::Zero(n, n);
        Matrix shifted = t;
        // T Y + Y T† = C'. Column j couples only to columns k > j through conj(T(j,k)).
        for (Eigen::Index j = n - 1; j >= 0; --j) {
            Eigen::VectorXcd col = rhs.col(j);
            for (Eigen::Index k = j + 1; k < n; ++k) {
                col -= std::conj(t(j, k)) * y.col(k);
            }
            shifted.diagonal() = t.diagonal().array() + std::conj(t(j, j));
            y.col(j) = shifted.triangularView<Eigen::Upper>().solve(col);
        }
        return z * y * z.adjoint();
    }

private:
    Eigen::ComplexSchur<Matrix> schur_;
};

void check_solver_inputs(const PsdMatrix& p, const HermitianMatrix& h, const PsdMatrix& s,
                         const ToleranceConfig& tol) {
    require_same_dim(p.dim(), h.dim(), "P and H");
    require_same_dim(p.dim(), s.dim(), "P and S");
    require_strictly_positive(p.hermitian(), tol);
}

}  // namespace

HermitianMatrix HermitianMatrix::from_trusted(const Matrix& m) {
    require_square(m);
    return HermitianMatrix(hermitian_part(m));
}

PsdMatrix PsdMatrix::scaled(double factor) const {
    if (!(factor >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "PSD matrices can only be scaled by a non-negative factor");
    }
    return PsdMatrix(h_.scaled(factor));
}

PsdMatrix operator+(const PsdMatrix& a, const PsdMatrix& b) {
    require_same_dim(a.dim(), b.dim(), "PSD sum");
    return PsdMatrix(HermitianMatrix::from_trusted(a.matrix() + b.matrix()));
}

HermitianMatrix validate_hermitian(const Matrix& raw, const ToleranceConfig& tol) {
    require_square(raw);
    if (!raw.allFinite()) throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");
    const double scale = raw.cwiseAbs().maxCoeff();
    const double asym = (raw - raw.adjoint()).cwiseAbs().maxCoeff();
    if (asym > tol.hermitian * scale) {
        std::ostringstream os;
        os << "asymmetry " << asym << " exceeds " << tol.hermitian << " x max|entry| (" << scale << ")";
        throw Error(ErrorCode::NotHermitian, os.str());
    }
    return HermitianMatrix(hermitian_part(raw));
}

PsdMatrix validate_psd(const Matrix& raw, const ToleranceConfig& tol) {
    HermitianMatrix h = validate_hermitian(raw, tol);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::SolverFailure, "eigensolver failed during PSD validation");
    }
    RealVector ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.maxCoeff());
    const double floor = -tol.psd * scale;
    if (ev.minCoeff() < floor) {
        std::ostringstream os;
        os << "smallest eigenvalue " << ev.minCoeff() << " below " << floor;
        throw Error(ErrorCode::NotPsd, os.str());
    }
    if (ev.minCoeff() < 0.0) {
        ev = ev.cwiseMax(0.0);
        const Matrix& v = es.eigenvectors();
        return PsdMatrix(HermitianMatrix::from_trusted(v * ev.asDiagonal() * v.adjoint()));
    }
    return PsdMatrix(std::move(h));
}

PsdMatrix gram_matrix(const Matrix& w, double normalizer) {
    if (!(normalizer > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "Gram normalizer must be positive");
    }
    return PsdMatrix(HermitianMatrix::from_trusted(w.adjoint() * w / normalizer));
}

RealVector eigenvalues(const HermitianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::SolverFailure, "eigensolver failed");
    }
    return es.eigenvalues();
}

SpectralDecomposition spectral_decompose(const HermitianMatrix& h, double degeneracy_tol) {
    if (!(degeneracy_tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "degeneracy tolerance must be positive");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::SolverFailure, "eigensolver failed in spectral decomposition");
    }
    const RealVector& ev = es.eigenvalues();
    const Matrix& vecs = es.eigenvectors();
    const Eigen::Index n = ev.size();

    SpectralDecomposition out;
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index stop = start + 1;
        while (stop < n && ev(stop) - ev(stop - 1) <= degeneracy_tol) ++stop;
        const Eigen::Index mult = stop - start;
        Matrix basis = vecs.middleCols(start, mult);
        out.eigenvalues.push_back(ev.segment(start, mult).mean());
        out.projectors.push_back(basis * basis.adjoint());
        out.multiplicities.push_back(static_cast<int>(mult));
        out.bases.push_back(std::move(basis));
        start = stop;
    }
    return out;
}

double default_degeneracy_tol(const HermitianMatrix& h, double relative_tol) {
    const RealVector ev = eigenvalues(h);
    const double range = ev.maxCoeff() - ev.minCoeff();
    return relative_tol * std::max(range, 1.0);
}

void require_strictly_positive(const HermitianMatrix& p, const ToleranceConfig& tol) {
    const RealVector ev = eigenvalues(p);
    const double threshold = tol.singular * std::max(1.0, ev.maxCoeff());
    if (ev.minCoeff() <= threshold) {
        std::ostringstream os;
        os << "damping matrix has eigenvalue " << ev.minCoeff() << " <= " << threshold;
        throw Error(ErrorCode::SingularGenerator, os.str());
    }
}

namespace {

using WideMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

// R = C - (G X + X G†), accumulated in extended precision so the rounding of
// the products does not swamp the residual of X when ‖G‖ ≫ ‖C‖.
Matrix fixed_point_defect(const Matrix& g, const Matrix& c, const Matrix& x) {
    const WideMatrix gw = g.cast<std::complex<long double>>();
    const WideMatrix xw = x.cast<std::complex<long double>>();
    const WideMatrix r = c.cast<std::complex<long double>>() - (gw * xw + xw * gw.adjoint());
    return r.cast<Complex>();
}

}  // namespace

double damped_fixed_point_residual(const Matrix& p, const Matrix& h, const Matrix& s, const Matrix& x) {
    const Matrix r = fixed_point_defect(p + Complex(0.0, 1.0) * h, 2.0 * s, x);
    const double norm = 2.0 * s.norm();
    return norm > 0.0 ? r.norm() / norm : r.norm();
}

HermitianMatrix solve_damped_fixed_point(const PsdMatrix& p, const HermitianMatrix& h, const PsdMatrix& s,
                                         const ToleranceConfig& tol) {
    check_solver_inputs(p, h, s, tol);
    const Complex i(0.0, 1.0);
    const Matrix g = p.matrix() + i * h.matrix();
    const Matrix c = 2.0 * s.matrix();
    const LyapunovSchur schur(g);

    Matrix x = hermitian_part(schur.solve(c));
    double residual = damped_fixed_point_residual(p.matrix(), h.matrix(), s.matrix(), x);
    // A couple of refinement sweeps recover the digits lost when ‖H‖ ≫ ‖P‖.
    for (int sweep = 0; sweep < 3 && residual > 0.1 * tol.residual; ++sweep) {
        const Matrix r = fixed_point_defect(g, c, x);
        Matrix next = hermitian_part(x + schur.solve(r));
        const double next_residual = damped_fixed_point_residual(p.matrix(), h.matrix(), s.matrix(), next);
        if (next_residual >= residual) break;
        x = std::move(next);
        residual = next_residual;
    }
    if (!(residual <= tol.residual)) {
        std::ostringstream os;
        os << "relative residual " << residual << " above " << tol.residual;
        throw Error(ErrorCode::SolverFailure, os.str());
    }
    return HermitianMatrix::from_trusted(x);
}

HermitianMatrix solve_damped_fixed_point_dense(const PsdMatrix& p, const HermitianMatrix& h, const PsdMatrix& s,
                                               const ToleranceConfig& tol) {
    check_solver_inputs(p, h, s, tol);
    const Complex i(0.0, 1.0);
    const Eigen::Index n = p.dim();
    const Matrix g = p.matrix() + i * h.matrix();
    const Matrix gc = g.conjugate();

    // Column-major vec: vec(GX) = (1 ⊗ G) vec X, vec(X G†) = (conj(G) ⊗ 1) vec X.
    Matrix k = Matrix::Zero(n * n, n * n);
    for (Eigen::Index b = 0; b < n; ++b) {
        k.block(b * n, b * n, n, n) += g;
        for (Eigen::Index a = 0; a < n; ++a) {
            k.block(a * n, b * n, n, n).diagonal().array() += gc(a, b);
        }
    }
    const Matrix c = 2.0 * s.matrix();
    const Eigen::VectorXcd rhs = Eigen::Map<const Eigen::VectorXcd>(c.data(), n * n);
    const Eigen::VectorXcd sol = k.partialPivLu().solve(rhs);
    Matrix x = Eigen::Map<const Matrix>(sol.data(), n, n);
    return HermitianMatrix::from_trusted(x);
}

Matrix damped_propagator(const Matrix& p, const Matrix& h, double t) {
    const Complex i(0.0, 1.0);
    const Matrix gen = -(p + i * h) * t;
    return gen.exp();
}

double frobenius_distance(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

}  // namespace ness
