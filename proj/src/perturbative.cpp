#include "ness/perturbative.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ness {

double current_infinite_lambda(const SystemSpec& spec, double degeneracy_tol, const ToleranceConfig& tol) {
    if (spec.statistics() != Statistics::fermion) {
        throw Error(ErrorCode::InvalidArgument, "current_infinite_lambda requires a fermion system");
    }
    require_strictly_positive((spec.A() + spec.D()).hermitian(), tol);
    const SpectralDecomposition sd = spectral_decompose(spec.H(), degeneracy_tol);
    const Matrix p = spec.A().matrix() + spec.D().matrix();

    double total = 0.0;
    for (std::size_t k = 0; k < sd.size(); ++k) {
        const Matrix& v = sd.bases[k];
        const PsdMatrix pk = validate_psd(v.adjoint() * p * v, tol);
        const PsdMatrix ak = validate_psd(v.adjoint() * spec.A().matrix() * v, tol);
        const Matrix dk = v.adjoint() * spec.D().matrix() * v;
        const HermitianMatrix zero = HermitianMatrix::zero(v.cols());
        const HermitianMatrix xk = solve_damped_fixed_point(pk, zero, ak, tol);
        total += 2.0 * (dk * xk.matrix()).trace().real();
    }
    return total;
}

double current_infinite_lambda(const SystemSpec& spec, const ToleranceConfig& tol) {
    return current_infinite_lambda(spec, default_degeneracy_tol(spec.H(), tol.degeneracy), tol);
}

void require_unitary(const Matrix& u, const ToleranceConfig& tol) {
    if (u.rows() != u.cols() || u.rows() == 0) {
        throw Error(ErrorCode::NotSquare, "symmetry operator must be square");
    }
    const double dev = (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    if (dev > tol.unitary) {
        std::ostringstream os;
        os << "max |U^dag U - 1| = " << dev;
        throw Error(ErrorCode::NotUnitary, os.str());
    }
}

Matrix unitary_eigenbasis(const Matrix& u) {
    // A normal matrix has a diagonal Schur form, so the Schur vectors are eigenvectors.
    Eigen::ComplexSchur<Matrix> schur(u);
    if (schur.info() != Eigen::Success) {
        throw Error(ErrorCode::SolverFailure, "Schur decomposition of unitary failed");
    }
    return schur.matrixU();
}

SaturationReport verify_design_saturation(const Matrix& u, const PsdMatrix& a, const std::vector<double>& energies,
                                          const ToleranceConfig& tol) {
    require_unitary(u, tol);
    const Eigen::Index m = u.rows();
    if (a.dim() != m || static_cast<Eigen::Index>(energies.size()) != m) {
        throw Error(ErrorCode::DimensionMismatch, "U, A and the energy list must share dimension m");
    }

    std::vector<double> sorted = energies;
    std::sort(sorted.begin(), sorted.end());
    const double range = sorted.back() - sorted.front();
    const double degeneracy_tol = tol.degeneracy * std::max(range, 1.0);
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        if (sorted[k] - sorted[k - 1] <= degeneracy_tol) {
            std::ostringstream os;
            os << "energies " << sorted[k - 1] << " and " << sorted[k] << " collide within " << degeneracy_tol;
            throw Error(ErrorCode::DegenerateSpectrum, os.str());
        }
    }

    const Matrix basis = unitary_eigenbasis(u);
    const RealVector e = Eigen::Map<const RealVector>(energies.data(), m);
    const HermitianMatrix h = HermitianMatrix::from_trusted(basis * e.cast<Complex>().asDiagonal() * basis.adjoint());
    const PsdMatrix d = validate_psd(u.adjoint() * a.matrix() * u, tol);
    const SystemSpec spec(h, a, d, Statistics::fermion);

    SaturationReport r;
    r.j_inf = current_infinite_lambda(spec, degeneracy_tol, tol);
    r.j_max = current_bound_fermion(a, d);
    r.commutator_norm = (h.matrix() * u - u * h.matrix()).norm();
    r.ratio = r.j_inf / r.j_max;
    return r;
}

}  // namespace ness
