#include "ness/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ness/perturbative.hpp"

namespace ness {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x6e657373u};
    engine_.seed(seq);
}

std::string_view to_string(GoeConvention c) noexcept {
    return c == GoeConvention::variance ? "variance" : "literal_std";
}

GoeConvention goe_convention_from_string(std::string_view s) {
    if (s == "variance") return GoeConvention::variance;
    if (s == "literal_std") return GoeConvention::literal_std;
    throw Error(ErrorCode::ConfigError, "unknown GOE convention '" + std::string(s) + "'");
}

std::string_view to_string(EnsembleKind k) noexcept {
    switch (k) {
        case EnsembleKind::goe: return "goe";
        case EnsembleKind::wishart: return "wishart";
        case EnsembleKind::haar: return "haar";
        case EnsembleKind::designed: return "designed";
    }
    return "goe";
}

EnsembleKind ensemble_kind_from_string(std::string_view s) {
    if (s == "goe") return EnsembleKind::goe;
    if (s == "wishart") return EnsembleKind::wishart;
    if (s == "haar") return EnsembleKind::haar;
    if (s == "designed") return EnsembleKind::designed;
    throw Error(ErrorCode::ConfigError, "unknown ensemble kind '" + std::string(s) + "'");
}

void EnsembleConfig::validate() const {
    if (m < 1 || m_A < 1 || m_D < 1 || m_P < 1) {
        throw Error(ErrorCode::ConfigError, "ensemble sizes m, m_A, m_D, m_P must all be >= 1");
    }
    if (!(v > 0.0)) throw Error(ErrorCode::ConfigError, "GOE scale v must be positive");
    if (energy_halfwidth < 0.0) throw Error(ErrorCode::ConfigError, "energy_halfwidth must be >= 0");
}

HermitianMatrix sample_goe(int m, double v, RngStream& rng, GoeConvention convention) {
    if (m < 1 || !(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample_goe needs m >= 1 and v > 0");
    const double base = v / std::sqrt(static_cast<double>(m));
    const double off_sigma = base;
    const double diag_sigma = convention == GoeConvention::variance ? std::sqrt(2.0) * base : 2.0 * base;

    RealMatrix h(m, m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i <= j; ++i) {
            const double x = rng.normal() * (i == j ? diag_sigma : off_sigma);
            h(i, j) = x;
            h(j, i) = x;
        }
    }
    return HermitianMatrix::from_trusted(h.cast<Complex>());
}

PsdMatrix sample_wishart_channel(int m, int m_ch, int normalizer, RngStream& rng) {
    if (m < 1 || m_ch < 1 || normalizer < 1) {
        throw Error(ErrorCode::InvalidArgument, "sample_wishart_channel needs m, m_ch, normalizer >= 1");
    }
    RealMatrix w(m_ch, m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m_ch; ++i) w(i, j) = rng.normal();
    }
    return gram_matrix(w.cast<Complex>(), static_cast<double>(normalizer));
}

Matrix sample_haar_unitary(int m, RngStream& rng) {
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "sample_haar_unitary needs m >= 1");
    const double s = std::sqrt(0.5);
    Matrix z(m, m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const double re = rng.normal();
            const double im = rng.normal();
            z(i, j) = Complex(re * s, im * s);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < m; ++k) {
        const Complex rkk = r(k, k);
        const double mag = std::abs(rkk);
        if (mag > 0.0) q.col(k) *= rkk / mag;
    }
    return q;
}

namespace {

bool has_collision(std::vector<double> values, double tol) {
    std::sort(values.begin(), values.end());
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] - values[k - 1] <= tol) return true;
    }
    return false;
}

bool has_eigenphase_collision(const Matrix& u, double tol) {
    Eigen::ComplexSchur<Matrix> schur(u, false);
    const Eigen::VectorXcd ev = schur.matrixT().diagonal();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        for (Eigen::Index j = i + 1; j < ev.size(); ++j) {
            if (std::abs(ev(i) - ev(j)) <= tol) return true;
        }
    }
    return false;
}

}  // namespace

DesignedSystem build_designed_system(const PsdMatrix& a, double energy_halfwidth, RngStream& rng,
                                     const ToleranceConfig& tol) {
    if (!(energy_halfwidth > 0.0)) throw Error(ErrorCode::InvalidArgument, "energy_halfwidth must be positive");
    const int m = static_cast<int>(a.dim());
    const double degeneracy_tol = tol.degeneracy * std::max(2.0 * energy_halfwidth, 1.0);

    Matrix u;
    do {
        u = sample_haar_unitary(m, rng);
    } while (m > 1 && has_eigenphase_collision(u, tol.degeneracy));

    std::vector<double> energies(static_cast<std::size_t>(m));
    do {
        for (double& e : energies) e = rng.uniform(-energy_halfwidth, energy_halfwidth);
    } while (has_collision(energies, degeneracy_tol));

    const Matrix basis = unitary_eigenbasis(u);
    const RealVector e = Eigen::Map<const RealVector>(energies.data(), m);
    HermitianMatrix h = HermitianMatrix::from_trusted(basis * e.cast<Complex>().asDiagonal() * basis.adjoint());
    PsdMatrix d = validate_psd(u.adjoint() * a.matrix() * u, tol);
    const double comm = (h.matrix() * u - u * h.matrix()).norm();

    return DesignedSystem{SystemSpec(std::move(h), a, std::move(d), Statistics::fermion), std::move(u),
                          std::move(energies), comm};
}

DesignedSystem build_designed_system(int m, int m_A, double energy_halfwidth, RngStream& rng,
                                     const ToleranceConfig& tol) {
    if (m < 1 || m_A < 1) throw Error(ErrorCode::InvalidArgument, "build_designed_system needs m, m_A >= 1");
    const double halfwidth = energy_halfwidth > 0.0 ? energy_halfwidth : 0.5 * m;
    const PsdMatrix a = sample_wishart_channel(m, m_A, 2 * m_A, rng);
    return build_designed_system(a, halfwidth, rng, tol);
}

}  // namespace ness
