#include "doctest.h"

#include "ness/linalg.hpp"
#include "oracles.hpp"

using namespace ness;

namespace {

Matrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix m(n, n);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

PsdMatrix psd(const Matrix& m) { return validate_psd(m); }

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected ness::Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("validate_hermitian accepts Hermitian input and symmetrizes drift") {
    Matrix m = real_matrix({{1, 2}, {2, 3}});
    m(0, 1) += Complex(0.0, 1.0);
    m(1, 0) -= Complex(0.0, 1.0);
    const HermitianMatrix h = validate_hermitian(m);
    CHECK((h.matrix() - m).norm() == 0.0);

    Matrix drift = real_matrix({{1, 2}, {2 + 1e-14, 3}});
    const HermitianMatrix hd = validate_hermitian(drift);
    CHECK((hd.matrix() - hd.matrix().adjoint()).norm() == 0.0);
}

TEST_CASE("validate_hermitian rejects non-square and non-Hermitian input") {
    CHECK(code_of([] { validate_hermitian(Matrix::Zero(2, 3)); }) == ErrorCode::NotSquare);
    CHECK(code_of([] { validate_hermitian(real_matrix({{1, 2}, {0, 1}})); }) == ErrorCode::NotHermitian);
    Matrix nan = Matrix::Identity(2, 2);
    nan(0, 0) = std::nan("");
    CHECK_THROWS_AS(validate_hermitian(nan), Error);
}

TEST_CASE("validate_psd boundary cases") {
    CHECK(validate_psd(Matrix::Identity(3, 3)).trace() == doctest::Approx(3.0));
    CHECK(validate_psd(Matrix::Zero(2, 2)).trace() == 0.0);
    CHECK(code_of([] { validate_psd(real_matrix({{1, 0}, {0, -1}})); }) == ErrorCode::NotPsd);
    // tiny negative eigenvalues from rounding are clipped, not rejected
    const PsdMatrix clipped = validate_psd(real_matrix({{1, 0}, {0, -1e-13}}));
    CHECK(eigenvalues(clipped.hermitian()).minCoeff() >= 0.0);

    RngStream rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix w(3, 2);
        for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = rng.normal();
        CHECK_NOTHROW(validate_psd(w * w.adjoint()));
    }
}

TEST_CASE("spectral_decompose: trivial examples") {
    SUBCASE("identity merges into a single eigenspace") {
        const auto sd = spectral_decompose(HermitianMatrix::identity(4), 1e-8);
        REQUIRE(sd.size() == 1);
        CHECK(sd.eigenvalues[0] == doctest::Approx(1.0));
        CHECK(sd.multiplicities[0] == 4);
        CHECK((sd.projectors[0] - Matrix::Identity(4, 4)).norm() < 1e-12);
    }
    SUBCASE("diag(1, 2)") {
        const auto sd = spectral_decompose(validate_hermitian(real_matrix({{1, 0}, {0, 2}})), 1e-8);
        REQUIRE(sd.size() == 2);
        CHECK((sd.projectors[0] - real_matrix({{1, 0}, {0, 0}})).norm() < 1e-12);
        CHECK((sd.projectors[1] - real_matrix({{0, 0}, {0, 1}})).norm() < 1e-12);
    }
    SUBCASE("near-degenerate pair is merged") {
        const auto sd =
            spectral_decompose(validate_hermitian(real_matrix({{1, 0, 0}, {0, 1 + 1e-10, 0}, {0, 0, 2}})), 1e-8);
        REQUIRE(sd.size() == 2);
        CHECK(sd.multiplicities[0] == 2);
        CHECK(sd.multiplicities[1] == 1);
    }
    CHECK_THROWS_AS(spectral_decompose(HermitianMatrix::identity(2), 0.0), Error);
}

TEST_CASE("spectral_decompose: resolution of identity and reconstruction (property)") {
    RngStream rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 8;
        HermitianMatrix h = sample_goe(m, 1.0, rng);
        if (trial % 3 == 0) {
            // force a degenerate block
            const Matrix v = sample_haar_unitary(m, rng);
            Eigen::VectorXd e(m);
            for (int k = 0; k < m; ++k) e(k) = static_cast<double>(k / 2);
            h = HermitianMatrix::from_trusted(v * e.cast<Complex>().asDiagonal() * v.adjoint());
        }
        const auto sd = spectral_decompose(h, default_degeneracy_tol(h));
        Matrix sum = Matrix::Zero(m, m), rebuilt = Matrix::Zero(m, m);
        for (std::size_t k = 0; k < sd.size(); ++k) {
            sum += sd.projectors[k];
            rebuilt += sd.eigenvalues[k] * sd.projectors[k];
            for (std::size_t l = 0; l < sd.size(); ++l) {
                const Matrix prod = sd.projectors[k] * sd.projectors[l];
                const Matrix expected = k == l ? sd.projectors[k] : Matrix::Zero(m, m);
                CHECK((prod - expected).norm() < 1e-10);
            }
        }
        CHECK((sum - Matrix::Identity(m, m)).norm() < 1e-10);
        CHECK((rebuilt - h.matrix()).norm() < 1e-10);
    }
}

TEST_CASE("solve_damped_fixed_point: scalar examples") {
    const PsdMatrix one = PsdMatrix::identity(1);
    CHECK(solve_damped_fixed_point(one, HermitianMatrix::zero(1), one).matrix()(0, 0).real() ==
          doctest::Approx(1.0).epsilon(1e-15));
    const HermitianMatrix h5 = HermitianMatrix::identity(1).scaled(5.0);
    const Matrix x = solve_damped_fixed_point(one, h5, one).matrix();
    CHECK(std::abs(x(0, 0) - Complex(1.0, 0.0)) < 1e-14);
}

TEST_CASE("solve_damped_fixed_point: singular generator is rejected") {
    const PsdMatrix p = psd(real_matrix({{1, 0}, {0, 0}}));
    CHECK(code_of([&] { solve_damped_fixed_point(p, HermitianMatrix::zero(2), PsdMatrix::identity(2)); }) ==
          ErrorCode::SingularGenerator);
    CHECK(code_of([&] {
              solve_damped_fixed_point(PsdMatrix::identity(2), HermitianMatrix::zero(3), PsdMatrix::identity(2));
          }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("solve_damped_fixed_point matches Gauss-Kronrod quadrature of the integral (m = 4)") {
    RngStream rng(3);
    for (int trial = 0; trial < 3; ++trial) {
        const auto t = oracle::random_triple(4, rng);
        const Matrix x = solve_damped_fixed_point(t.p, t.h, t.s).matrix();
        const Matrix ref = oracle::stationary_quadrature(t.p.matrix(), t.h.matrix(), t.s.matrix());
        CHECK(frobenius_distance(x, ref) < 1e-8);
    }
}

TEST_CASE("solve_damped_fixed_point agrees with the dense Kronecker path") {
    RngStream rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 8;
        const auto t = oracle::random_triple(m, rng, trial % 2 ? 10.0 : 0.3);
        const Matrix x = solve_damped_fixed_point(t.p, t.h, t.s).matrix();
        const Matrix y = solve_damped_fixed_point_dense(t.p, t.h, t.s).matrix();
        CHECK(frobenius_distance(x, y) <= 1e-10 * std::max(1.0, y.norm()));
    }
}

TEST_CASE("solve_damped_fixed_point: Hermiticity, residual and linearity (property)") {
    RngStream rng(5);
    for (int trial = 0; trial < 120; ++trial) {
        const int m = 1 + trial % 10;
        const double h_scale = std::pow(10.0, rng.uniform(-3.0, 4.0));
        const auto t = oracle::random_triple(m, rng, h_scale);
        const Matrix x = solve_damped_fixed_point(t.p, t.h, t.s).matrix();
        CHECK((x - x.adjoint()).norm() <= 1e-12 * std::max(1.0, x.norm()));
        CHECK(damped_fixed_point_residual(t.p.matrix(), t.h.matrix(), t.s.matrix(), x) <= 1e-10);

        const PsdMatrix s2 = sample_wishart_channel(m, m, m, rng);
        const double alpha = rng.uniform(0.0, 3.0), beta = rng.uniform(0.0, 3.0);
        const Matrix combo = solve_damped_fixed_point(t.p, t.h, t.s.scaled(alpha) + s2.scaled(beta)).matrix();
        const Matrix x2 = solve_damped_fixed_point(t.p, t.h, s2).matrix();
        CHECK(frobenius_distance(combo, alpha * x + beta * x2) <= 1e-10 * std::max(1.0, combo.norm()));
    }
}

TEST_CASE("damped_propagator at t = 0 is the identity") {
    RngStream rng(6);
    const auto t = oracle::random_triple(3, rng);
    CHECK((damped_propagator(t.p.matrix(), t.h.matrix(), 0.0) - Matrix::Identity(3, 3)).norm() < 1e-15);
}

TEST_CASE("error messages carry the code name") {
    try {
        validate_psd(real_matrix({{-1}}));
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).rfind("NotPsd", 0) == 0);
    }
}
