#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace detlab;

namespace {

double orthogonality_defect(const matrix& q) {
    return (q.transpose() * q - matrix::identity(q.size())).frobenius_norm();
}

} // namespace

TEST(Matrix, RejectsNonSquareAndNonFinite) {
    EXPECT_THROW(matrix::checked({{1.0, 2.0}, {3.0}}), dimension_error);
    EXPECT_THROW(matrix::checked({}), dimension_error);
    EXPECT_THROW(matrix::checked({{std::nan("")}}), domain_error);
    EXPECT_THROW(matrix(2) * matrix(3), dimension_error);
}

TEST(SymEigen, Identity) {
    const auto d = sym_eigen(matrix::identity(3));
    for (double v : d.eigenvalues) EXPECT_DOUBLE_EQ(v, 1.0);
    EXPECT_LT(orthogonality_defect(d.basis), 1e-14);
}

TEST(SymEigen, DiagonalIsSortedDescending) {
    const auto d = sym_eigen(matrix::diagonal({1.0, 4.0}));
    EXPECT_DOUBLE_EQ(d.eigenvalues[0], 4.0);
    EXPECT_DOUBLE_EQ(d.eigenvalues[1], 1.0);
}

TEST(SymEigen, TwoByTwoCharacteristicPolynomial) {
    const auto d = sym_eigen(matrix{{2.0, 1.0}, {1.0, 2.0}});
    EXPECT_NEAR(d.eigenvalues[0], 3.0, 1e-14);
    EXPECT_NEAR(d.eigenvalues[1], 1.0, 1e-14);
}

TEST(SymEigen, RejectsAsymmetricInput) {
    EXPECT_THROW(sym_eigen(matrix{{1.0, 2.0}, {0.0, 1.0}}), domain_error);
}

TEST(SymEigen, ReconstructionUpToSixteen) {
    for (std::size_t n = 1; n <= 16; ++n) {
        for (std::uint64_t s = 0; s < 5; ++s) {
            const matrix g = support::random_general(n, derive_trial_seed(n, s));
            const matrix m = g + g.transpose();
            const auto d = sym_eigen(m);
            EXPECT_LE((d.reconstruct() - m).frobenius_norm(), 1e-9 * (1.0 + m.frobenius_norm())) << "n=" << n;
            EXPECT_LE(orthogonality_defect(d.basis), 1e-9 * n);
            EXPECT_TRUE(std::is_sorted(d.eigenvalues.rbegin(), d.eigenvalues.rend()));
        }
    }
}

TEST(PsdPower, DiagonalSquareRoot) {
    const auto r = psd_power(matrix::diagonal({4.0, 9.0}), 0.5);
    EXPECT_LT(max_abs_diff(r, matrix::diagonal({2.0, 3.0})), 1e-14);
}

TEST(PsdPower, ZeroPowerOfPdIsIdentity) {
    const matrix m = support::random_pd(4, 11);
    EXPECT_LT(max_abs_diff(psd_power(m, 0.0), matrix::identity(4)), 1e-12);
}

TEST(PsdPower, SquareRootSharesEigenvectors) {
    const matrix m{{2.0, 1.0}, {1.0, 2.0}};
    const auto r = psd_power(m, 0.5);
    const auto d = sym_eigen(r);
    EXPECT_NEAR(d.eigenvalues[0], std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(d.eigenvalues[1], 1.0, 1e-14);
    // (1,1)/√2 is the top eigenvector of both.
    const double v0 = (r(0, 0) + r(0, 1));
    EXPECT_NEAR(v0, std::sqrt(3.0), 1e-14);
}

TEST(PsdPower, IdentityPowerReturnsInput) {
    const matrix m = support::random_pd(5, 3);
    EXPECT_LT(support::rel_diff(psd_power(m, 1.0), m), 1e-15);
}

TEST(PsdPower, SquareOfSquareRoot) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const matrix m = support::random_pd(2 + s % 6, s);
        const auto r = psd_power(psd_power(m, 0.5), 2.0);
        EXPECT_LT(support::rel_diff(r, m), 1e-8);
    }
}

TEST(PsdPower, Errors) {
    EXPECT_THROW(psd_power(matrix::diagonal({1.0, -1.0}), 0.5), not_psd_error);
    EXPECT_THROW(psd_power(matrix::diagonal({1.0, 0.0}), -1.0), singularity_error);
    // Rounding-level negatives are clamped.
    const auto r = psd_power(matrix::diagonal({1.0, -1e-14}), 0.5);
    EXPECT_EQ(r(1, 1), 0.0);
}

TEST(AbsValue, SignRemoval) {
    EXPECT_LT(max_abs_diff(abs_value(matrix::diagonal({-2.0, 3.0})), matrix::diagonal({2.0, 3.0})), 1e-14);
}

TEST(AbsValue, RotationGivesIdentity) {
    EXPECT_LT(max_abs_diff(abs_value(matrix{{0.0, -1.0}, {1.0, 0.0}}), matrix::identity(2)), 1e-14);
}

TEST(AbsValue, ExampleProductAgainstExtendedPrecisionOracle) {
    const auto [a, b] = paper_example_pair();
    // |BA| = (AB²A)^{1/2}, formed and rooted in 50-digit arithmetic.
    const auto ab = support::to_dense<oracle::big>(a * b);
    const auto gram_big = oracle::mul(ab, oracle::transpose(ab));
    const matrix expected = support::from_dense(oracle::denman_beavers_sqrt(gram_big));
    EXPECT_LT(support::rel_diff(abs_value(b * a), expected), 1e-14);
}

TEST(AbsValue, DenmanBeaversOracleOnRandomInvertible) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        const std::size_t n = 2 + s % 7;
        const matrix x = support::random_general(n, derive_trial_seed(99, s));
        const auto xtx = support::to_dense<long double>(x.transpose() * x);
        const matrix expected = support::from_dense(oracle::denman_beavers_sqrt(xtx));
        EXPECT_LT(support::rel_diff(abs_value(x), expected), 1e-8) << "seed index " << s;
    }
}

TEST(AbsValue, EigenvaluesAreSingularValues) {
    const matrix x = support::random_general(5, 5);
    const auto ev = sym_eigenvalues(abs_value(x));
    const auto sv = singular_values(x);
    for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], sv[i], 1e-12 * sv[0]);
}

TEST(PolarUnitary, Examples) {
    const matrix pd = support::random_pd(3, 8);
    EXPECT_LT(max_abs_diff(polar_unitary(pd), matrix::identity(3)), 1e-12);
    EXPECT_LT(max_abs_diff(polar_unitary(matrix::diagonal({-1.0, 2.0})), matrix::diagonal({-1.0, 1.0})), 1e-14);
    const double c = std::cos(0.7), s = std::sin(0.7);
    const matrix rot{{c, -s}, {s, c}};
    EXPECT_LT(max_abs_diff(polar_unitary(rot), rot), 1e-14);
}

TEST(PolarUnitary, FactorizationAndOrthogonality) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const matrix x = support::random_general(2 + s % 5, derive_trial_seed(5, s));
        const auto u = polar_unitary(x);
        EXPECT_LT(orthogonality_defect(u), 1e-9);
        EXPECT_LT(support::rel_diff(u * abs_value(x), x), 1e-9);
    }
}

TEST(PolarUnitary, SingularInputRaises) {
    EXPECT_THROW(polar_unitary(matrix::diagonal({1.0, 0.0})), singularity_error);
}

TEST(DetGeneral, Examples) {
    EXPECT_DOUBLE_EQ(det_general(matrix::identity(4)), 1.0);
    const auto [a, b] = paper_example_pair();
    EXPECT_NEAR(det_general(a), 1.0, 1e-15);
    EXPECT_NEAR(det_general(b), 2.0, 1e-15);
    EXPECT_EQ(det_general(matrix{{0.0, 1.0}, {1.0, 0.0}}), -1.0);
}

TEST(DetGeneral, MultiplicativeAndMatchesCofactorOracle) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const std::size_t n = 1 + s % 6;
        const matrix m = support::random_general(n, derive_trial_seed(1, s));
        const matrix k = support::random_general(n, derive_trial_seed(2, s));
        EXPECT_TRUE(support::close(det_general(m * k), det_general(m) * det_general(k), 1e-8));
        const double oracle_det = static_cast<double>(oracle::cofactor_det(support::to_dense<oracle::big>(m)));
        EXPECT_TRUE(support::close(det_general(m), oracle_det, 1e-10));
    }
}

TEST(SpectralNorm, Examples) {
    EXPECT_NEAR(spectral_norm(matrix::identity(3)), 1.0, 1e-15);
    EXPECT_NEAR(spectral_norm(matrix::diagonal({3.0, -5.0})), 5.0, 1e-14);
    EXPECT_NEAR(spectral_norm(matrix{{2.0, 1.0}, {1.0, 2.0}}), 3.0, 1e-14);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const matrix g = support::random_general(4, s);
        const matrix m = g + g.transpose();
        const auto ev = sym_eigenvalues(m);
        EXPECT_NEAR(spectral_norm(m), std::max(std::abs(ev.front()), std::abs(ev.back())), 1e-12 * spectral_norm(m));
    }
}

TEST(Regularize, Examples) {
    EXPECT_LT(max_abs_diff(regularize(matrix(2), 1e-8), matrix::identity(2) * 1e-8), 1e-24);
    EXPECT_LT(max_abs_diff(regularize(matrix::identity(2), 1e-8), matrix::identity(2) * (1.0 + 1e-8)), 1e-16);
    EXPECT_LT(max_abs_diff(regularize(matrix::diagonal({1.0, 0.0}), 1e-8), matrix::diagonal({1.0 + 1e-8, 1e-8})),
              1e-16);
    EXPECT_THROW(regularize(matrix::identity(2), 0.0), domain_error);
}

TEST(IsPsd, Examples) {
    EXPECT_TRUE(is_psd(matrix::identity(3)));
    EXPECT_FALSE(is_psd(matrix::diagonal({1.0, -1.0})));
}

TEST(IsPsd, SchurComplementBlock) {
    // [[H, Xᵀ], [X, XH⁻¹Xᵀ]] is PSD for PD H and any X.
    for (std::uint64_t s = 0; s < 200; ++s) {
        const matrix h = support::random_pd(2, derive_trial_seed(3, s));
        const matrix x = support::random_general(2, derive_trial_seed(4, s));
        const matrix schur = congruence(x, psd_power(h, -1.0));
        matrix block(4);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                block(i, j) = h(i, j);
                block(i, j + 2) = x(j, i);
                block(i + 2, j) = x(i, j);
                block(i + 2, j + 2) = schur(i, j);
            }
        EXPECT_TRUE(is_psd(block.symmetrized())) << "seed index " << s;
    }
}
