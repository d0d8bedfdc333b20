#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mixtopo/error.hpp"
#include "mixtopo/matcore.hpp"
#include "mixtopo/models.hpp"
#include "test_support.hpp"

using namespace mixtopo;
using mixtopo::testing::random_hermitian;
using mixtopo::testing::random_matrix;
using mixtopo::testing::random_unitary;

namespace {

CMatrix diag(std::initializer_list<double> d) { return CMatrix::diagonal(std::vector<double>(d)); }

CMatrix reconstruct(const EigDecomposition& e) {
    return e.vectors * CMatrix::diagonal(e.values) * e.vectors.adjoint();
}

CMatrix reconstruct(const SvdTriple& s) { return s.left * CMatrix::diagonal(s.singulars) * s.right.adjoint(); }

}  // namespace

TEST(HermEig, IdentityHasUnitValues) {
    const auto e = herm_eig(CMatrix::identity(2));
    EXPECT_NEAR(e.values[0], 1.0, 1e-15);
    EXPECT_NEAR(e.values[1], 1.0, 1e-15);
    EXPECT_TRUE(e.vectors.is_unitary(1e-12));
}

TEST(HermEig, SigmaZIsAlreadyDiagonal) {
    const auto e = herm_eig(diag({1.0, -1.0}));
    EXPECT_EQ(e.values, (std::vector<double>{1.0, -1.0}));
    EXPECT_LT(distance(e.vectors, CMatrix::identity(2)), 1e-15);
}

TEST(HermEig, RandomMatricesSatisfyEigenEquationColumnwise) {
    std::mt19937_64 g(11);
    for (std::size_t n : {2u, 3u, 4u, 7u, 16u}) {
        for (int trial = 0; trial < 5; ++trial) {
            const CMatrix a = random_hermitian(n, g);
            const auto e = herm_eig(a);
            for (std::size_t j = 0; j < n; ++j) {
                const auto v = e.vectors.column(j);
                double res = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    cplx av = 0.0;
                    for (std::size_t k = 0; k < n; ++k) av += a(i, k) * v[k];
                    res += std::norm(av - e.values[j] * v[i]);
                }
                EXPECT_LT(std::sqrt(res), 1e-10 * a.frobenius_norm());
            }
            EXPECT_LT(distance(reconstruct(e), a), 1e-10 * a.frobenius_norm());
            EXPECT_TRUE(e.vectors.is_unitary(1e-10));
            EXPECT_TRUE(std::is_sorted(e.values.rbegin(), e.values.rend()));
        }
    }
}

TEST(HermEig, PhaseConventionMakesLargestEntryRealPositive) {
    std::mt19937_64 g(3);
    const auto e = herm_eig(random_hermitian(5, g));
    for (std::size_t j = 0; j < 5; ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < 5; ++i)
            if (std::abs(e.vectors(i, j)) > std::abs(e.vectors(best, j)) * (1.0 + 1e-10)) best = i;
        EXPECT_GT(e.vectors(best, j).real(), 0.0);
        EXPECT_EQ(e.vectors(best, j).imag(), 0.0);
    }
}

TEST(HermEig, DegenerateSpectrumStillReconstructs) {
    std::mt19937_64 g(5);
    const CMatrix u = random_unitary(4, g);
    const CMatrix a = u * diag({2.0, 2.0, -1.0, -1.0}) * u.adjoint();
    const auto e = herm_eig(a);
    EXPECT_LT(distance(reconstruct(e), a), 1e-10 * a.frobenius_norm());
    EXPECT_TRUE(e.vectors.is_unitary(1e-10));
}

TEST(HermEig, RejectsNonHermitianAndNonFinite) {
    CMatrix a = CMatrix::identity(2);
    a(0, 1) = 0.1;
    EXPECT_THROW(herm_eig(a), NonHermitianInput);
    CMatrix b = CMatrix::identity(2);
    b(1, 1) = std::nan("");
    EXPECT_THROW(herm_eig(b), NonFiniteInput);
}

TEST(Svd, IdentityAndRankOneDiagonal) {
    EXPECT_EQ(svd(CMatrix::identity(2)).singulars, (std::vector<double>{1.0, 1.0}));
    const auto s = svd(diag({3.0, 0.0}));
    EXPECT_NEAR(s.singulars[0], 3.0, 1e-15);
    EXPECT_EQ(s.singulars[1], 0.0);
    EXPECT_TRUE(s.left.is_unitary(1e-10));
    EXPECT_TRUE(s.right.is_unitary(1e-10));
    EXPECT_LT(distance(reconstruct(s), diag({3.0, 0.0})), 1e-12);
}

TEST(Svd, SingularValuesAreRootsOfGramEigenvalues) {
    std::mt19937_64 g(21);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix a = random_matrix(3, g);
        const auto s = svd(a);
        const auto gram = herm_eig(adjoint_times(a, a));
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(s.singulars[j], std::sqrt(gram.values[j]), 1e-10);
    }
}

TEST(Svd, ReconstructionAndUnitarityIncludingRankDeficientInput) {
    std::mt19937_64 g(8);
    for (std::size_t n : {2u, 4u, 9u, 16u}) {
        const CMatrix a = random_matrix(n, g);
        const auto s = svd(a);
        EXPECT_LT(distance(reconstruct(s), a), 1e-10 * std::max(1.0, a.frobenius_norm()));
        EXPECT_TRUE(s.left.is_unitary(1e-10));
        EXPECT_TRUE(s.right.is_unitary(1e-10));

        // Rank n-2 product.
        CMatrix p = random_matrix(n, g);
        for (std::size_t i = 0; i < n; ++i) p(i, n - 1) = p(i, n - 2) = 0.0;
        const CMatrix r = p * random_matrix(n, g);
        const auto sr = svd(r);
        EXPECT_LT(distance(reconstruct(sr), r), 1e-10 * std::max(1.0, r.frobenius_norm()));
        EXPECT_TRUE(sr.left.is_unitary(1e-10));
        EXPECT_TRUE(sr.right.is_unitary(1e-10));
        EXPECT_LE(sr.singulars[n - 1], 1e-12 * sr.singulars[0]);
    }
    EXPECT_EQ(svd(CMatrix(3)).singulars, (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(SqrtPsd, DiagonalExamples) {
    EXPECT_LT(distance(sqrt_psd(diag({4.0, 1.0})), diag({2.0, 1.0})), 1e-14);
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_LT(distance(sqrt_psd(0.5 * CMatrix::identity(2)), r * CMatrix::identity(2)), 1e-14);
}

TEST(SqrtPsd, ThermalStateReconstructs) {
    const CMatrix rho = thermal_state(BlochModel::aniso_qah(), 1.0, {1.0, 1.0});
    const CMatrix s = sqrt_psd(rho);
    EXPECT_TRUE(s.is_psd(1e-12));
    EXPECT_LT(distance(s * s, rho), 1e-10);
}

TEST(SqrtPsd, ClampsRoundoffNegativesAndRejectsNegativeSpectrum) {
    const CMatrix s = sqrt_psd(diag({1.0, -1e-11}));
    EXPECT_EQ(s(1, 1), 0.0);
    EXPECT_THROW(sqrt_psd(diag({1.0, -1e-6})), NotPositive);
}

TEST(SqrtPsd, SquareOfRootIsIdempotentAsOperator) {
    std::mt19937_64 g(13);
    for (std::size_t n : {2u, 3u, 6u}) {
        const CMatrix a = random_matrix(n, g);
        const CMatrix s = sqrt_psd(a * a.adjoint());
        const CMatrix again = sqrt_psd(s * s);
        EXPECT_LT(distance(again * again, s * s), 1e-8 * std::max(1.0, (s * s).frobenius_norm()));
        EXPECT_LT(distance(again, s), 1e-8 * std::max(1.0, s.frobenius_norm()));
    }
}

TEST(UnitaryPolar, FixesUnitariesAndMapsPositiveToIdentity) {
    std::mt19937_64 g(2);
    const CMatrix u = random_unitary(4, g);
    EXPECT_LT(distance(unitary_polar(u), u), 1e-12);
    EXPECT_LT(distance(unitary_polar(diag({3.0, 2.0})), CMatrix::identity(2)), 1e-14);
}

TEST(UnitaryPolar, IsNearestUnitaryOnCoarseScanOfU2) {
    std::mt19937_64 g(17);
    const CMatrix a = random_matrix(2, g);
    const CMatrix w = unitary_polar(a);
    ASSERT_TRUE(w.is_unitary(1e-10));
    const double best = distance(a, w);
    // e^{i alpha} [[c e^{i p}, -s e^{-i q}], [s e^{i q}, c e^{-i p}]]
    const int steps = 24;
    double scan_min = 1e300;
    for (int ia = 0; ia < steps; ++ia)
        for (int it = 0; it <= steps / 4; ++it)
            for (int ip = 0; ip < steps; ++ip)
                for (int iq = 0; iq < steps; ++iq) {
                    const double al = kTwoPi * ia / steps;
                    const double th = kPi * it / (steps / 2);
                    const double p = kTwoPi * ip / steps;
                    const double q = kTwoPi * iq / steps;
                    const cplx e = std::polar(1.0, al);
                    const CMatrix v(2, {e * std::polar(std::cos(th), p), -e * std::polar(std::sin(th), -q),
                                        e * std::polar(std::sin(th), q), e * std::polar(std::cos(th), -p)});
                    scan_min = std::min(scan_min, distance(a, v));
                }
    EXPECT_LE(best, scan_min + 1e-12);
    EXPECT_LT(scan_min - best, 0.5);  // the scan is coarse but lands nearby
}

TEST(UnitaryPolar, AgreesWithNewtonIterationOnDegenerateSingularValues) {
    std::mt19937_64 g(4);
    const CMatrix u = random_unitary(4, g);
    const CMatrix v = random_unitary(4, g);
    const CMatrix a = u * diag({2.0, 2.0, 0.5, 0.5}) * v;
    EXPECT_LT(distance(unitary_polar(a), mixtopo::testing::newton_polar(a)), 1e-10);
}

TEST(UnitaryPolar, PositiveScaleInvariance) {
    std::mt19937_64 g(9);
    const CMatrix a = random_matrix(3, g);
    for (double lambda : {1e-6, 0.3, 7.0, 1e5}) EXPECT_LT(distance(unitary_polar(lambda * a), unitary_polar(a)), 1e-12);
}

TEST(UnitaryPolar, RejectsSingularInput) {
    EXPECT_THROW(unitary_polar(diag({1.0, 0.0})), RankDeficient);
    EXPECT_THROW(unitary_polar(diag({1.0, 1e-13})), RankDeficient);
    EXPECT_NO_THROW(unitary_polar(diag({1.0, 1e-11})));
}

TEST(Det, MatchesProductOfEigenvaluesAndKnownValues) {
    EXPECT_NEAR(std::abs(det(CMatrix(2, {1.0, 2.0, 3.0, 4.0})) - (-2.0)), 0.0, 1e-14);
    std::mt19937_64 g(6);
    const CMatrix h = random_hermitian(5, g);
    const auto e = herm_eig(h);
    double prod = 1.0;
    for (double v : e.values) prod *= v;
    EXPECT_NEAR(det(h).real(), prod, 1e-10 * std::max(1.0, std::abs(prod)));
    EXPECT_NEAR(det(h).imag(), 0.0, 1e-10 * std::max(1.0, std::abs(prod)));
}

TEST(OperatorNorm, LargestSingularValue) {
    EXPECT_NEAR(operator_norm(diag({-3.0, 2.0})), 3.0, 1e-14);
}
