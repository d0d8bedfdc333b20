#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mixtopo/error.hpp"
#include "mixtopo/matcore.hpp"
#include "mixtopo/models.hpp"
#include "test_support.hpp"

using namespace mixtopo;

namespace {

const BlochModel kModel = BlochModel::aniso_qah();

double dnorm(KPoint k) {
    const auto d = kModel.dvector().value()(k);
    return std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
}

std::vector<KPoint> random_points(int n, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    std::vector<KPoint> out;
    for (int i = 0; i < n; ++i) out.push_back({u(g), u(g)});
    return out;
}

// Three-band model with a k-dependent, generically non-degenerate spectrum.
BlochModel three_band() {
    return BlochModel(3, [](KPoint k) {
        const cplx h01{std::sin(k.kx), 0.3 * std::cos(k.ky)};
        const cplx h12{0.5 * std::sin(k.ky), std::cos(k.kx)};
        return CMatrix(3, {cplx{-2.0 + std::cos(k.kx), 0.0}, h01, 0.2,
                           std::conj(h01), cplx{0.1 * std::cos(k.ky), 0.0}, h12,
                           0.2, std::conj(h12), cplx{2.0 - std::cos(k.ky), 0.0}});
    });
}

}  // namespace

TEST(EvalHamiltonian, BuiltinAtOriginIsMinusSigmaZ) {
    const CMatrix h = eval_hamiltonian(kModel, {0.0, 0.0});
    EXPECT_LT(distance(h, CMatrix(2, {-1.0, 0.0, 0.0, 1.0})), 1e-15);
}

TEST(EvalHamiltonian, BuiltinDVectorAtAxisPoints) {
    const auto& d = kModel.dvector().value();
    const auto a = d({kPi / 2, 0.0});
    EXPECT_NEAR(a[0], 1.0, 1e-15);
    EXPECT_NEAR(a[1], 0.0, 1e-15);
    EXPECT_NEAR(a[2], 0.0, 1e-15);  // 1 - cos(pi/2) - cos(0)
    const auto b = d({0.0, kPi / 2});
    EXPECT_NEAR(b[0], 0.0, 1e-15);
    EXPECT_NEAR(b[1], 3.0, 1e-15);
    EXPECT_NEAR(b[2], 0.0, 1e-15);
    EXPECT_LT(distance(eval_hamiltonian(kModel, {0.0, kPi / 2}), pauli_hamiltonian({0.0, 3.0, 0.0})), 1e-15);
}

TEST(EvalHamiltonian, HermitianAndPeriodic) {
    for (KPoint k : random_points(50, 1)) {
        const CMatrix h = eval_hamiltonian(kModel, k);
        EXPECT_TRUE(h.is_hermitian(1e-12));
        EXPECT_LT(distance(h, eval_hamiltonian(kModel, {k.kx + kTwoPi, k.ky})), 1e-12);
        EXPECT_LT(distance(h, eval_hamiltonian(kModel, {k.kx, k.ky + kTwoPi})), 1e-12);
    }
}

TEST(ThermalState, InfiniteTemperatureIsMaximallyMixed) {
    for (KPoint k : random_points(5, 2))
        EXPECT_LT(distance(thermal_state(kModel, 0.0, k), 0.5 * CMatrix::identity(2)), 1e-15);
}

TEST(ThermalState, TwoLevelOccupationsAtBeta13) {
    const double beta = 1.3;
    const KPoint k{1.0, 1.0};
    const double s1 = std::sin(1.0);
    const double d = std::sqrt(s1 * s1 + 9.0 * s1 * s1 + std::pow(1.0 - 2.0 * std::cos(1.0), 2));
    const double z = std::exp(beta * d) + std::exp(-beta * d);
    const auto e = herm_eig(thermal_state(kModel, beta, k));
    EXPECT_NEAR(e.values[0], std::exp(beta * d) / z, 1e-12);
    EXPECT_NEAR(e.values[1], std::exp(-beta * d) / z, 1e-12);
}

TEST(ThermalState, TraceOneStrictlyPositiveWithLowerBound) {
    const double beta = 1.3;
    KGrid grid(20, 20);
    double dmax = 0.0;
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) dmax = std::max(dmax, dnorm(grid.at(i, j)));
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            const CMatrix rho = thermal_state(kModel, beta, grid.at(i, j));
            EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
            EXPECT_NEAR(rho.trace().imag(), 0.0, 1e-12);
            EXPECT_TRUE(rho.is_hermitian(1e-12));
            const auto e = herm_eig(rho);
            EXPECT_GT(e.values.back(), 0.0);
            EXPECT_GE(e.values.back(), std::exp(-2.0 * beta * dmax) / 2.0);
        }
}

TEST(PureGroundState, OriginProjectsOntoUpperComponent) {
    EXPECT_LT(distance(pure_ground_state(kModel, {0.0, 0.0}), CMatrix(2, {1.0, 0.0, 0.0, 0.0})), 1e-15);
}

TEST(PureGroundState, IdempotentOnGrid) {
    KGrid grid(50, 50);
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            const CMatrix p = pure_ground_state(kModel, grid.at(i, j));
            ASSERT_LT(distance(p * p, p), 1e-10);
            ASSERT_NEAR(p.trace().real(), 1.0, 1e-12);
        }
}

TEST(PureGroundState, ZeroTemperatureLimitOfThermalState) {
    for (KPoint k : random_points(20, 3))
        EXPECT_LT(distance(thermal_state(kModel, 1e3, k), pure_ground_state(kModel, k)), 1e-6);
}

TEST(PureGroundState, GapClosingIsReported) {
    // m = 2 closes the gap at k = (0, 0).
    const BlochModel critical = BlochModel::aniso_qah({1.0, 3.0, 2.0});
    EXPECT_THROW(pure_ground_state(critical, {0.0, 0.0}, 1), GapClosed);
    EXPECT_NO_THROW(pure_ground_state(critical, {0.5, 0.0}));
}

TEST(SpectralState, PureAndMaximallyMixedWeights) {
    for (KPoint k : random_points(5, 4)) {
        EXPECT_LT(distance(spectral_state(kModel, {1.0, 0.0}, k), pure_ground_state(kModel, k)), 1e-14);
        EXPECT_LT(distance(spectral_state(kModel, {1.0, 1.0}, k), 0.5 * CMatrix::identity(2)), 1e-14);
    }
}

TEST(SpectralState, MatchesThermalStateWithSolvedBeta) {
    for (KPoint k : random_points(10, 5)) {
        const double beta = std::atanh(0.6) / dnorm(k);
        EXPECT_LT(distance(spectral_state(kModel, {0.8, 0.2}, k), thermal_state(kModel, beta, k)), 1e-12);
    }
}

TEST(SpectralState, EqualWeightsOnRankNSetGiveScaledProjector) {
    const BlochModel m = three_band();
    for (KPoint k : random_points(10, 6)) {
        const CMatrix rho = spectral_state(m, {1.0, 1.0, 0.0}, k);
        const CMatrix p = 2.0 * rho;
        EXPECT_LT(distance(p * p, p), 1e-12);
        EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    }
}

TEST(SpectralState, DegenerateLevelsWithDifferentWeightsAreRejected) {
    const BlochModel flat = BlochModel(2, [](KPoint) { return CMatrix::identity(2); });
    EXPECT_THROW(spectral_state(flat, {0.7, 0.3}, {0.0, 0.0}), GapClosed);
    EXPECT_NO_THROW(spectral_state(flat, {0.5, 0.5}, {0.0, 0.0}));
}

TEST(StateRule, UnnormalizedRuleKeepsBoltzmannScale) {
    const StateRule r(kModel, Thermal{0.7}, false);
    const KPoint k{0.3, -1.1};
    const double d = dnorm(k);
    EXPECT_NEAR(r.density(k).trace().real(), std::exp(0.7 * d) + std::exp(-0.7 * d), 1e-12);
}

TEST(StateRule, FloorMixesInIdentity) {
    const StateRule r = StateRule(kModel, PureGround{}).with_floor(0.1);
    const auto s = r.spectrum({0.0, 0.0});
    EXPECT_NEAR(s.weights[0], 0.95, 1e-15);
    EXPECT_NEAR(s.weights[1], 0.05, 1e-15);
    EXPECT_THROW(r.with_floor(1.0), std::invalid_argument);
}

TEST(StateRule, SqrtDensitySquaresToDensity) {
    const StateRule r(three_band(), Thermal{2.0});
    for (KPoint k : random_points(5, 7)) {
        const CMatrix s = r.sqrt_density(k);
        EXPECT_LT(distance(s * s, r.density(k)), 1e-12);
    }
}

TEST(StateRule, SpectrumSortedByDescendingWeight) {
    const StateRule r(kModel, Thermal{1.3});
    const auto s = r.spectrum({0.4, 0.9});
    EXPECT_GT(s.weights[0], s.weights[1]);
    EXPECT_NEAR(s.weights[0] - s.weights[1], std::tanh(1.3 * dnorm({0.4, 0.9})), 1e-12);
}

TEST(KGrid, PointsAndWrapping) {
    KGrid g(4, 8);
    EXPECT_EQ(g.at(0, 0), (KPoint{-kPi, -kPi}));
    EXPECT_DOUBLE_EQ(g.at(2, 4).kx, 0.0);
    EXPECT_DOUBLE_EQ(g.at(2, 4).ky, 0.0);
    EXPECT_EQ(g.at(4, 8), g.at(0, 0));
    EXPECT_EQ(g.at(-1, -1), g.at(3, 7));
    EXPECT_DOUBLE_EQ(g.spacing_x(), kPi / 2);
    EXPECT_EQ(g.size(), 32u);
    EXPECT_THROW(KGrid(0, 3), std::invalid_argument);
}
