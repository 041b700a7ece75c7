#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cvtomo/states.hpp"
#include "oracles.hpp"

using namespace cvtomo;

namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrix random_mixed(int cutoff, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(cutoff + 1, cutoff + 1);
    for (int i = 0; i <= cutoff; ++i)
        for (int j = 0; j <= cutoff; ++j) a(i, j) = Complex(g(rng), g(rng));
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(rho);
}

}  // namespace

TEST(TestState, Amplitudes) {
    const auto psi = test_state();
    EXPECT_EQ(psi.cutoff(), 4);
    EXPECT_DOUBLE_EQ(psi.amplitude(0).real(), 0.5);
    EXPECT_DOUBLE_EQ(psi.amplitude(2).imag(), 0.7071067811865476);
    EXPECT_DOUBLE_EQ(psi.amplitude(2).real(), 0.0);
    EXPECT_DOUBLE_EQ(psi.amplitude(4).real(), 0.5);
    double norm = 0.0;
    for (auto a : psi.amplitudes()) norm += std::norm(a);
    EXPECT_NEAR(norm, 1.0, 1e-15);
}

TEST(FockStateTest, RejectsUnnormalized) {
    EXPECT_THROW(FockState({1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(FockState(std::vector<Complex>{}), std::invalid_argument);
    EXPECT_NO_THROW(FockState::normalized({1.0, 1.0}));
}

TEST(FockStateTest, CoherentIsNormalizedToTruncation) {
    const auto beta = FockState::coherent({1.0, 0.5}, 30);
    double norm = 0.0;
    for (auto a : beta.amplitudes()) norm += std::norm(a);
    EXPECT_NEAR(norm, 1.0, 1e-12);
}

TEST(DensityMatrixTest, OuterProduct) {
    const auto rho = to_density_matrix(test_state());
    EXPECT_NEAR(rho(2, 2).real(), 0.5, 1e-15);
    EXPECT_NEAR(rho(0, 4).real(), 0.25, 1e-15);
    EXPECT_NEAR(std::abs(rho(1, 1)), 0.0, 1e-15);
    const auto vac = to_density_matrix(FockState::vacuum(3));
    EXPECT_EQ(vac(0, 0), Complex(1.0));
    EXPECT_EQ(vac.entries().cwiseAbs().sum(), 1.0);
}

TEST(DensityMatrixTest, RejectsNonHermitian) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
    m(0, 1) = 0.5;
    EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);
    EXPECT_THROW(DensityMatrix{Eigen::MatrixXcd(2, 3)}, std::invalid_argument);
}

TEST(CoherentOverlap, Examples) {
    EXPECT_NEAR(std::abs(coherent_overlap(0, {0, 0}) - 1.0), 0.0, 1e-15);
    EXPECT_EQ(coherent_overlap(1, {0, 0}), Complex(0.0));
    EXPECT_NEAR(coherent_overlap(2, {1, 0}).real(), std::exp(-0.5) / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(coherent_overlap(2, {1, 0}).real(), 0.42888, 1e-5);
}

TEST(CoherentOverlap, MagnitudeBoundedAndLargeN) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-6, 6);
    for (int t = 0; t < 200; ++t) {
        PhasePoint a{u(rng), u(rng)};
        for (int n : {0, 3, 40, 200}) EXPECT_LE(std::abs(coherent_overlap(n, a)), 1.0);
    }
    EXPECT_TRUE(std::isfinite(std::abs(coherent_overlap(300, {12.0, 5.0}))));
}

TEST(QFunction, Examples) {
    const auto vac = to_density_matrix(FockState::vacuum());
    EXPECT_NEAR(q_function(vac, {0, 0}), 1.0 / kPi, 1e-15);
    EXPECT_NEAR(q_function(to_density_matrix(test_state()), {0, 0}), 0.25 / kPi, 1e-15);
    const auto coh = to_density_matrix(FockState::coherent({1.0, 0.0}, 30));
    EXPECT_NEAR(q_function(coh, {1.0, 0.0}), 1.0 / kPi, 1e-8);
}

TEST(QFunction, CoherentStateMatchesClosedForm) {
    const Complex beta(0.7, -0.4);
    const auto coh = to_density_matrix(FockState::coherent(beta, 30));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int t = 0; t < 50; ++t) {
        PhasePoint a{u(rng), u(rng)};
        EXPECT_NEAR(q_function(coh, a), std::exp(-std::norm(a.alpha() - beta)) / kPi, 1e-12);
    }
}

TEST(QFunction, BoundedForPositiveStates) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-4, 4);
    const auto rho = random_mixed(5, rng);
    for (int t = 0; t < 200; ++t) {
        const double q = q_function(rho, {u(rng), u(rng)});
        EXPECT_GE(q, -1e-15);
        EXPECT_LE(q, 1.0 / kPi + 1e-12);
    }
}

TEST(QFunction, IntegratesToOneOverDisk) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 3; ++trial) {
        const auto rho = random_mixed(6, rng);
        const double integral = oracle::disk_integral(
            [&](double r, double t) { return q_function(rho, PhasePoint::from_polar(r, t)); }, 6.0, 600, 64);
        EXPECT_NEAR(integral, 1.0, 1e-6);
    }
}

TEST(QFunction, PureAndDensityPathsAgree) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<Complex> amps(7);
    for (auto& a : amps) a = {g(rng), g(rng)};
    const auto psi = FockState::normalized(amps);
    const auto rho = to_density_matrix(psi);
    for (int t = 0; t < 100; ++t) {
        PhasePoint a{u(rng), u(rng)};
        EXPECT_NEAR(q_function(psi, a), q_function(rho, a), 1e-12);
    }
}

TEST(QFunction, GlobalPhaseInvariance) {
    const auto psi = test_state();
    const auto rotated = psi.with_global_phase(1.234);
    const auto r0 = to_density_matrix(psi);
    const auto r1 = to_density_matrix(rotated);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int t = 0; t < 50; ++t) {
        PhasePoint a{u(rng), u(rng)};
        EXPECT_NEAR(q_function(r0, a), q_function(r1, a), 1e-15);
        EXPECT_NEAR(wigner_function(r0, a), wigner_function(r1, a), 1e-14);
    }
}

TEST(DensityMatrixTest, RejectsOneSidedOffDiagonal) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(1, 0) = Complex(0, 1);
    EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);
}

TEST(Wigner, Examples) {
    EXPECT_NEAR(wigner_function(to_density_matrix(FockState::vacuum()), {0, 0}), 1.0 / kPi, 1e-15);
    EXPECT_NEAR(wigner_function(to_density_matrix(FockState::fock(1, 1)), {0, 0}), -1.0 / kPi, 1e-15);
    EXPECT_NEAR(wigner_function(to_density_matrix(test_state()), {0, 0}), 1.0 / kPi, 1e-15);
}

TEST(Wigner, VacuumGaussian) {
    const auto vac = to_density_matrix(FockState::vacuum(4));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> r(0, 3), t(0, 2 * kPi);
    for (int i = 0; i < 100; ++i) {
        const auto a = PhasePoint::from_polar(r(rng), t(rng));
        EXPECT_NEAR(wigner_function(vac, a), std::exp(-2.0 * std::norm(a.alpha())) / kPi, 1e-10);
    }
}

TEST(Wigner, SinglePhotonClosedForm) {
    const auto one = to_density_matrix(FockState::fock(1, 3));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    for (int i = 0; i < 100; ++i) {
        PhasePoint a{u(rng), u(rng)};
        const double r2 = std::norm(a.alpha());
        EXPECT_NEAR(wigner_function(one, a), (4.0 * r2 - 1.0) * std::exp(-2.0 * r2) / kPi, 1e-12);
    }
}

TEST(Wigner, IntegratesToHalfAndIsBounded) {
    // With the 1/pi prefactor the phase-space integral is 1/2.
    std::mt19937_64 rng(10);
    const auto rho = random_mixed(4, rng);
    const double integral = oracle::disk_integral(
        [&](double r, double t) { return wigner_function(rho, PhasePoint::from_polar(r, t)); }, 6.0, 600, 64);
    EXPECT_NEAR(integral, 0.5, 1e-6);
    const double bound = rho.entries().cwiseAbs().sum() / kPi;
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 100; ++i) EXPECT_LE(std::abs(wigner_function(rho, {u(rng), u(rng)})), bound);
}

TEST(Displacement, UnitaryColumns) {
    // Columns of D(beta) restricted to a large cutoff are orthonormal.
    const Complex beta(0.6, 0.3);
    const int dim = 60;
    Eigen::MatrixXcd D(dim, 4);
    for (int m = 0; m < dim; ++m)
        for (int n = 0; n < 4; ++n) D(m, n) = displacement_element(m, n, beta);
    EXPECT_LT((D.adjoint() * D - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
    // D(beta)|0> is the coherent state.
    for (int m = 0; m < 10; ++m)
        EXPECT_NEAR(std::abs(displacement_element(m, 0, beta) - FockState::coherent(beta, 60).amplitude(m)), 0.0, 1e-14);
}

TEST(Laguerre, LowOrders) {
    for (double x : {0.0, 0.3, 2.5}) {
        EXPECT_DOUBLE_EQ(assoc_laguerre(0, 2, x), 1.0);
        EXPECT_NEAR(assoc_laguerre(1, 2, x), 3.0 - x, 1e-14);
        EXPECT_NEAR(assoc_laguerre(2, 1, x), 0.5 * (x * x - 6.0 * x + 6.0), 1e-13);
    }
    EXPECT_NEAR(log_factorial(10), std::log(3628800.0), 1e-12);
}
