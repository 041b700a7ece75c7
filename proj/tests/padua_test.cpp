#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "cvtomo/experiments.hpp"
#include "cvtomo/padua.hpp"
#include "oracles.hpp"

using namespace cvtomo;

namespace {

MeasurementRecord record_from(const PhaseGrid& grid, const std::function<double(double, double)>& f) {
    MeasurementRecord rec;
    rec.grid = grid;
    for (const auto& p : grid.points) rec.values.push_back(f(p.re, p.im));
    return rec;
}

double max_probe_error(const ChebCoeffs& c, const DensityMatrix& rho, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double L = c.half_width();
    std::uniform_real_distribution<double> u(-L, L);
    double err = 0.0;
    for (int i = 0; i < count; ++i) {
        PhasePoint p{u(rng), u(rng)};
        err = std::max(err, std::abs(eval_cheb(c, p).value - q_function(rho, p)));
    }
    return err;
}

}  // namespace

TEST(PaduaPoints, Counts) {
    EXPECT_EQ(padua_points(20).size(), 231u);
    EXPECT_EQ(padua_points(1).size(), 3u);
    EXPECT_EQ(padua_points(35).size(), 666u);
    for (int n = 1; n < 40; ++n) EXPECT_EQ(padua_count(n), static_cast<std::size_t>((n + 1) * (n + 2) / 2));
}

TEST(PaduaPoints, RejectsDegenerate) {
    EXPECT_THROW(padua_points(0), std::invalid_argument);
    EXPECT_THROW(padua_points(-3), std::invalid_argument);
    EXPECT_THROW(padua_points(4, 0.0), std::invalid_argument);
}

TEST(PaduaPoints, DistinctInsideDomainLexicographic) {
    const double L = 2.5;
    const int n = 13;
    const auto g = padua_points(n, L);
    EXPECT_EQ(g.kind, GridKind::padua);
    EXPECT_EQ(g.order, n);
    std::set<std::pair<double, double>> seen;
    std::vector<std::pair<int, int>> idx;
    for (const auto& p : g.points) {
        EXPECT_LE(std::abs(p.re), L);
        EXPECT_LE(std::abs(p.im), L);
        seen.emplace(p.re, p.im);
        auto jk = padua_index(n, L, p);
        ASSERT_TRUE(jk.has_value());
        EXPECT_EQ((jk->first + jk->second) % 2, 0);
        EXPECT_NEAR(p.re, L * std::cos(jk->first * std::numbers::pi / n), 1e-14);
        EXPECT_NEAR(p.im, L * std::cos(jk->second * std::numbers::pi / (n + 1)), 1e-14);
        idx.push_back(*jk);
    }
    EXPECT_EQ(seen.size(), g.size());
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
}

TEST(PaduaPoints, WeightsSumToOne) {
    for (int n : {1, 2, 7, 20}) {
        double total = 0.0;
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= n + 1; ++k)
                if ((j + k) % 2 == 0) total += padua_weight(n, j, k);
        EXPECT_NEAR(total, 1.0, 1e-14);
    }
}

TEST(EquidistantGrid, Examples) {
    EXPECT_EQ(equidistant_grid(16, 16).size(), 256u);
    const auto corners = equidistant_grid(2, 2, 1.5);
    ASSERT_EQ(corners.size(), 4u);
    for (const auto& p : corners.points) {
        EXPECT_EQ(std::abs(p.re), 1.5);
        EXPECT_EQ(std::abs(p.im), 1.5);
    }
    const auto g3 = equidistant_grid(3, 3, 1.0);
    EXPECT_TRUE(std::any_of(g3.points.begin(), g3.points.end(), [](auto p) { return p.re == 0.0 && p.im == 0.0; }));
    EXPECT_THROW(equidistant_grid(1, 4), std::invalid_argument);
}

TEST(InterpolatePadua, ConstantAndLinear) {
    const auto g = padua_points(6, 2.0);
    auto c = interpolate_padua(record_from(g, [](double, double) { return 1.0; }));
    EXPECT_NEAR(c(0, 0), 1.0, 1e-12);
    Eigen::MatrixXd rest = c.matrix();
    rest(0, 0) = 0.0;
    EXPECT_LT(rest.cwiseAbs().maxCoeff(), 1e-12);
    for (int n : {1, 2, 5}) {
        auto lin = interpolate_padua(record_from(padua_points(n, 2.0), [](double x, double) { return x / 2.0; }));
        Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(n + 1, n + 1);
        expect(1, 0) = 1.0;
        EXPECT_LT((lin.matrix() - expect).cwiseAbs().maxCoeff(), 1e-12) << "n=" << n;
    }
}

TEST(InterpolatePadua, MatchesVandermondeSolve) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int n : {1, 3, 8, 15}) {
        const auto g = padua_points(n, 3.0);
        std::vector<double> v(g.size());
        for (auto& x : v) x = u(rng);
        MeasurementRecord rec{g, v};
        const auto c = interpolate_padua(rec);
        const auto ref = oracle::vandermonde_interpolate(g, v);
        EXPECT_LT((c.matrix() - ref).cwiseAbs().maxCoeff(), 1e-10) << "n=" << n;
    }
}

TEST(InterpolatePadua, PolynomialReproduction) {
    std::mt19937_64 rng(12);
    for (int n : {1, 3, 5, 8, 12, 20, 35}) {
        const double L = 2.7;
        const auto truth = oracle::random_cheb(n, rng);
        const auto rec = record_from(padua_points(n, L), [&](double x, double y) { return oracle::eval_direct(truth, L, x, y); });
        const auto c = interpolate_padua(rec);
        EXPECT_LT((c.matrix() - truth).cwiseAbs().maxCoeff(), 1e-10) << "n=" << n;
        std::uniform_real_distribution<double> u(-L, L);
        for (int i = 0; i < 100; ++i) {
            const double x = u(rng), y = u(rng);
            const double exact = oracle::eval_direct(truth, L, x, y);
            EXPECT_LE(std::abs(eval_cheb(c, {x, y}).value - exact), 1e-9 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST(InterpolatePadua, NodeRoundTrip) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto g = padua_points(17);
    std::vector<double> v(g.size());
    for (auto& x : v) x = u(rng);
    const auto c = interpolate_padua({g, v});
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(eval_cheb(c, g.points[i]).value, v[i], 1e-10);
}

TEST(InterpolatePadua, PermutationRobust) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto g = padua_points(10);
    MeasurementRecord rec{g, {}};
    for (std::size_t i = 0; i < g.size(); ++i) rec.values.push_back(u(rng));
    const auto base = interpolate_padua(rec);
    std::vector<std::size_t> perm(g.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    MeasurementRecord shuffled = rec;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        shuffled.grid.points[i] = rec.grid.points[perm[i]];
        shuffled.values[i] = rec.values[perm[i]];
    }
    EXPECT_LT((interpolate_padua(shuffled).matrix() - base.matrix()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(InterpolatePadua, Linearity) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto g = padua_points(12);
    MeasurementRecord v{g, {}}, w{g, {}}, mix{g, {}};
    const double a = 0.7, b = -2.3;
    for (std::size_t i = 0; i < g.size(); ++i) {
        v.values.push_back(u(rng));
        w.values.push_back(u(rng));
        mix.values.push_back(a * v.values.back() + b * w.values.back());
    }
    const Eigen::MatrixXd lhs = interpolate_padua(mix).matrix();
    const Eigen::MatrixXd rhs = a * interpolate_padua(v).matrix() + b * interpolate_padua(w).matrix();
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InterpolatePadua, DegreeSupportExactlyZero) {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(-1, 1);
    const int n = 9;
    const auto g = padua_points(n);
    MeasurementRecord rec{g, {}};
    for (std::size_t i = 0; i < g.size(); ++i) rec.values.push_back(u(rng));
    const auto c = interpolate_padua(rec);
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b)
            if (a + b > n) EXPECT_EQ(c(a, b), 0.0);
    ChebCoeffs manual(n, 1.0);
    EXPECT_THROW(manual.set(n, 1, 1.0), std::out_of_range);
}

TEST(InterpolatePadua, RejectsBadRecords) {
    const auto eq = equidistant_grid(4, 4);
    EXPECT_THROW(interpolate_padua({eq, std::vector<double>(16, 1.0)}), std::invalid_argument);
    auto g = padua_points(4);
    EXPECT_THROW(interpolate_padua({g, std::vector<double>(g.size() - 1, 1.0)}), std::invalid_argument);
    auto dup = g;
    dup.points[1] = dup.points[0];
    EXPECT_THROW(interpolate_padua({dup, std::vector<double>(g.size(), 1.0)}), std::invalid_argument);
    auto moved = g;
    moved.points[2].re += 0.01;
    EXPECT_THROW(interpolate_padua({moved, std::vector<double>(g.size(), 1.0)}), std::invalid_argument);
    std::vector<double> bad(g.size(), 1.0);
    bad[0] = std::nan("");
    EXPECT_THROW(interpolate_padua({g, bad}), std::invalid_argument);
}

TEST(InterpolatePadua, TestStateConvergesToExactQ) {
    const auto rho = to_density_matrix(test_state());
    double prev = 1.0;
    for (int n : {11, 20, 28, 35}) {
        const auto c = interpolate_padua(sample_state(rho, padua_points(n), FunctionTag::husimi_q, 0.0, 0));
        const double err = max_probe_error(c, rho, 200, 17);
        EXPECT_LT(err, prev) << "n=" << n;
        prev = err;
        if (n == 20) EXPECT_LT(err, 2e-3);
        if (n == 35) EXPECT_LT(err, 1e-5);
    }
}

TEST(InterpolateTensor, ConstantAndChebyshevReproduction) {
    const auto g = equidistant_grid(5, 5, 2.0);
    auto c = interpolate_tensor(record_from(g, [](double, double) { return 0.37; }));
    EXPECT_NEAR(c(0, 0), 0.37, 1e-12);
    EXPECT_EQ(c.order(), 4);
    for (int rows : {3, 6}) {
        auto t2 = interpolate_tensor(record_from(equidistant_grid(rows, rows, 2.0), [](double x, double) {
            return oracle::cheb_t(2, x / 2.0);
        }));
        EXPECT_NEAR(t2(2, 0), 1.0, 1e-10);
        EXPECT_NEAR(t2(0, 0), 0.0, 1e-10);
    }
}

TEST(InterpolateTensor, Rejections) {
    EXPECT_THROW(interpolate_tensor({equidistant_grid(4, 5), std::vector<double>(20, 0.0)}), std::invalid_argument);
    const auto p = padua_points(3);
    EXPECT_THROW(interpolate_tensor({p, std::vector<double>(p.size(), 0.0)}), std::invalid_argument);
}

TEST(InterpolateTensor, WorseThanPaduaOnTestState) {
    const auto rho = to_density_matrix(test_state());
    const auto pad = interpolate_padua(sample_state(rho, padua_points(20), FunctionTag::husimi_q, 0.0, 0));
    const auto ten = interpolate_tensor(sample_state(rho, equidistant_grid(16, 16), FunctionTag::husimi_q, 0.0, 0));
    EXPECT_GT(max_probe_error(ten, rho, 200, 18), max_probe_error(pad, rho, 200, 18));
}

TEST(InterpolateDispatch, ByKind) {
    const auto eq = equidistant_grid(3, 3, 1.0);
    EXPECT_NEAR(interpolate({eq, std::vector<double>(9, 2.0)})(0, 0), 2.0, 1e-12);
    auto custom = eq;
    custom.kind = GridKind::custom;
    EXPECT_THROW(interpolate({custom, std::vector<double>(9, 2.0)}), std::invalid_argument);
}

TEST(EvalCheb, Examples) {
    ChebCoeffs c(3, 2.0);
    c.set(0, 0, 1.0);
    EXPECT_DOUBLE_EQ(eval_cheb(c, {0.3, -1.1}).value, 1.0);
    ChebCoeffs d(3, 2.0);
    d.set(1, 1, 1.0);
    EXPECT_DOUBLE_EQ(eval_cheb(d, {2.0, 2.0}).value, 1.0);
    EXPECT_FALSE(eval_cheb(d, {2.0, 2.0}).extrapolated);
    EXPECT_TRUE(eval_cheb(d, {2.5, 0.0}).extrapolated);
    EXPECT_NEAR(eval_cheb(d, {3.0, 1.0}).value, 1.5 * 0.5, 1e-15);
}

TEST(EvalGrid, ConstantAndConsistent) {
    ChebCoeffs c(2, 1.0);
    c.set(0, 0, 4.0);
    const auto g = eval_grid(c, 7);
    ASSERT_EQ(g.values.size(), 49u);
    for (double v : g.values) EXPECT_DOUBLE_EQ(v, 4.0);
    EXPECT_THROW(eval_grid(c, 1), std::invalid_argument);

    std::mt19937_64 rng(19);
    ChebCoeffs r(6, 2.0, oracle::random_cheb(6, rng));
    const auto dense = eval_grid(r, 11);
    EXPECT_DOUBLE_EQ(dense.points.front().re, -2.0);
    EXPECT_DOUBLE_EQ(dense.points.front().im, -2.0);
    EXPECT_DOUBLE_EQ(dense.points[1].im, -2.0);  // x varies fastest
    for (std::size_t i = 0; i < dense.points.size(); ++i)
        EXPECT_NEAR(dense.values[i], eval_cheb(r, dense.points[i]).value, 1e-13);
}

TEST(Lebesgue, BasicProperties) {
    const auto l1 = lebesgue_estimate(1, 20);
    EXPECT_GE(l1.value, 1.0);
    EXPECT_FALSE(l1.under_resolved);
    EXPECT_TRUE(lebesgue_estimate(8, 20).under_resolved);
    EXPECT_THROW(lebesgue_estimate(0, 20), std::invalid_argument);
}

TEST(Lebesgue, ResolutionStableAndMonotone) {
    const double a = lebesgue_estimate(8, 200).value;
    const double b = lebesgue_estimate(8, 400).value;
    EXPECT_LT(std::abs(a - b) / b, 0.02);
    // 199 contains the 100-point probe set.
    EXPECT_GE(lebesgue_estimate(8, 199).value, lebesgue_estimate(8, 100).value);
}

TEST(Lebesgue, MatchesVandermondeLagrangeSum) {
    const int n = 6;
    const auto g = padua_points(n, 1.0);
    std::vector<Eigen::MatrixXd> lagrange;
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::vector<double> e(g.size(), 0.0);
        e[i] = 1.0;
        lagrange.push_back(oracle::vandermonde_interpolate(g, e));
    }
    const int res = 60;
    double lam = 0.0;
    for (int iy = 0; iy < res; ++iy)
        for (int ix = 0; ix < res; ++ix) {
            const double x = -1.0 + 2.0 * ix / (res - 1), y = -1.0 + 2.0 * iy / (res - 1);
            double s = 0.0;
            for (const auto& l : lagrange) s += std::abs(oracle::eval_direct(l, 1.0, x, y));
            lam = std::max(lam, s);
        }
    EXPECT_NEAR(lebesgue_estimate(n, res).value, lam, 1e-9 * lam);
}
