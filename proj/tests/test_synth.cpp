#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "mfdma/synth.hpp"
#include "oracles.hpp"

using namespace mfdma;

// Reference values below were evaluated independently at 30 significant
// digits and are frozen here.
namespace ref {
constexpr double tau2_p03 = 0.785875194647;
constexpr double alpha0_p03 = 1.125769383498;
constexpr double alpha1_p03 = 0.881290899231;
constexpr double alpha_inf_p03 = 0.514573172830;  // -log2(0.7)
constexpr double tau2_2d = 1.736965594166;         // -log2(0.30)
constexpr double alpha0_2d = 2.175687469707;
constexpr double alpha1_2d = 1.846439344671;
constexpr double gamma1_h07 = 0.3195079107729;     // (2^1.4 - 2)/2
}  // namespace ref

TEST(PModel1D, SmallDepths) {
    const auto a = pmodel_1d({0.3, 1});
    ASSERT_EQ(a.size(), 2u);
    EXPECT_NEAR(a[0], 0.3, 1e-15);
    EXPECT_NEAR(a[1], 0.7, 1e-15);
    const auto b = pmodel_1d({0.3, 2});
    const std::vector<double> want{0.09, 0.21, 0.21, 0.49};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(b[i], want[i], 1e-15);
}

TEST(PModel1D, UniformAndMass) {
    for (double v : pmodel_1d({0.5, 10}).values()) EXPECT_EQ(v, std::ldexp(1.0, -10));
    for (int k : {1, 5, 12, 20}) {
        const auto x = pmodel_1d({0.3, k});
        EXPECT_EQ(x.size(), std::size_t{1} << k);
        EXPECT_NEAR(pairwise_sum(x.values()), 1.0, 1e-12) << k;
    }
}

TEST(PModel1D, Validation) {
    EXPECT_THROW(pmodel_1d({0.0, 4}), Error);
    EXPECT_THROW(pmodel_1d({1.0, 4}), Error);
    EXPECT_THROW(pmodel_1d({0.3, 0}), Error);
}

TEST(PModel2D, QuadrantOrderAndMass) {
    const auto a = pmodel_2d({{0.1, 0.2, 0.3, 0.4}, 1});
    EXPECT_NEAR(a(0, 0), 0.1, 1e-15);
    EXPECT_NEAR(a(0, 1), 0.2, 1e-15);
    EXPECT_NEAR(a(1, 0), 0.3, 1e-15);
    EXPECT_NEAR(a(1, 1), 0.4, 1e-15);
    const auto b = pmodel_2d({{0.1, 0.2, 0.3, 0.4}, 2});
    EXPECT_NEAR(b(0, 0), 0.01, 1e-15);
    EXPECT_NEAR(b(3, 3), 0.16, 1e-15);
    EXPECT_NEAR(b(0, 3), 0.04, 1e-15);
    for (int k : {1, 4, 9}) {
        const auto s = pmodel_2d({{0.1, 0.2, 0.3, 0.4}, k});
        EXPECT_EQ(s.rows(), std::size_t{1} << k);
        EXPECT_NEAR(pairwise_sum(s.data()), 1.0, 1e-12);
    }
    for (double v : pmodel_2d({{0.25, 0.25, 0.25, 0.25}, 4}).data()) EXPECT_EQ(v, 1.0 / 256);
    EXPECT_THROW(pmodel_2d({{0.1, 0.2, 0.3, 0.5}, 2}), Error);
    EXPECT_THROW(pmodel_2d({{0.0, 0.2, 0.3, 0.5}, 2}), Error);
}

TEST(AnalyticOracle, FrozenValues1D) {
    EXPECT_EQ(analytic_tau_1d(0.3, 0.0), -1.0);
    EXPECT_NEAR(analytic_tau_1d(0.3, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(analytic_tau_1d(0.3, 2.0), ref::tau2_p03, 1e-12);
    EXPECT_NEAR(analytic_alpha_1d(0.3, 0.0), ref::alpha0_p03, 1e-12);
    EXPECT_NEAR(analytic_alpha_1d(0.3, 1.0), ref::alpha1_p03, 1e-12);
    EXPECT_NEAR(analytic_alpha_1d(0.3, 60.0), ref::alpha_inf_p03, 1e-9);
    for (double q : {-3.0, 0.0, 2.5}) EXPECT_NEAR(analytic_alpha_1d(0.5, q), 1.0, 1e-15);
}

TEST(AnalyticOracle, FrozenValues2D) {
    const std::array<double, 4> p{0.1, 0.2, 0.3, 0.4};
    EXPECT_EQ(analytic_tau_2d(p, 0.0), -2.0);
    EXPECT_NEAR(analytic_tau_2d(p, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(analytic_tau_2d(p, 2.0), ref::tau2_2d, 1e-12);
    EXPECT_NEAR(analytic_alpha_2d(p, 0.0), ref::alpha0_2d, 1e-12);
    EXPECT_NEAR(analytic_alpha_2d(p, 1.0), ref::alpha1_2d, 1e-12);
    // Symmetric in the four weights.
    EXPECT_NEAR(analytic_alpha_2d({0.4, 0.3, 0.2, 0.1}, 1.7), analytic_alpha_2d(p, 1.7), 1e-15);
    for (double q : {-2.0, 3.0}) EXPECT_NEAR(analytic_alpha_2d({0.25, 0.25, 0.25, 0.25}, q), 2.0, 1e-15);
}

TEST(AnalyticOracle, SpectrumPoints) {
    const auto o = AnalyticOracle::binomial(0.3);
    EXPECT_EQ(o.at(0.0).f_alpha, 1.0);
    EXPECT_NEAR(o.at(1.0).f_alpha, ref::alpha1_p03, 1e-12);
    EXPECT_EQ(o.at(1.0).d_q, o.at(1.0).alpha);
    EXPECT_NEAR(o.at(2.0).d_q, ref::tau2_p03, 1e-12);
    const auto flat = AnalyticOracle::binomial(0.5);
    for (double q : {-4.0, 0.0, 4.0}) EXPECT_NEAR(flat.at(q).f_alpha, 1.0, 1e-12);
    EXPECT_EQ(AnalyticOracle::fourfold({0.1, 0.2, 0.3, 0.4}).at(0.0).f_alpha, 2.0);
}

TEST(AnalyticOracle, DerivativeAndConcavity) {
    for (const auto& o : {AnalyticOracle::binomial(0.3), AnalyticOracle::fourfold({0.1, 0.2, 0.3, 0.4})}) {
        double prev_alpha = INFINITY;
        for (double q = -5.0; q <= 5.0; q += 0.25) {
            const double h = 1e-5;
            const double numeric = (o.tau(q + h) - o.tau(q - h)) / (2 * h);
            EXPECT_NEAR(o.alpha(q), numeric, 1e-8);
            const double second = o.tau(q + 0.25) - 2 * o.tau(q) + o.tau(q - 0.25);
            EXPECT_LE(second, 1e-12);
            EXPECT_LE(o.alpha(q), prev_alpha);
            prev_alpha = o.alpha(q);
            const auto pt = o.at(q);
            EXPECT_NEAR(q * pt.alpha - pt.tau, pt.f_alpha, 1e-12);
        }
    }
}

TEST(Fbm, Deterministic) {
    const auto a = fbm({0.7, 4096, 42});
    const auto b = fbm({0.7, 4096, 42});
    const auto c = fbm({0.7, 4096, 43});
    EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
    EXPECT_THROW(fbm({1.0, 16, 1}), Error);
    EXPECT_THROW(fbm({0.5, 1, 1}), Error);
}

TEST(Fbm, AutocovarianceFormula) {
    EXPECT_NEAR(fgn_autocovariance(0.7, 1.0), ref::gamma1_h07, 1e-12);
    EXPECT_EQ(fgn_autocovariance(0.7, 0.0), 1.0);
    EXPECT_NEAR(fgn_autocovariance(0.5, 3.0), 0.0, 1e-15);
}

TEST(Fbm, WhiteNoiseAtHalf) {
    const std::size_t n = 65536;
    const auto x = fbm({0.5, n, 3});
    double mean = 0.0;
    for (double v : x.values()) mean += v;
    mean /= n;
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) c0 += (x[i] - mean) * (x[i] - mean);
    for (std::size_t i = 1; i < n; ++i) c1 += (x[i] - mean) * (x[i - 1] - mean);
    EXPECT_LT(std::abs(c1 / c0), 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Fbm, EnsembleLagOneCovariance) {
    const std::size_t n = 4096;
    double acc = 0.0, var = 0.0;
    const int runs = 100;
    for (int r = 0; r < runs; ++r) {
        const auto x = fbm({0.7, n, static_cast<std::uint64_t>(1000 + r)});
        for (std::size_t i = 1; i < n; ++i) acc += x[i] * x[i - 1];
        for (std::size_t i = 0; i < n; ++i) var += x[i] * x[i];
    }
    EXPECT_NEAR(acc / (runs * (n - 1.0)), ref::gamma1_h07, 0.01);
    EXPECT_NEAR(var / (runs * static_cast<double>(n)), 1.0, 0.02);
}

TEST(Fbm, AggregatedVarianceScaling) {
    // Var of m-step sums grows as m^{2H}.
    for (double hurst : {0.3, 0.7}) {
        std::vector<double> logm, logv;
        std::vector<double> var(6, 0.0);
        const std::vector<std::size_t> ms{1, 2, 4, 8, 16, 32};
        const std::size_t n = 8192;
        for (int r = 0; r < 100; ++r) {
            const auto x = fbm({hurst, n, static_cast<std::uint64_t>(r + 1)});
            for (std::size_t k = 0; k < ms.size(); ++k) {
                const std::size_t m = ms[k];
                for (std::size_t i = 0; i + m <= n; i += m) {
                    double sum = 0.0;
                    for (std::size_t j = 0; j < m; ++j) sum += x[i + j];
                    var[k] += sum * sum / static_cast<double>(n / m);
                }
            }
        }
        for (std::size_t k = 0; k < ms.size(); ++k) {
            logm.push_back(std::log(static_cast<double>(ms[k])));
            logv.push_back(std::log(var[k]));
        }
        EXPECT_NEAR(oracle::least_squares(logm, logv).slope / 2.0, hurst, 0.03);
    }
}
