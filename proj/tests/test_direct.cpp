#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mfdma/analysis.hpp"
#include "mfdma/direct.hpp"
#include "mfdma/synth.hpp"
#include "oracles.hpp"

using namespace mfdma;

namespace {

LocalFluctuations lf_of(std::vector<double> v, int scale = 10) {
    LocalFluctuations lf;
    lf.scale = scale;
    lf.rows = v.size();
    lf.values = std::move(v);
    return lf;
}

std::vector<double> lognormal(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
    std::mt19937_64 rng(seed);
    std::lognormal_distribution<double> d(0.0, sigma);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

Series1D noise(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> x(n);
    for (auto& v : x) v = g(rng);
    return Series1D(std::move(x));
}

}  // namespace

TEST(CanonicalMeasure, Examples) {
    const auto uniform = canonical_measure(lf_of({1, 2, 3, 4}), 0.0);
    for (double m : uniform.weights) EXPECT_NEAR(m, 0.25, 1e-15);

    const auto mu = canonical_measure(lf_of({1, 2}), 2.0);
    EXPECT_NEAR(mu.weights[0], 0.2, 1e-15);
    EXPECT_NEAR(mu.weights[1], 0.8, 1e-15);

    for (double q : {-4.0, 1.5, 7.0})
        for (double m : canonical_measure(lf_of({0.3, 0.3, 0.3}), q).weights) EXPECT_NEAR(m, 1.0 / 3, 1e-15);
}

TEST(CanonicalMeasure, NormalisedAndScaleFree) {
    const auto f = lognormal(1000, 1, 2.0);
    auto scaled = f;
    for (auto& v : scaled) v *= 1e5;
    for (double q = -8.0; q <= 8.0; q += 0.5) {
        const auto mu = canonical_measure(lf_of(f), q);
        double total = 0.0;
        for (double m : mu.weights) {
            EXPECT_GE(m, 0.0);
            total += m;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        const auto mu2 = canonical_measure(lf_of(scaled), q);
        for (std::size_t v = 0; v < f.size(); ++v) EXPECT_NEAR(mu2.weights[v], mu.weights[v], 1e-12);
        const auto ref = oracle::canonical(f, q);
        for (std::size_t v = 0; v < f.size(); ++v) EXPECT_NEAR(mu.weights[v], ref.mu[v], 1e-12);
    }
}

TEST(PartitionFunction, Examples) {
    EXPECT_NEAR(partition_function(lf_of({5, 6, 7}), 0.0), 3.0, 1e-14);
    EXPECT_NEAR(partition_function(lf_of({1, 2}), 2.0), 5.0, 1e-14);
    EXPECT_NEAR(partition_function(lf_of({1, 2}), -1.0), 1.5, 1e-14);
    const auto f = lognormal(50, 2);
    double sum = 0.0;
    for (double v : f) sum += v;
    EXPECT_NEAR(partition_function(lf_of(f), 1.0), sum, 1e-12 * sum);
}

TEST(PartitionFunction, ZeroFluctuation) {
    for (double q : {-2.0, 0.0}) {
        try {
            log_partition_function(lf_of({1.0, 0.0, 2.0}), q);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::ZeroFluctuation);
        }
        EXPECT_THROW(canonical_moments(lf_of({1.0, 0.0}), q), Error);
    }
}

TEST(CanonicalMoments, ZeroSegmentsContributeNothingForPositiveQ) {
    const auto m = canonical_moments(lf_of({0.0, 1.0, 2.0}), 2.0);
    const auto ref = canonical_moments(lf_of({1.0, 2.0}), 2.0);
    EXPECT_NEAR(m.log_chi, ref.log_chi, 1e-15);
    EXPECT_NEAR(m.a, ref.a, 1e-15);
    EXPECT_NEAR(m.b, ref.b, 1e-15);
}

TEST(CanonicalMoments, PerScaleIdentityAndOracle) {
    const auto f = lognormal(777, 3, 1.3);
    for (double q = -6.0; q <= 6.0; q += 0.25) {
        const auto m = canonical_moments(lf_of(f), q);
        EXPECT_NEAR(q * m.a - m.log_chi, m.b, 1e-12 * std::max(1.0, std::abs(m.log_chi))) << q;
        const auto ref = oracle::canonical(f, q);
        EXPECT_NEAR(m.log_chi, std::log(ref.chi), 1e-11);
        EXPECT_NEAR(m.a, ref.a, 1e-11);
        EXPECT_NEAR(m.b, ref.b, 1e-11);
    }
}

TEST(CanonicalMoments, FiniteOnHugeDynamicRange) {
    std::vector<double> f(1 << 16);
    for (std::size_t v = 0; v < f.size(); ++v) f[v] = std::pow(10.0, -30.0 + 60.0 * v / f.size());
    for (double q : {-10.0, 10.0}) {
        const auto m = canonical_moments(lf_of(f), q);
        EXPECT_TRUE(std::isfinite(m.log_chi));
        EXPECT_TRUE(std::isfinite(m.a));
        EXPECT_TRUE(std::isfinite(m.b));
    }
}

TEST(PartitionFunction, BridgeToFluctuationFunction) {
    const auto f = lognormal(300, 4, 0.8);
    const double n = static_cast<double>(f.size());
    for (double q = -5.0; q <= 5.0; q += 0.5) {
        if (is_zero_q(q)) continue;
        const double lhs = log_partition_function(lf_of(f), q);
        const double rhs = std::log(n) + q * log_fluctuation_function(lf_of(f), q);
        EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(DirectSpectrum, QZeroExactCounts) {
    AnalysisConfig cfg;
    cfg.qs = QGrid::range(-2, 2, 0.5);
    cfg.scales = ScaleGrid({8, 16, 32, 64, 128, 256});
    cfg.approach = Approach::Direct;
    const auto series = noise(4096, 8);
    const auto r = analyze(series, cfg);
    ASSERT_TRUE(r.direct);
    EXPECT_FALSE(r.traditional);
    const auto zero = *cfg.qs.index_of(0.0);
    for (std::size_t s = 0; s < cfg.scales.scales().size(); ++s) {
        const double ns = static_cast<double>(4096 / cfg.scales.scales()[s] - 1);
        EXPECT_EQ(r.table.partition.log_values[zero][s], std::log(ns));
        EXPECT_NEAR(r.table.sums.b[zero][s], -std::log(ns), 1e-12);
    }
    // chi(0,s) = N_s makes tau(0) the slope of ln(N/s - 1), close to -1.
    EXPECT_NEAR(r.direct->rows[zero].tau, -1.0, 0.05);
    EXPECT_NEAR(r.direct->rows[zero].f_alpha, 1.0, 0.05);
}

TEST(DirectSpectrum, LegendreClosureWithSharedRange) {
    AnalysisConfig cfg;
    cfg.qs = QGrid::default_grid();
    cfg.scales = ScaleGrid::log_spaced(10, 800, 15);
    const auto r = analyze(fbm({0.7, 8192, 5}), cfg);
    EXPECT_LE(r.direct->max_legendre_residual(), 1e-9);
    for (const auto& row : r.direct->rows) {
        ASSERT_TRUE(row.alpha_fit && row.f_fit);
        EXPECT_EQ(row.alpha_fit->n_points, row.tau_fit.n_points);
    }
}

TEST(DirectSpectrum, SeparateRangesSurfaceResidual) {
    AnalysisConfig cfg;
    cfg.qs = QGrid::range(-3, 3, 0.5);
    cfg.scales = ScaleGrid::log_spaced(10, 800, 15);
    cfg.direct_ranges.alpha = FitRange{20, 800};
    const auto r = analyze(fbm({0.3, 8192, 6}), cfg);
    EXPECT_GT(r.direct->max_legendre_residual(), 1e-9);
    EXPECT_LT(r.direct->rows[0].alpha_fit->n_points, r.direct->rows[0].tau_fit.n_points);
}

TEST(DirectSpectrum, BinomialCascadeMatchesClosedForm) {
    AnalysisConfig cfg;
    cfg.qs = QGrid::range(-4, 4, 0.5);
    const auto series = pmodel_1d({0.3, 14});
    cfg.scales = ScaleGrid::dyadic(8, 2048);
    const auto r = analyze(series, cfg);
    const auto oracle = AnalyticOracle::binomial(0.3);
    for (const auto& row : r.direct->rows) EXPECT_NEAR(row.tau, oracle.tau(row.q), 0.15) << row.q;
    const auto one = *cfg.qs.index_of(1.0);
    EXPECT_NEAR(r.direct->rows[one].tau, 0.0, 0.03);
    EXPECT_NEAR(r.direct->rows[one].f_alpha, r.direct->rows[one].alpha, 0.03);
    // q large positive: alpha approaches -log2(0.7).
    EXPECT_NEAR(r.direct->rows.back().alpha, oracle.alpha(4.0), 0.1);
}

TEST(DirectSpectrum, UniformCascadeIsMonofractal) {
    AnalysisConfig cfg;
    cfg.qs = QGrid::range(-3, 3, 1);
    cfg.scales = ScaleGrid::dyadic(8, 1024);
    const auto r = analyze(pmodel_1d({0.5, 13}), cfg);
    // The profile is a ramp, so every backward residual equals (s-1)/(2N):
    // all segments carry the same F and mu is uniform at every q.
    const double a0 = r.direct->rows.front().alpha;
    for (const auto& row : r.direct->rows) {
        EXPECT_NEAR(row.alpha, a0, 1e-9);
        EXPECT_NEAR(row.f_alpha, r.direct->rows[3].f_alpha, 1e-9);
    }
    EXPECT_NEAR(a0, 1.0, 0.1);
}

TEST(DirectSpectrum2D, UniformSurface) {
    AnalysisConfig cfg;
    cfg.qs = QGrid::range(-2, 2, 1);
    cfg.scales = ScaleGrid({4, 8, 16, 32, 64});
    const auto r = analyze(pmodel_2d({{0.25, 0.25, 0.25, 0.25}, 8}), cfg);
    ASSERT_EQ(r.dimension, 2);
    for (const auto& row : r.direct->rows) {
        EXPECT_NEAR(row.alpha, r.direct->rows[0].alpha, 1e-9);
        EXPECT_NEAR(row.alpha, 2.0, 0.3);
        EXPECT_NEAR(row.f_alpha, 2.0, 0.2);
    }
    const auto zero = *cfg.qs.index_of(0.0);
    for (std::size_t s = 0; s < 5; ++s) {
        const double side = static_cast<double>(segment_count_2d(256, cfg.scales.scales()[s], 0.0));
        EXPECT_NEAR(r.table.partition.log_values[zero][s], std::log(side * side), 1e-12);
    }
    EXPECT_EQ(r.traditional->rows[zero].tau, -2.0);
    EXPECT_LE(r.direct->max_legendre_residual(), 1e-9);
}

TEST(Analysis, ThreadedMatchesSequentialBitwise) {
    AnalysisConfig cfg;
    cfg.qs = QGrid::range(-3, 3, 0.5);
    cfg.scales = ScaleGrid::log_spaced(10, 1600, 20);
    const auto series = fbm({0.6, 16384, 9});
    const auto seq = analyze(series, cfg);
    cfg.threads = 3;
    const auto par = analyze(series, cfg);
    EXPECT_EQ(seq.table.fluctuation_hash, par.table.fluctuation_hash);
    EXPECT_EQ(seq.table.partition.log_values, par.table.partition.log_values);
    EXPECT_EQ(seq.table.sums.a, par.table.sums.a);
    EXPECT_EQ(seq.table.sums.b, par.table.sums.b);
    EXPECT_EQ(seq.table.fluctuation.log_values, par.table.fluctuation.log_values);

    const auto surface = pmodel_2d({{0.1, 0.2, 0.3, 0.4}, 7});
    AnalysisConfig c2;
    c2.qs = QGrid::range(-2, 2, 1);
    c2.scales = ScaleGrid({4, 6, 8, 12, 16, 24});
    const auto s1 = analyze(surface, c2);
    c2.threads = 4;
    const auto s2 = analyze(surface, c2);
    EXPECT_EQ(s1.table.partition.log_values, s2.table.partition.log_values);
}

TEST(Analysis, ErrorsCarryContext) {
    std::vector<double> x(400, 0.0);  // zero profile: every residual is zero
    AnalysisConfig cfg;
    cfg.qs = QGrid::range(-1, 1, 1);
    cfg.scales = ScaleGrid({5, 10, 20, 40, 80});
    try {
        analyze(Series1D(x), cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroFluctuation);
        EXPECT_NE(std::string(e.what()).find("s = 5"), std::string::npos);
    }
    cfg.scales = ScaleGrid({5, 10, 20, 40, 200});
    EXPECT_THROW(analyze(noise(400, 1), cfg), Error);  // 400 < 4 * 200
}
