#ifndef MFDMA_BENCH_HPP
#define MFDMA_BENCH_HPP

// Ensemble accuracy of h(q) on fractional Gaussian noise.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "mfdma/analysis.hpp"
#include "mfdma/synth.hpp"

namespace mfdma {

struct HurstBenchConfig {
    std::vector<double> hursts{0.3, 0.5, 0.7};
    std::size_t runs = 100;
    std::size_t length = 65536;
    double theta = 0.5;
    QGrid qs = QGrid::default_grid();
    std::optional<ScaleGrid> scales;  ///< defaults to ScaleGrid::default_1d(length)
    std::uint64_t seed = 1;           ///< run r uses seed + r, for every H
    unsigned threads = 1;
};

struct HurstBenchRow {
    double hurst = 0.0;
    Approach approach = Approach::Traditional;
    double q = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  ///< sample standard deviation (n - 1)
    std::size_t count = 0;
};

/// Mean and spread of h(q) per H for both approaches. The direct approach
/// has no h of its own, so it is back-derived from tau(q).
inline std::vector<HurstBenchRow> hurst_bench(const HurstBenchConfig& cfg) {
    if (cfg.runs < 2) throw Error(ErrorCode::InvalidArgument, "hurst-bench needs at least 2 runs");
    AnalysisConfig ac;
    ac.theta = ThetaPosition::isotropic(cfg.theta);
    ac.qs = cfg.qs;
    ac.scales = cfg.scales ? *cfg.scales : ScaleGrid::default_1d(cfg.length);
    ac.approach = Approach::Both;
    ac.threads = cfg.threads;

    const std::size_t nq = cfg.qs.size();
    std::vector<HurstBenchRow> out;
    for (double hurst : cfg.hursts) {
        // Welford accumulators per approach and q.
        std::vector<double> mean[2], m2[2];
        std::vector<std::size_t> n[2];
        for (int a = 0; a < 2; ++a) {
            mean[a].assign(nq, 0.0);
            m2[a].assign(nq, 0.0);
            n[a].assign(nq, 0);
        }
        for (std::size_t r = 0; r < cfg.runs; ++r) {
            const auto series = fbm({hurst, cfg.length, cfg.seed + r});
            const auto res = analyze(series, ac);
            const SpectrumResult* specs[2] = {&*res.traditional, &*res.direct};
            for (int a = 0; a < 2; ++a) {
                for (std::size_t i = 0; i < nq; ++i) {
                    const auto& h = specs[a]->rows[i].h;
                    if (!h) continue;
                    ++n[a][i];
                    const double d = *h - mean[a][i];
                    mean[a][i] += d / static_cast<double>(n[a][i]);
                    m2[a][i] += d * (*h - mean[a][i]);
                }
            }
        }
        for (int a = 0; a < 2; ++a) {
            for (std::size_t i = 0; i < nq; ++i) {
                HurstBenchRow row;
                row.hurst = hurst;
                row.approach = a == 0 ? Approach::Traditional : Approach::Direct;
                row.q = cfg.qs[i];
                row.count = n[a][i];
                row.mean = n[a][i] ? mean[a][i] : std::nan("");
                row.stddev = n[a][i] > 1 ? std::sqrt(m2[a][i] / static_cast<double>(n[a][i] - 1)) : std::nan("");
                out.push_back(row);
            }
        }
    }
    return out;
}

}  // namespace mfdma

#endif  // MFDMA_BENCH_HPP
