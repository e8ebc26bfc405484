#ifndef MFDMA_ANALYSIS_HPP
#define MFDMA_ANALYSIS_HPP

// End-to-end pipeline: detrend every scale once, reduce its local
// fluctuations to per-q moments, then run either or both estimators on the
// same moment table.

#include <cstdint>
#include <cstring>
#include <exception>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "mfdma/core.hpp"
#include "mfdma/detrend.hpp"
#include "mfdma/direct.hpp"
#include "mfdma/traditional.hpp"

namespace mfdma {

enum class Approach { Traditional, Direct, Both };

inline Approach parse_approach(const std::string& text) {
    if (text == "traditional") return Approach::Traditional;
    if (text == "direct") return Approach::Direct;
    if (text == "both") return Approach::Both;
    throw Error(ErrorCode::InvalidArgument, "unknown approach '" + text + "'");
}

inline const char* to_string(Approach a) {
    switch (a) {
    case Approach::Traditional: return "traditional";
    case Approach::Direct: return "direct";
    case Approach::Both: return "both";
    }
    return "?";
}

struct AnalysisConfig {
    ThetaPosition theta = ThetaPosition::backward();
    QGrid qs = QGrid::default_grid();
    ScaleGrid scales;
    Approach approach = Approach::Both;
    DirectFitRanges direct_ranges;
    unsigned threads = 1;  ///< scales processed concurrently; results do not depend on it
};

/// Everything the estimators consume, indexed [q][scale].
struct MomentTable {
    QGrid qs;
    std::vector<int> scales;
    std::vector<std::size_t> segments;
    FluctuationFunction fluctuation;
    PartitionFunction partition;
    CanonicalSums sums;
    std::uint64_t fluctuation_hash = 0;  ///< FNV-1a over every F_v(s) in scale order
};

struct AnalysisResult {
    int dimension = 1;
    MomentTable table;
    std::optional<SpectrumResult> traditional;
    std::optional<SpectrumResult> direct;
};

namespace detail {

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;

inline std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

struct ScaleMoments {
    std::size_t segments = 0;
    std::uint64_t hash = 0;
    std::vector<double> log_f, log_chi, a, b;  // per q
};

inline ScaleMoments reduce_scale(const LocalFluctuations& lf, const QGrid& qs) {
    ScaleMoments out;
    out.segments = lf.segments();
    out.hash = fnv1a(kFnvOffset, &lf.scale, sizeof lf.scale);
    out.hash = fnv1a(out.hash, lf.values.data(), lf.values.size() * sizeof(double));
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const double q = qs[i];
        try {
            out.log_f.push_back(log_fluctuation_function(lf, q));
            const auto m = canonical_moments(lf, q);
            out.log_chi.push_back(m.log_chi);
            out.a.push_back(m.a);
            out.b.push_back(m.b);
        } catch (const Error& e) {
            throw Error(e.code(), "at q = " + std::to_string(q) + ", s = " + std::to_string(lf.scale) + ": " +
                                      e.what());
        }
    }
    return out;
}

// Runs reduce(i) for every scale index, `threads` at a time, writing into
// fixed slots so the assembled table is independent of scheduling.
template <class Reduce>
std::vector<ScaleMoments> map_scales(std::size_t count, unsigned threads, Reduce reduce) {
    std::vector<ScaleMoments> out(count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = reduce(i);
        return out;
    }
    std::vector<std::future<void>> workers;
    for (unsigned t = 0; t < threads; ++t) {
        workers.push_back(std::async(std::launch::async, [&, t] {
            for (std::size_t i = t; i < count; i += threads) out[i] = reduce(i);
        }));
    }
    for (auto& w : workers) w.get();
    return out;
}

inline MomentTable assemble(const QGrid& qs, std::span<const int> scales, std::vector<ScaleMoments> per_scale) {
    MomentTable t;
    t.qs = qs;
    t.scales.assign(scales.begin(), scales.end());
    const std::size_t nq = qs.size(), ns = scales.size();
    t.fluctuation = {qs, t.scales, std::vector<std::vector<double>>(nq, std::vector<double>(ns))};
    t.partition = {qs, t.scales, std::vector<std::vector<double>>(nq, std::vector<double>(ns))};
    t.sums = {qs, t.scales, std::vector<std::vector<double>>(nq, std::vector<double>(ns)),
              std::vector<std::vector<double>>(nq, std::vector<double>(ns))};
    t.fluctuation_hash = kFnvOffset;
    for (std::size_t s = 0; s < ns; ++s) {
        const auto& m = per_scale[s];
        t.segments.push_back(m.segments);
        t.fluctuation_hash = fnv1a(t.fluctuation_hash, &m.hash, sizeof m.hash);
        for (std::size_t i = 0; i < nq; ++i) {
            t.fluctuation.log_values[i][s] = m.log_f[i];
            t.partition.log_values[i][s] = m.log_chi[i];
            t.sums.a[i][s] = m.a[i];
            t.sums.b[i][s] = m.b[i];
        }
    }
    return t;
}

inline AnalysisResult run_estimators(int dimension, MomentTable table, const AnalysisConfig& cfg) {
    AnalysisResult r;
    r.dimension = dimension;
    if (cfg.approach != Approach::Direct)
        r.traditional = traditional_spectrum(table.fluctuation, cfg.scales, dimension);
    if (cfg.approach != Approach::Traditional)
        r.direct = direct_spectrum(table.partition, table.sums, cfg.scales, dimension, cfg.direct_ranges);
    r.table = std::move(table);
    return r;
}

}  // namespace detail

/// Per-scale moments of a series; the detrended residuals of one scale are
/// dropped as soon as that scale has been reduced.
inline MomentTable collect_moments(const Series1D& series, const AnalysisConfig& cfg) {
    cfg.scales.validate_for_length(series.size());
    cfg.theta.validate();
    const Detrender1D engine(cumulative_profile(series));
    const auto scales = cfg.scales.scales();
    auto per_scale = detail::map_scales(scales.size(), cfg.threads, [&](std::size_t i) {
        const auto lf = segment_rms(engine.residuals(scales[i], cfg.theta.theta1));
        return detail::reduce_scale(lf, cfg.qs);
    });
    return detail::assemble(cfg.qs, scales, std::move(per_scale));
}

/// Isotropic (s1 = s2 = s) per-scale moments of a surface.
inline MomentTable collect_moments(const Surface2D& surface, const AnalysisConfig& cfg) {
    cfg.theta.validate();
    const Detrender2D engine(cumulative_profile_2d(surface));
    const auto scales = cfg.scales.scales();
    auto per_scale = detail::map_scales(scales.size(), cfg.threads, [&](std::size_t i) {
        const int s = scales[i];
        const auto lf = segment_rms_2d(engine.residuals(s, s, cfg.theta));
        return detail::reduce_scale(lf, cfg.qs);
    });
    return detail::assemble(cfg.qs, scales, std::move(per_scale));
}

inline AnalysisResult analyze(const Series1D& series, const AnalysisConfig& cfg) {
    return detail::run_estimators(1, collect_moments(series, cfg), cfg);
}

inline AnalysisResult analyze(const Surface2D& surface, const AnalysisConfig& cfg) {
    return detail::run_estimators(2, collect_moments(surface, cfg), cfg);
}

}  // namespace mfdma

#endif  // MFDMA_ANALYSIS_HPP
