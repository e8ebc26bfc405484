#ifndef MFDMA_TRADITIONAL_HPP
#define MFDMA_TRADITIONAL_HPP

// Traditional estimator: q-th order fluctuation function, generalized Hurst
// exponents, tau(q) = q h(q) - D_f, generalized dimensions and the Legendre
// spectrum by finite differences on the q grid.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mfdma/core.hpp"
#include "mfdma/detrend.hpp"

namespace mfdma {

namespace detail {

inline void require_usable(std::span<const double> f, double q) {
    bool any_positive = false;
    for (double v : f) {
        if (v > 0.0) {
            any_positive = true;
        } else if (q <= kQEps) {
            throw Error(ErrorCode::ZeroFluctuation, "zero local fluctuation with q = " + std::to_string(q));
        }
    }
    if (!any_positive) throw Error(ErrorCode::ZeroFluctuation, "all local fluctuations are zero");
}

// ln sum_v F_v^q, computed as m + ln sum exp(q ln F_v - m) with m the max term.
inline double log_sum_pow(std::span<const double> f, double q) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : f)
        if (v > 0.0) m = std::max(m, q * std::log(v));
    std::vector<double> terms;
    terms.reserve(f.size());
    for (double v : f) terms.push_back(v > 0.0 ? std::exp(q * std::log(v) - m) : 0.0);
    return m + std::log(pairwise_sum(terms));
}

}  // namespace detail

/// ln F(q,s). Uses the geometric-mean limit at q = 0.
inline double log_fluctuation_function(const LocalFluctuations& lf, double q) {
    detail::require_usable(lf.values, q);
    const auto n = static_cast<double>(lf.segments());
    if (is_zero_q(q)) {
        std::vector<double> logs;
        logs.reserve(lf.values.size());
        for (double v : lf.values) logs.push_back(std::log(v));
        return pairwise_sum(logs) / n;
    }
    return (detail::log_sum_pow(lf.values, q) - std::log(n)) / q;
}

inline double fluctuation_function(const LocalFluctuations& lf, double q) {
    return std::exp(log_fluctuation_function(lf, q));
}

/// ln F(q,s) sampled on a q grid and a list of scales; log_values[iq][is].
struct FluctuationFunction {
    QGrid qs;
    std::vector<int> scales;
    std::vector<std::vector<double>> log_values;
};

/// h(q): log-log slope of F(q,s) against s over the grid's fit range.
inline std::vector<FitResult> hurst_exponents(const FluctuationFunction& F, const ScaleGrid& grid) {
    std::vector<FitResult> out;
    out.reserve(F.qs.size());
    for (std::size_t i = 0; i < F.qs.size(); ++i) {
        try {
            out.push_back(log_ordinate_fit(F.scales, F.log_values[i], grid.fit_range()));
        } catch (const Error& e) {
            throw Error(e.code(), std::string("h(q) fit at q = ") + std::to_string(F.qs[i]) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<double> mass_exponents_from_hurst(std::span<const double> h, std::span<const double> qs,
                                                     int support_dimension) {
    std::vector<double> tau(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) tau[i] = qs[i] * h[i] - support_dimension;
    return tau;
}

/// dtau/dq by three-point Lagrange differences on a possibly non-uniform
/// grid: centred in the interior, one-sided (second order) at the two ends.
inline std::vector<double> derivative_on_grid(std::span<const double> values, const QGrid& grid) {
    const std::size_t n = grid.size();
    if (n < 3 || values.size() != n)
        throw Error(ErrorCode::GridTooSparse, "need at least 3 q points, got " + std::to_string(n));
    const auto q = grid.values();
    auto lagrange = [&](std::size_t a, std::size_t b, std::size_t c, double x) {
        // derivative at x of the parabola through (q_a,v_a), (q_b,v_b), (q_c,v_c)
        const double da = (2 * x - q[b] - q[c]) / ((q[a] - q[b]) * (q[a] - q[c]));
        const double db = (2 * x - q[a] - q[c]) / ((q[b] - q[a]) * (q[b] - q[c]));
        const double dc = (2 * x - q[a] - q[b]) / ((q[c] - q[a]) * (q[c] - q[b]));
        return da * values[a] + db * values[b] + dc * values[c];
    };
    std::vector<double> d(n);
    d[0] = lagrange(0, 1, 2, q[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = lagrange(i - 1, i, i + 1, q[i]);
    d[n - 1] = lagrange(n - 3, n - 2, n - 1, q[n - 1]);
    return d;
}

struct LegendreSpectrum {
    std::vector<double> alpha;
    std::vector<double> f_alpha;
};

inline LegendreSpectrum legendre_spectrum(std::span<const double> tau, const QGrid& grid) {
    LegendreSpectrum out;
    out.alpha = derivative_on_grid(tau, grid);
    out.f_alpha.resize(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) out.f_alpha[i] = grid[i] * out.alpha[i] - tau[i];
    return out;
}

/// D_q = tau(q)/(q-1); at q = 1 the information-dimension limit alpha(1) is used.
inline std::vector<double> generalized_dimensions(std::span<const double> tau, std::span<const double> qs,
                                                  std::span<const double> alpha) {
    std::vector<double> d(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i)
        d[i] = is_zero_q(qs[i] - 1.0) ? alpha[i] : tau[i] / (qs[i] - 1.0);
    return d;
}

/// Back-derives h(q) = (tau(q) + D_f)/q from mass exponents; h(0) = tau'(0)
/// by a centred difference between the neighbouring grid points.
inline std::vector<double> hurst_from_tau(std::span<const double> tau, const QGrid& grid, int support_dimension) {
    std::vector<double> h(tau.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (!grid.is_zero(i)) {
            h[i] = (tau[i] + support_dimension) / grid[i];
        } else if (i > 0 && i + 1 < tau.size()) {
            h[i] = (tau[i + 1] - tau[i - 1]) / (grid[i + 1] - grid[i - 1]);
        }
    }
    return h;
}

/// Full traditional spectrum from a sampled fluctuation function.
inline SpectrumResult traditional_spectrum(const FluctuationFunction& F, const ScaleGrid& grid,
                                           int support_dimension) {
    const auto fits = hurst_exponents(F, grid);
    std::vector<double> h(fits.size());
    for (std::size_t i = 0; i < fits.size(); ++i) h[i] = fits[i].slope;
    const auto tau = mass_exponents_from_hurst(h, F.qs.values(), support_dimension);
    const auto leg = legendre_spectrum(tau, F.qs);
    const auto dq = generalized_dimensions(tau, F.qs.values(), leg.alpha);

    SpectrumResult out;
    out.support_dimension = support_dimension;
    out.rows.resize(F.qs.size());
    for (std::size_t i = 0; i < F.qs.size(); ++i) {
        auto& r = out.rows[i];
        r.q = F.qs[i];
        r.h = h[i];
        r.tau = tau[i];
        r.alpha = leg.alpha[i];
        r.f_alpha = leg.f_alpha[i];
        r.d_q = dq[i];
        r.tau_fit = fits[i];
    }
    return out;
}

}  // namespace mfdma

#endif  // MFDMA_TRADITIONAL_HPP
