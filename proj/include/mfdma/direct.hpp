#ifndef MFDMA_DIRECT_HPP
#define MFDMA_DIRECT_HPP

// Direct determination of the multifractal spectrum through a canonical
// measure on the segments.
//
// For each (q, s):
//   mu(q,s,v) = F_v^q / chi(q,s),      chi(q,s) = sum_v F_v^q
//   A(q,s)    = sum_v mu ln F_v        (slope vs ln s -> alpha(q))
//   B(q,s)    = sum_v mu ln mu         (slope vs ln s -> f(alpha(q)))
//   ln chi    ~ tau(q) ln s
// and q A - ln chi = B holds at every s, so the three fitted slopes satisfy
// q alpha - tau = f to rounding when they share a fit range.
//
// Sums run in log space with the largest q ln F_v shifted out, which keeps
// |q| ~ 10 on millions of segments finite.

#include <cmath>
#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfdma/core.hpp"
#include "mfdma/detrend.hpp"
#include "mfdma/traditional.hpp"

namespace mfdma {

struct CanonicalMeasure {
    double q = 0.0;
    int scale = 0;
    std::vector<double> weights;
};

/// ln chi together with the two canonical averages at one (q, s).
struct CanonicalMoments {
    double log_chi = 0.0;
    double a = 0.0;  ///< sum mu ln F
    double b = 0.0;  ///< sum mu ln mu
};

namespace detail {

struct ShiftedPowers {
    double shift = 0.0;           // max_v q ln F_v
    double log_total = 0.0;       // ln sum exp(q ln F_v - shift)
    std::vector<double> log_f;    // ln F_v, -inf for zero segments
    std::vector<double> weights;  // mu(q,s,v)
};

inline ShiftedPowers shifted_powers(const LocalFluctuations& lf, double q) {
    require_usable(lf.values, q);
    ShiftedPowers sp;
    const std::size_t n = lf.values.size();
    sp.log_f.resize(n);
    sp.weights.resize(n);
    sp.shift = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < n; ++v) {
        sp.log_f[v] = lf.values[v] > 0.0 ? std::log(lf.values[v]) : -std::numeric_limits<double>::infinity();
        if (lf.values[v] > 0.0) sp.shift = std::max(sp.shift, q * sp.log_f[v]);
    }
    for (std::size_t v = 0; v < n; ++v)
        sp.weights[v] = lf.values[v] > 0.0 ? std::exp(q * sp.log_f[v] - sp.shift) : 0.0;
    const double total = pairwise_sum(sp.weights);
    sp.log_total = std::log(total);
    for (double& w : sp.weights) w /= total;
    return sp;
}

}  // namespace detail

inline CanonicalMeasure canonical_measure(const LocalFluctuations& lf, double q) {
    auto sp = detail::shifted_powers(lf, q);
    return CanonicalMeasure{q, lf.scale, std::move(sp.weights)};
}

/// ln chi(q,s); chi itself overflows double for large |q| on real data.
inline double log_partition_function(const LocalFluctuations& lf, double q) {
    if (is_zero_q(q)) {
        detail::require_usable(lf.values, q);
        return std::log(static_cast<double>(lf.segments()));
    }
    const auto sp = detail::shifted_powers(lf, q);
    return sp.shift + sp.log_total;
}

inline double partition_function(const LocalFluctuations& lf, double q) {
    return std::exp(log_partition_function(lf, q));
}

/// ln chi, A and B at one (q, s). Segments with mu = 0 contribute nothing
/// (0 ln 0 := 0), which only arises for q > 0.
inline CanonicalMoments canonical_moments(const LocalFluctuations& lf, double q) {
    const auto sp = detail::shifted_powers(lf, q);
    const std::size_t n = sp.weights.size();
    std::vector<double> a_terms(n, 0.0), b_terms(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        const double mu = sp.weights[v];
        if (mu > 0.0) {
            a_terms[v] = mu * sp.log_f[v];
            b_terms[v] = mu * std::log(mu);
        }
    }
    CanonicalMoments m;
    m.log_chi = sp.shift + sp.log_total;
    m.a = pairwise_sum(a_terms);
    m.b = pairwise_sum(b_terms);
    return m;
}

/// ln chi(q,s) sampled on a q grid; log_values[iq][is].
struct PartitionFunction {
    QGrid qs;
    std::vector<int> scales;
    std::vector<std::vector<double>> log_values;
};

/// A(q,s) and B(q,s) sampled on a q grid; [iq][is].
struct CanonicalSums {
    QGrid qs;
    std::vector<int> scales;
    std::vector<std::vector<double>> a;
    std::vector<std::vector<double>> b;
};

namespace detail {

template <class FitFn>
std::vector<FitResult> fit_rows(const QGrid& qs, std::span<const int> scales,
                                const std::vector<std::vector<double>>& rows, FitRange range, const char* what,
                                FitFn fit) {
    std::vector<FitResult> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        try {
            out.push_back(fit(scales, rows[i], range));
        } catch (const Error& e) {
            throw Error(e.code(), std::string(what) + " fit at q = " + std::to_string(qs[i]) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace detail

/// tau(q): slope of ln chi(q,s) against ln s.
inline std::vector<FitResult> mass_exponents_direct(const PartitionFunction& chi, const ScaleGrid& grid) {
    return detail::fit_rows(chi.qs, chi.scales, chi.log_values, grid.fit_range(), "tau", log_ordinate_fit);
}

/// alpha(q): slope of A(q,s) against ln s.
inline std::vector<FitResult> alpha_direct(const CanonicalSums& sums, const ScaleGrid& grid) {
    return detail::fit_rows(sums.qs, sums.scales, sums.a, grid.fit_range(), "alpha", linear_ordinate_fit);
}

/// f(alpha(q)): slope of B(q,s) against ln s.
inline std::vector<FitResult> f_direct(const CanonicalSums& sums, const ScaleGrid& grid) {
    return detail::fit_rows(sums.qs, sums.scales, sums.b, grid.fit_range(), "f", linear_ordinate_fit);
}

/// Optional per-quantity ranges; unset members fall back to the grid's range.
struct DirectFitRanges {
    std::optional<FitRange> alpha;
    std::optional<FitRange> f;
};

/// Spectrum from the canonical quantities, identical for 1D and 2D apart from
/// the support dimension used to fill h(q) by back-derivation.
inline SpectrumResult direct_spectrum(const PartitionFunction& chi, const CanonicalSums& sums,
                                      const ScaleGrid& grid, int support_dimension,
                                      const DirectFitRanges& ranges = {}) {
    const auto tau_fits = mass_exponents_direct(chi, grid);
    const auto alpha_fits = alpha_direct(sums, ranges.alpha ? grid.with_fit_range(*ranges.alpha) : grid);
    const auto f_fits = f_direct(sums, ranges.f ? grid.with_fit_range(*ranges.f) : grid);

    std::vector<double> tau(tau_fits.size()), alpha(tau_fits.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        tau[i] = tau_fits[i].slope;
        alpha[i] = alpha_fits[i].slope;
    }
    const auto dq = generalized_dimensions(tau, chi.qs.values(), alpha);
    std::vector<double> h;
    if (chi.qs.size() >= 3) h = hurst_from_tau(tau, chi.qs, support_dimension);

    SpectrumResult out;
    out.support_dimension = support_dimension;
    out.rows.resize(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        auto& r = out.rows[i];
        r.q = chi.qs[i];
        r.tau = tau[i];
        if (!h.empty() && std::isfinite(h[i])) r.h = h[i];
        r.alpha = alpha[i];
        r.f_alpha = f_fits[i].slope;
        r.d_q = dq[i];
        r.tau_fit = tau_fits[i];
        r.alpha_fit = alpha_fits[i];
        r.f_fit = f_fits[i];
    }
    return out;
}

}  // namespace mfdma

#endif  // MFDMA_DIRECT_HPP
