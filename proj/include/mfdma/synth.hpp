#ifndef MFDMA_SYNTH_HPP
#define MFDMA_SYNTH_HPP

// Ground-truth signals with known scaling, and their closed-form exponents.

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mfdma/core.hpp"

namespace mfdma {

// ============================================================================
// Binomial and four-fold multiplicative cascades
// ============================================================================

struct PModel1DParams {
    double p1 = 0.3;
    int depth = 16;  ///< series length 2^depth

    double p2() const { return 1.0 - p1; }
};

struct PModel2DParams {
    std::array<double, 4> p{0.1, 0.2, 0.3, 0.4};  ///< NW, NE, SW, SE
    int depth = 9;                                 ///< surface 2^depth x 2^depth
};

struct FbmParams {
    double hurst = 0.7;
    std::size_t length = 65536;
    std::uint64_t seed = 1;
};

/// Deterministic binomial cascade of unit mass: the left child of every
/// interval receives the fraction p1, the right child p2.
inline Series1D pmodel_1d(const PModel1DParams& params) {
    if (!(params.p1 > 0.0 && params.p1 < 1.0)) throw Error(ErrorCode::InvalidArgument, "p1 must lie in (0,1)");
    if (params.depth < 1 || params.depth > 30) throw Error(ErrorCode::InvalidArgument, "depth must lie in [1,30]");
    std::vector<double> m{1.0};
    for (int k = 0; k < params.depth; ++k) {
        std::vector<double> next(m.size() * 2);
        for (std::size_t i = 0; i < m.size(); ++i) {
            next[2 * i] = m[i] * params.p1;
            next[2 * i + 1] = m[i] * params.p2();
        }
        m = std::move(next);
    }
    return Series1D(std::move(m));
}

/// Deterministic four-fold cascade of unit mass. Each square hands p[0] to
/// its north-west quarter, p[1] north-east, p[2] south-west, p[3] south-east;
/// row 0 is north.
inline Surface2D pmodel_2d(const PModel2DParams& params) {
    double total = 0.0;
    for (double p : params.p) {
        if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "cascade weights must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "cascade weights must sum to 1");
    if (params.depth < 1 || params.depth > 14) throw Error(ErrorCode::InvalidArgument, "depth must lie in [1,14]");

    std::size_t n = 1;
    std::vector<double> m{1.0};
    for (int k = 0; k < params.depth; ++k) {
        const std::size_t n2 = n * 2;
        std::vector<double> next(n2 * n2);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double v = m[i * n + j];
                next[(2 * i) * n2 + 2 * j] = v * params.p[0];
                next[(2 * i) * n2 + 2 * j + 1] = v * params.p[1];
                next[(2 * i + 1) * n2 + 2 * j] = v * params.p[2];
                next[(2 * i + 1) * n2 + 2 * j + 1] = v * params.p[3];
            }
        }
        m = std::move(next);
        n = n2;
    }
    return Surface2D(n, n, std::move(m));
}

// ============================================================================
// Fractional Gaussian noise
// ============================================================================

/// Autocovariance of unit-variance fractional Gaussian noise at integer lag k.
inline double fgn_autocovariance(double hurst, double lag) {
    const double two_h = 2.0 * hurst;
    const double k = std::abs(lag);
    return 0.5 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + std::pow(std::abs(k - 1.0), two_h));
}

namespace detail {

// In-place forward DFT of length n.
inline void dft_forward(std::vector<std::complex<double>>& data) {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

}  // namespace detail

/// Unit-variance fractional Gaussian noise of length N with Hurst index H,
/// i.e. the increments of fractional Brownian motion, by circulant embedding
/// of the exact autocovariance (Davies-Harte). Its cumulative profile is an
/// FBM path, so the estimators recover h close to H.
inline Series1D fbm(const FbmParams& params) {
    if (!(params.hurst > 0.0 && params.hurst < 1.0)) throw Error(ErrorCode::InvalidArgument, "H must lie in (0,1)");
    if (params.length < 2) throw Error(ErrorCode::InvalidArgument, "FBM length must be >= 2");
    const std::size_t n = params.length;
    const std::size_t m = 2 * n;

    std::vector<std::complex<double>> circ(m);
    for (std::size_t k = 0; k <= n; ++k) circ[k] = fgn_autocovariance(params.hurst, static_cast<double>(k));
    for (std::size_t k = n + 1; k < m; ++k) circ[k] = circ[m - k];
    detail::dft_forward(circ);

    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::complex<double>> w(m);
    for (std::size_t k = 0; k < m; ++k) {
        double lambda = circ[k].real();
        if (lambda < 0.0) {
            if (lambda < -1e-8) throw Error(ErrorCode::InvalidArgument, "circulant embedding is not positive");
            lambda = 0.0;
        }
        const double re = normal(rng);
        const double im = normal(rng);
        w[k] = std::sqrt(lambda / static_cast<double>(m)) * std::complex<double>(re, im);
    }
    detail::dft_forward(w);

    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = w[k].real();
    return Series1D(std::move(out));
}

// ============================================================================
// Closed-form exponents
// ============================================================================

inline double analytic_tau_1d(double p1, double q) {
    const double p2 = 1.0 - p1;
    return -std::log(std::pow(p1, q) + std::pow(p2, q)) / std::numbers::ln2;
}

inline double analytic_alpha_1d(double p1, double q) {
    const double p2 = 1.0 - p1;
    const double a = std::pow(p1, q), b = std::pow(p2, q);
    return -(a * std::log(p1) + b * std::log(p2)) / ((a + b) * std::numbers::ln2);
}

inline double analytic_tau_2d(const std::array<double, 4>& p, double q) {
    double sum = 0.0;
    for (double pi : p) sum += std::pow(pi, q);
    return -std::log(sum) / std::numbers::ln2;
}

/// Symmetric form sum_i p_i^q ln p_i over all four weights.
inline double analytic_alpha_2d(const std::array<double, 4>& p, double q) {
    double num = 0.0, den = 0.0;
    for (double pi : p) {
        const double w = std::pow(pi, q);
        num += w * std::log(pi);
        den += w;
    }
    return -num / (den * std::numbers::ln2);
}

struct AnalyticPoint {
    double q = 0.0;
    double tau = 0.0;
    double alpha = 0.0;
    double d_q = 0.0;
    double f_alpha = 0.0;
};

/// D_q and f(alpha) from closed-form tau and alpha; D_1 is the limit alpha(1).
template <class TauFn, class AlphaFn>
AnalyticPoint analytic_spectrum(TauFn tau_fn, AlphaFn alpha_fn, double q) {
    AnalyticPoint pt;
    pt.q = q;
    pt.tau = tau_fn(q);
    pt.alpha = alpha_fn(q);
    pt.d_q = is_zero_q(q - 1.0) ? pt.alpha : pt.tau / (q - 1.0);
    pt.f_alpha = q * pt.alpha - pt.tau;
    return pt;
}

/// Closed-form exponents of one of the two cascades.
class AnalyticOracle {
public:
    static AnalyticOracle binomial(double p1) {
        AnalyticOracle o;
        o.dimension_ = 1;
        o.p_ = {p1, 1.0 - p1, 0.0, 0.0};
        return o;
    }
    static AnalyticOracle fourfold(const std::array<double, 4>& p) {
        AnalyticOracle o;
        o.dimension_ = 2;
        o.p_ = p;
        return o;
    }

    int dimension() const noexcept { return dimension_; }
    const std::array<double, 4>& weights() const noexcept { return p_; }

    double tau(double q) const { return dimension_ == 1 ? analytic_tau_1d(p_[0], q) : analytic_tau_2d(p_, q); }
    double alpha(double q) const {
        return dimension_ == 1 ? analytic_alpha_1d(p_[0], q) : analytic_alpha_2d(p_, q);
    }
    AnalyticPoint at(double q) const {
        return analytic_spectrum([this](double x) { return tau(x); }, [this](double x) { return alpha(x); }, q);
    }

private:
    int dimension_ = 1;
    std::array<double, 4> p_{};
};

}  // namespace mfdma

#endif  // MFDMA_SYNTH_HPP
