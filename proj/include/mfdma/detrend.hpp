#ifndef MFDMA_DETREND_HPP
#define MFDMA_DETREND_HPP

// Moving-average detrending of cumulative profiles and per-segment RMS
// fluctuations, in one and two dimensions.
//
// Index conventions follow the 1-based formulas: for window size s and
// position theta, the moving average at t averages y(t - past) .. y(t + ahead)
// with ahead = floor((s-1) theta) and past = s - 1 - ahead, and is defined for
// s - ahead <= t <= N - ahead. Storage is 0-based throughout.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mfdma/core.hpp"

namespace mfdma {

/// Number of future points in a window of size s at position theta.
/// Near-integer products are snapped so that theta = 0.3, s = 11 gives 3.
inline std::size_t window_ahead(int s, double theta) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(s - 1) * theta + 1e-9));
}

inline std::size_t window_past(int s, double theta) {
    return static_cast<std::size_t>(s - 1) - window_ahead(s, theta);
}

struct Residuals1D {
    std::size_t series_length = 0;  ///< N
    int scale = 0;                  ///< s
    std::size_t first_index = 0;    ///< 1-based i_lo = s - floor((s-1) theta)
    std::vector<double> values;     ///< epsilon(i_lo) .. epsilon(i_hi)

    std::size_t last_index() const { return first_index + values.size() - 1; }
};

/// Values on the valid index window [first_index, first_index + size).
struct Window1D {
    std::size_t first_index = 0;  ///< 1-based
    std::vector<double> values;
};

/// Row-major window of a 2D array starting at (first_row, first_col), 1-based.
struct Window2D {
    std::size_t first_row = 0;
    std::size_t first_col = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct Residuals2D {
    std::size_t series_rows = 0;  ///< N1
    std::size_t series_cols = 0;  ///< N2
    int scale1 = 0;
    int scale2 = 0;
    ThetaPosition theta;
    Window2D window;
};

/// F_v(s) for one scale. 1D results have cols == 1.
struct LocalFluctuations {
    int scale = 0;
    std::size_t rows = 0;  ///< N_s, or N_{s1} in 2D
    std::size_t cols = 1;  ///< 1, or N_{s2} in 2D
    std::vector<double> values;

    std::size_t segments() const noexcept { return values.size(); }
};

// ============================================================================
// 1D
// ============================================================================

inline Profile1D cumulative_profile(const Series1D& series) {
    std::vector<double> y(series.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        acc += series[i];
        y[i] = acc;
    }
    return Profile1D(std::move(y));
}

namespace detail {

inline void check_window(int s, std::size_t n) {
    if (s < 2) throw Error(ErrorCode::InvalidArgument, "window size must be >= 2");
    if (static_cast<std::size_t>(s) > n)
        throw Error(ErrorCode::ScaleTooLarge,
                    "window size " + std::to_string(s) + " exceeds length " + std::to_string(n));
}

inline void check_theta(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "theta must lie in [0,1]");
}

// prefix[j] = sum of the first j values, accumulated in extended precision so
// window sums of O(1) profiles keep ~1e-18 relative accuracy.
inline std::vector<long double> prefix_sums(std::span<const double> xs) {
    std::vector<long double> p(xs.size() + 1, 0.0L);
    for (std::size_t i = 0; i < xs.size(); ++i) p[i + 1] = p[i] + xs[i];
    return p;
}

}  // namespace detail

/// Caches the profile and its prefix sums so many scales can be detrended
/// in O(N) each.
class Detrender1D {
public:
    explicit Detrender1D(Profile1D profile)
        : profile_(std::move(profile)), prefix_(detail::prefix_sums(profile_.values())) {}

    const Profile1D& profile() const noexcept { return profile_; }

    Window1D moving_average(int s, double theta) const {
        const std::size_t n = profile_.size();
        detail::check_window(s, n);
        detail::check_theta(theta);
        const std::size_t ahead = window_ahead(s, theta);
        const std::size_t past = window_past(s, theta);
        Window1D out;
        out.first_index = static_cast<std::size_t>(s) - ahead;
        const std::size_t last = n - ahead;
        out.values.resize(last - out.first_index + 1);
        const long double inv = 1.0L / s;
        for (std::size_t t = out.first_index; t <= last; ++t) {
            // y(t - past) .. y(t + ahead), 1-based
            out.values[t - out.first_index] =
                static_cast<double>((prefix_[t + ahead] - prefix_[t - past - 1]) * inv);
        }
        return out;
    }

    Residuals1D residuals(int s, double theta) const {
        Window1D avg = moving_average(s, theta);
        Residuals1D r;
        r.series_length = profile_.size();
        r.scale = s;
        r.first_index = avg.first_index;
        r.values = std::move(avg.values);
        for (std::size_t k = 0; k < r.values.size(); ++k)
            r.values[k] = profile_[r.first_index - 1 + k] - r.values[k];
        return r;
    }

private:
    Profile1D profile_;
    std::vector<long double> prefix_;
};

inline Window1D moving_average(const Profile1D& profile, int s, double theta) {
    return Detrender1D(profile).moving_average(s, theta);
}

inline Residuals1D residuals(const Profile1D& profile, int s, double theta) {
    return Detrender1D(profile).residuals(s, theta);
}

/// RMS over `count` consecutive disjoint blocks of length s, starting at the
/// first residual. Leftover tail values are ignored.
inline std::vector<double> segment_rms(std::span<const double> residuals, int s, std::size_t count) {
    if (s < 1) throw Error(ErrorCode::InvalidArgument, "segment size must be positive");
    const auto len = static_cast<std::size_t>(s);
    if (count * len > residuals.size())
        throw Error(ErrorCode::InsufficientData, "residual window too short for requested segments");
    std::vector<double> f(count);
    for (std::size_t v = 0; v < count; ++v) {
        double acc = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            const double e = residuals[v * len + i];
            acc += e * e;
        }
        f[v] = std::sqrt(acc / static_cast<double>(len));
    }
    return f;
}

/// N_s = floor(N/s - 1) segments of the residual window.
inline std::size_t segment_count_1d(std::size_t n, int s) {
    const std::size_t whole = n / static_cast<std::size_t>(s);
    return whole >= 1 ? whole - 1 : 0;
}

inline LocalFluctuations segment_rms(const Residuals1D& residuals) {
    const std::size_t count = segment_count_1d(residuals.series_length, residuals.scale);
    if (count < 2)
        throw Error(ErrorCode::InsufficientData, "scale " + std::to_string(residuals.scale) + " leaves " +
                                                     std::to_string(count) + " segments, need >= 2");
    LocalFluctuations lf;
    lf.scale = residuals.scale;
    lf.rows = count;
    lf.cols = 1;
    lf.values = segment_rms(residuals.values, residuals.scale, count);
    return lf;
}

// ============================================================================
// 2D
// ============================================================================

inline Surface2D cumulative_profile_2d(const Surface2D& surface) {
    const std::size_t n1 = surface.rows(), n2 = surface.cols();
    Surface2D y(n1, n2);
    for (std::size_t i = 0; i < n1; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            row += surface(i, j);
            y(i, j) = row + (i > 0 ? y(i - 1, j) : 0.0);
        }
    }
    return y;
}

/// N_{s} = floor((N - s(1 + theta)) / s), clamped at zero.
inline std::size_t segment_count_2d(std::size_t n, int s, double theta) {
    const double raw = (static_cast<double>(n) - s * (1.0 + theta)) / s;
    if (raw < 0.0) return 0;
    return static_cast<std::size_t>(std::floor(raw + 1e-9));
}

/// Caches a 2D profile with its directional prefix sums and summed-area table.
///
/// The residual removes the window average along each axis separately and
/// adds back the box average:
///
///     eps = y - A1 y - A2 y + A12 y
///
/// where A1, A2 average over the row and column windows and A12 over the
/// s1 x s2 box. This is the tensor product of the 1D operator (I - A), so a
/// residual is a weighted sum of rectangle masses inside the window, exactly
/// as the 1D residual is a weighted sum of interval masses. The box-only
/// residual y - A12 y would instead be dominated by masses of strips that
/// span the whole surface.
class Detrender2D {
public:
    explicit Detrender2D(Surface2D profile) : profile_(std::move(profile)) {
        const std::size_t n1 = profile_.rows(), n2 = profile_.cols();
        down_.assign((n1 + 1) * n2, 0.0L);
        across_.assign(n1 * (n2 + 1), 0.0L);
        area_.assign((n1 + 1) * (n2 + 1), 0.0L);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) down_[(i + 1) * n2 + j] = down_[i * n2 + j] + profile_(i, j);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j)
                across_[i * (n2 + 1) + j + 1] = across_[i * (n2 + 1) + j] + profile_(i, j);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j)
                area_[(i + 1) * (n2 + 1) + j + 1] = area_[i * (n2 + 1) + j + 1] +
                                                    across_[i * (n2 + 1) + j + 1];
    }

    const Surface2D& profile() const noexcept { return profile_; }

    /// Box average over s1 x s2 on the valid window.
    Window2D moving_average(int s1, int s2, const ThetaPosition& theta) const {
        const Bounds b = bounds(s1, s2, theta);
        const std::size_t n2 = profile_.cols();
        Window2D out{b.r0, b.c0, b.rows, b.cols, std::vector<double>(b.rows * b.cols)};
        const long double inv = 1.0L / (static_cast<long double>(s1) * s2);
        for (std::size_t a = 0; a < b.rows; ++a) {
            const std::size_t hi1 = b.r0 + a + b.ahead1, lo1 = b.r0 + a - b.past1 - 1;
            for (std::size_t c = 0; c < b.cols; ++c) {
                const std::size_t hi2 = b.c0 + c + b.ahead2, lo2 = b.c0 + c - b.past2 - 1;
                const long double box = area_[hi1 * (n2 + 1) + hi2] - area_[lo1 * (n2 + 1) + hi2] -
                                        area_[hi1 * (n2 + 1) + lo2] + area_[lo1 * (n2 + 1) + lo2];
                out.values[a * b.cols + c] = static_cast<double>(box * inv);
            }
        }
        return out;
    }

    Residuals2D residuals(int s1, int s2, const ThetaPosition& theta) const {
        const Bounds b = bounds(s1, s2, theta);
        const std::size_t n2 = profile_.cols();
        Window2D box = moving_average(s1, s2, theta);
        const long double inv1 = 1.0L / s1, inv2 = 1.0L / s2;
        for (std::size_t a = 0; a < b.rows; ++a) {
            const std::size_t t1 = b.r0 + a;  // 1-based
            const std::size_t hi1 = t1 + b.ahead1, lo1 = t1 - b.past1 - 1;
            for (std::size_t c = 0; c < b.cols; ++c) {
                const std::size_t t2 = b.c0 + c;
                const std::size_t hi2 = t2 + b.ahead2, lo2 = t2 - b.past2 - 1;
                const long double along1 = (down_[hi1 * n2 + (t2 - 1)] - down_[lo1 * n2 + (t2 - 1)]) * inv1;
                const long double along2 =
                    (across_[(t1 - 1) * (n2 + 1) + hi2] - across_[(t1 - 1) * (n2 + 1) + lo2]) * inv2;
                double& cell = box.values[a * b.cols + c];
                cell = static_cast<double>(static_cast<long double>(profile_(t1 - 1, t2 - 1)) - along1 - along2 +
                                           static_cast<long double>(cell));
            }
        }
        Residuals2D r;
        r.series_rows = profile_.rows();
        r.series_cols = profile_.cols();
        r.scale1 = s1;
        r.scale2 = s2;
        r.theta = theta;
        r.window = std::move(box);
        return r;
    }

private:
    struct Bounds {
        std::size_t ahead1, past1, ahead2, past2;
        std::size_t r0, c0, rows, cols;
    };

    Bounds bounds(int s1, int s2, const ThetaPosition& theta) const {
        theta.validate();
        detail::check_window(s1, profile_.rows());
        detail::check_window(s2, profile_.cols());
        Bounds b{};
        b.ahead1 = window_ahead(s1, theta.theta1);
        b.past1 = window_past(s1, theta.theta1);
        b.ahead2 = window_ahead(s2, theta.theta2);
        b.past2 = window_past(s2, theta.theta2);
        b.r0 = static_cast<std::size_t>(s1) - b.ahead1;
        b.c0 = static_cast<std::size_t>(s2) - b.ahead2;
        b.rows = profile_.rows() - static_cast<std::size_t>(s1) + 1;
        b.cols = profile_.cols() - static_cast<std::size_t>(s2) + 1;
        return b;
    }

    Surface2D profile_;
    std::vector<long double> down_;    // (N1+1) x N2, prefix along rows
    std::vector<long double> across_;  // N1 x (N2+1), prefix along columns
    std::vector<long double> area_;    // (N1+1) x (N2+1) summed-area table
};

inline Window2D moving_average_2d(const Surface2D& profile, int s1, int s2, const ThetaPosition& theta) {
    return Detrender2D(profile).moving_average(s1, s2, theta);
}

inline Residuals2D residuals_2d(const Surface2D& profile, int s1, int s2, const ThetaPosition& theta) {
    return Detrender2D(profile).residuals(s1, s2, theta);
}

/// RMS over rows x cols disjoint s1 x s2 blocks anchored at the window origin.
inline std::vector<double> segment_rms_2d(const Window2D& residuals, int s1, int s2, std::size_t rows,
                                          std::size_t cols) {
    const auto l1 = static_cast<std::size_t>(s1), l2 = static_cast<std::size_t>(s2);
    if (rows * l1 > residuals.rows || cols * l2 > residuals.cols)
        throw Error(ErrorCode::InsufficientData, "residual window too small for requested segments");
    std::vector<double> f(rows * cols);
    const double norm = static_cast<double>(l1 * l2);
    for (std::size_t v1 = 0; v1 < rows; ++v1) {
        for (std::size_t v2 = 0; v2 < cols; ++v2) {
            double acc = 0.0;
            for (std::size_t i = 0; i < l1; ++i) {
                const double* row = &residuals.values[(v1 * l1 + i) * residuals.cols + v2 * l2];
                for (std::size_t j = 0; j < l2; ++j) acc += row[j] * row[j];
            }
            f[v1 * cols + v2] = std::sqrt(acc / norm);
        }
    }
    return f;
}

inline LocalFluctuations segment_rms_2d(const Residuals2D& residuals) {
    const std::size_t rows = segment_count_2d(residuals.series_rows, residuals.scale1, residuals.theta.theta1);
    const std::size_t cols = segment_count_2d(residuals.series_cols, residuals.scale2, residuals.theta.theta2);
    if (rows < 1 || cols < 1 || rows * cols < 4)
        throw Error(ErrorCode::InsufficientData, "scale " + std::to_string(residuals.scale1) + " leaves " +
                                                     std::to_string(rows) + "x" + std::to_string(cols) +
                                                     " segments, need >= 4");
    LocalFluctuations lf;
    lf.scale = residuals.scale1;
    lf.rows = rows;
    lf.cols = cols;
    lf.values = segment_rms_2d(residuals.window, residuals.scale1, residuals.scale2, rows, cols);
    return lf;
}

}  // namespace mfdma

#endif  // MFDMA_DETREND_HPP
