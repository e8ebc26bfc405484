#ifndef MFDMA_CORE_HPP
#define MFDMA_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mfdma {

// ============================================================================
// Errors
// ============================================================================

enum class ErrorCode {
    InvalidArgument,
    NonPositiveValue,
    InsufficientPoints,
    ScaleTooLarge,
    InsufficientData,
    ZeroFluctuation,
    GridTooSparse,
    NonPositivePrice,
    UnsortedTimestamps,
    ParseError,
    MismatchedGrid,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::ScaleTooLarge: return "ScaleTooLarge";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ZeroFluctuation: return "ZeroFluctuation";
    case ErrorCode::GridTooSparse: return "GridTooSparse";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::UnsortedTimestamps: return "UnsortedTimestamps";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MismatchedGrid: return "MismatchedGrid";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// |q| below this is treated as q = 0 and routed to the logarithmic limits.
inline constexpr double kQEps = 1e-9;

inline bool is_zero_q(double q) { return std::abs(q) < kQEps; }

// ============================================================================
// Summation
// ============================================================================

/// Pairwise summation with a fixed split order, so a given input always
/// reduces identically regardless of how callers schedule the work.
inline double pairwise_sum(std::span<const double> xs) {
    constexpr std::size_t kBlock = 16;
    if (xs.size() <= kBlock) {
        double acc = 0.0;
        for (double x : xs) acc += x;
        return acc;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// ============================================================================
// Signals
// ============================================================================

class Series1D {
public:
    Series1D() = default;
    explicit Series1D(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw Error(ErrorCode::InvalidArgument, "series is empty");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i]))
                throw Error(ErrorCode::InvalidArgument,
                            "series value at index " + std::to_string(i) + " is not finite");
        }
    }

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<double> values_;
};

/// Cumulative profile y(t), stored 0-based: values()[t-1] == y(t).
class Profile1D {
public:
    Profile1D() = default;
    explicit Profile1D(std::vector<double> values) : values_(std::move(values)) {}

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<double> values_;
};

/// Row-major dense matrix of reals. Used for surfaces X(i1,i2) and their profiles.
class Surface2D {
public:
    Surface2D() = default;
    Surface2D(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (rows_ == 0 || cols_ == 0) throw Error(ErrorCode::InvalidArgument, "surface has a zero dimension");
        if (data_.size() != rows_ * cols_)
            throw Error(ErrorCode::InvalidArgument, "surface data size does not match dimensions");
        for (double v : data_)
            if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "surface entry is not finite");
    }
    Surface2D(std::size_t rows, std::size_t cols, double fill = 0.0)
        : Surface2D(rows, cols, std::vector<double>(rows * cols, fill)) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// ============================================================================
// Configuration grids
// ============================================================================

/// Position of the moving-average window: 0 backward, 0.5 centred, 1 forward.
struct ThetaPosition {
    double theta1 = 0.0;
    double theta2 = 0.0;

    static ThetaPosition isotropic(double theta) {
        ThetaPosition t{theta, theta};
        t.validate();
        return t;
    }
    static ThetaPosition backward() { return {0.0, 0.0}; }
    static ThetaPosition centered() { return {0.5, 0.5}; }
    static ThetaPosition forward() { return {1.0, 1.0}; }

    /// Accepts `backward|centered|forward` or a number in [0,1].
    static ThetaPosition parse(const std::string& text) {
        if (text == "backward") return backward();
        if (text == "centered" || text == "centred") return centered();
        if (text == "forward") return forward();
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size())
            throw Error(ErrorCode::InvalidArgument, "cannot parse theta '" + text + "'");
        return isotropic(value);
    }

    void validate() const {
        for (double t : {theta1, theta2})
            if (!(t >= 0.0 && t <= 1.0))
                throw Error(ErrorCode::InvalidArgument, "theta must lie in [0,1]");
    }
};

/// Inclusive scale interval used by the regressions.
struct FitRange {
    int min_scale = 0;
    int max_scale = 0;

    bool contains(int s) const noexcept { return s >= min_scale && s <= max_scale; }
};

class ScaleGrid {
public:
    ScaleGrid() = default;
    explicit ScaleGrid(std::vector<int> scales) : ScaleGrid(scales, FitRange{scales.empty() ? 0 : scales.front(), scales.empty() ? 0 : scales.back()}) {}

    ScaleGrid(std::vector<int> scales, FitRange fit) : scales_(std::move(scales)), fit_(fit) {
        if (scales_.empty()) throw Error(ErrorCode::InvalidArgument, "scale grid is empty");
        for (std::size_t i = 0; i < scales_.size(); ++i) {
            if (scales_[i] < 3) throw Error(ErrorCode::InvalidArgument, "scales must be >= 3");
            if (i > 0 && scales_[i] <= scales_[i - 1])
                throw Error(ErrorCode::InvalidArgument, "scales must be strictly increasing");
        }
        if (fit_.min_scale > fit_.max_scale)
            throw Error(ErrorCode::InvalidArgument, "fit range is inverted");
        if (fit_scales().size() < 5)
            throw Error(ErrorCode::InsufficientPoints, "fit range must contain at least 5 scales");
    }

    /// About `count` integer scales spaced evenly in ln s over [min_scale, max_scale].
    static ScaleGrid log_spaced(int min_scale, int max_scale, int count) {
        if (min_scale < 3 || max_scale <= min_scale || count < 2)
            throw Error(ErrorCode::InvalidArgument, "bad log-spaced scale grid request");
        std::vector<int> scales;
        const double lo = std::log(static_cast<double>(min_scale));
        const double hi = std::log(static_cast<double>(max_scale));
        for (int i = 0; i < count; ++i) {
            const double t = lo + (hi - lo) * i / (count - 1);
            const int s = static_cast<int>(std::lround(std::exp(t)));
            if (scales.empty() || s > scales.back()) scales.push_back(s);
        }
        return ScaleGrid(std::move(scales));
    }

    /// Powers of two: min_scale * 2^k <= max_scale.
    static ScaleGrid dyadic(int min_scale, int max_scale) {
        if (min_scale < 3) throw Error(ErrorCode::InvalidArgument, "dyadic grid must start at >= 3");
        std::vector<int> scales;
        for (long s = min_scale; s <= max_scale; s *= 2) scales.push_back(static_cast<int>(s));
        return ScaleGrid(std::move(scales));
    }

    /// ~30 log-spaced scales from 10 to N/10.
    static ScaleGrid default_1d(std::size_t length) {
        return log_spaced(10, static_cast<int>(length / 10), 30);
    }

    /// ~30 log-spaced scales from 10 to min(N1,N2)/8.
    static ScaleGrid default_2d(std::size_t rows, std::size_t cols) {
        return log_spaced(10, static_cast<int>(std::min(rows, cols) / 8), 30);
    }

    ScaleGrid with_fit_range(FitRange fit) const { return ScaleGrid(scales_, fit); }

    std::span<const int> scales() const noexcept { return scales_; }
    const FitRange& fit_range() const noexcept { return fit_; }
    int max_scale() const noexcept { return scales_.back(); }

    std::vector<int> fit_scales() const {
        std::vector<int> out;
        for (int s : scales_)
            if (fit_.contains(s)) out.push_back(s);
        return out;
    }

    /// Needs N >= 4 max(s), which leaves at least N_s = floor(N/s - 1) >= 3 segments.
    void validate_for_length(std::size_t n) const {
        if (n < 4 * static_cast<std::size_t>(max_scale()))
            throw Error(ErrorCode::ScaleTooLarge, "series length " + std::to_string(n) +
                                                      " is shorter than 4x the largest scale " +
                                                      std::to_string(max_scale()));
    }

private:
    std::vector<int> scales_;
    FitRange fit_;
};

class QGrid {
public:
    QGrid() = default;
    explicit QGrid(std::vector<double> qs) : qs_(std::move(qs)) {
        if (qs_.empty()) throw Error(ErrorCode::InvalidArgument, "q grid is empty");
        for (std::size_t i = 0; i < qs_.size(); ++i) {
            if (!std::isfinite(qs_[i])) throw Error(ErrorCode::InvalidArgument, "q must be finite");
            if (i > 0 && !(qs_[i] > qs_[i - 1] + kQEps))
                throw Error(ErrorCode::InvalidArgument, "q grid must be strictly increasing without duplicates");
            if (is_zero_q(qs_[i])) qs_[i] = 0.0;
        }
    }

    /// q_min, q_min + step, ... up to q_max (inclusive within half a step).
    static QGrid range(double q_min, double q_max, double step) {
        if (!(step > 0.0) || q_max < q_min) throw Error(ErrorCode::InvalidArgument, "bad q range");
        std::vector<double> qs;
        const auto count = static_cast<long>(std::floor((q_max - q_min) / step + 0.5));
        for (long i = 0; i <= count; ++i) qs.push_back(q_min + static_cast<double>(i) * step);
        return QGrid(std::move(qs));
    }

    static QGrid default_grid() { return range(-5.0, 5.0, 0.25); }

    std::span<const double> values() const noexcept { return qs_; }
    std::size_t size() const noexcept { return qs_.size(); }
    double operator[](std::size_t i) const { return qs_[i]; }
    bool is_zero(std::size_t i) const { return is_zero_q(qs_[i]); }

    std::optional<std::size_t> index_of(double q, double tol = 1e-9) const {
        for (std::size_t i = 0; i < qs_.size(); ++i)
            if (std::abs(qs_[i] - q) <= tol) return i;
        return std::nullopt;
    }

private:
    std::vector<double> qs_;
};

// ============================================================================
// Regression
// ============================================================================

enum class AbscissaKind { LogScale };
enum class OrdinateKind { LogValue, LinearValue };

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
    AbscissaKind abscissa_kind = AbscissaKind::LogScale;
    OrdinateKind ordinate_kind = OrdinateKind::LogValue;
};

struct ScalePoint {
    int scale = 0;
    double value = 0.0;
};

namespace detail {

// Ordinary least squares of ys on xs. r_squared is 1 for a perfect fit and
// for a constant ordinate (the line through the points is exact).
inline FitResult ols(std::span<const double> xs, std::span<const double> ys, OrdinateKind kind) {
    const std::size_t n = xs.size();
    if (n < 3) throw Error(ErrorCode::InsufficientPoints, "need at least 3 points, got " + std::to_string(n));
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientPoints, "abscissae are all equal");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        sse += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    fit.n_points = n;
    fit.ordinate_kind = kind;
    return fit;
}

}  // namespace detail

/// OLS of ln(value) against ln(s) over points inside `range`.
inline FitResult loglog_fit(std::span<const ScalePoint> points, FitRange range) {
    std::vector<double> xs, ys;
    for (const auto& p : points) {
        if (!range.contains(p.scale)) continue;
        if (!(p.value > 0.0))
            throw Error(ErrorCode::NonPositiveValue, "non-positive value at scale " + std::to_string(p.scale));
        xs.push_back(std::log(static_cast<double>(p.scale)));
        ys.push_back(std::log(p.value));
    }
    return detail::ols(xs, ys, OrdinateKind::LogValue);
}

/// OLS of value against ln(s) over points inside `range`.
inline FitResult semilog_fit(std::span<const ScalePoint> points, FitRange range) {
    std::vector<double> xs, ys;
    for (const auto& p : points) {
        if (!range.contains(p.scale)) continue;
        xs.push_back(std::log(static_cast<double>(p.scale)));
        ys.push_back(p.value);
    }
    return detail::ols(xs, ys, OrdinateKind::LinearValue);
}

/// Regression of an ordinate already in log form (ln chi, ln F) against ln s.
/// Same line as loglog_fit on exp(value) but never leaves log space.
inline FitResult log_ordinate_fit(std::span<const int> scales, std::span<const double> log_values, FitRange range) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!range.contains(scales[i])) continue;
        if (!std::isfinite(log_values[i]))
            throw Error(ErrorCode::NonPositiveValue, "non-finite log ordinate at scale " + std::to_string(scales[i]));
        xs.push_back(std::log(static_cast<double>(scales[i])));
        ys.push_back(log_values[i]);
    }
    return detail::ols(xs, ys, OrdinateKind::LogValue);
}

inline FitResult linear_ordinate_fit(std::span<const int> scales, std::span<const double> values, FitRange range) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!range.contains(scales[i])) continue;
        xs.push_back(std::log(static_cast<double>(scales[i])));
        ys.push_back(values[i]);
    }
    return detail::ols(xs, ys, OrdinateKind::LinearValue);
}

// ============================================================================
// Results
// ============================================================================

struct SpectrumRow {
    double q = 0.0;
    double tau = 0.0;
    std::optional<double> h;  ///< absent for the direct approach unless back-derived
    double alpha = 0.0;
    double f_alpha = 0.0;
    double d_q = 0.0;

    FitResult tau_fit;                 ///< fit of ln chi (direct) or ln F (traditional, slope h)
    std::optional<FitResult> alpha_fit;  ///< direct approach only
    std::optional<FitResult> f_fit;      ///< direct approach only

    double legendre_residual() const { return std::abs(q * alpha - tau - f_alpha); }
};

struct SpectrumResult {
    int support_dimension = 1;  ///< D_f
    std::vector<SpectrumRow> rows;

    double alpha_width() const {
        if (rows.empty()) return 0.0;
        auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                            [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
        return hi->alpha - lo->alpha;
    }
    double max_legendre_residual() const {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, r.legendre_residual());
        return m;
    }
};

}  // namespace mfdma

#endif  // MFDMA_CORE_HPP
