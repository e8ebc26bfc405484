#ifndef MFDMA_REPORT_HPP
#define MFDMA_REPORT_HPP

// Tabular reports: per-q spectrum rows, per-(q,s) intermediates and
// deviations against an oracle. All CSV, one header line, shortest
// round-trip numbers.

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mfdma/analysis.hpp"
#include "mfdma/io.hpp"
#include "mfdma/synth.hpp"

namespace mfdma {

struct ReportRow {
    std::string approach;
    double q = 0.0;
    double h = std::numeric_limits<double>::quiet_NaN();  ///< NaN when not available
    double tau = 0.0;
    double d_q = 0.0;
    double alpha = 0.0;
    double f_alpha = 0.0;
    double r2_tau = 0.0;
    double r2_alpha = std::numeric_limits<double>::quiet_NaN();
    double r2_f = std::numeric_limits<double>::quiet_NaN();
    double legendre_residual = 0.0;
};

inline std::vector<ReportRow> report_rows(const AnalysisResult& result) {
    std::vector<ReportRow> out;
    auto add = [&](const char* name, const SpectrumResult& spec) {
        for (const auto& r : spec.rows) {
            ReportRow row;
            row.approach = name;
            row.q = r.q;
            if (r.h) row.h = *r.h;
            row.tau = r.tau;
            row.d_q = r.d_q;
            row.alpha = r.alpha;
            row.f_alpha = r.f_alpha;
            row.r2_tau = r.tau_fit.r_squared;
            if (r.alpha_fit) row.r2_alpha = r.alpha_fit->r_squared;
            if (r.f_fit) row.r2_f = r.f_fit->r_squared;
            row.legendre_residual = r.legendre_residual();
            out.push_back(row);
        }
    };
    if (result.traditional) add("traditional", *result.traditional);
    if (result.direct) add("direct", *result.direct);
    return out;
}

namespace detail {

inline std::string field(double x) { return std::isnan(x) ? std::string() : format_double(x); }

}  // namespace detail

/// Per-q table. With an oracle, appends the closed-form values and
/// delta_tau = tau - tau_analy, delta_alpha = alpha - alpha_analy.
inline void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows,
                             const AnalyticOracle* oracle = nullptr) {
    out << "approach,q,h,tau,D_q,alpha,f,r2_tau,r2_alpha,r2_f,legendre_residual";
    if (oracle) out << ",tau_analy,alpha_analy,f_analy,delta_tau,delta_alpha";
    out << '\n';
    for (const auto& r : rows) {
        out << r.approach << ',' << format_double(r.q) << ',' << detail::field(r.h) << ',' << format_double(r.tau)
            << ',' << format_double(r.d_q) << ',' << format_double(r.alpha) << ',' << format_double(r.f_alpha)
            << ',' << detail::field(r.r2_tau) << ',' << detail::field(r.r2_alpha) << ',' << detail::field(r.r2_f)
            << ',' << format_double(r.legendre_residual);
        if (oracle) {
            const auto a = oracle->at(r.q);
            out << ',' << format_double(a.tau) << ',' << format_double(a.alpha) << ','
                << format_double(a.f_alpha) << ',' << format_double(r.tau - a.tau) << ','
                << format_double(r.alpha - a.alpha);
        }
        out << '\n';
    }
}

/// Reads the columns written by write_report_csv; extra columns are ignored.
inline std::vector<ReportRow> parse_report_csv(std::istream& in, const std::string& source = "<report>") {
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> col;
    std::vector<ReportRow> rows;
    auto fail = [&](const std::string& why) {
        throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_commas(line);
        if (col.empty()) {
            for (std::size_t i = 0; i < fields.size(); ++i) col[std::string(fields[i])] = i;
            for (const char* need : {"approach", "q", "tau", "alpha"})
                if (!col.count(need)) fail(std::string("missing column '") + need + "'");
            continue;
        }
        auto number = [&](const char* name, double fallback) {
            const auto it = col.find(name);
            if (it == col.end() || it->second >= fields.size() || fields[it->second].empty()) return fallback;
            double v = 0.0;
            if (!parse_double(fields[it->second], v)) fail(std::string("bad value in column '") + name + "'");
            return v;
        };
        if (fields.size() != col.size()) fail("expected " + std::to_string(col.size()) + " fields");
        const double nan = std::numeric_limits<double>::quiet_NaN();
        ReportRow r;
        r.approach = std::string(fields[col["approach"]]);
        r.q = number("q", nan);
        r.tau = number("tau", nan);
        r.alpha = number("alpha", nan);
        if (std::isnan(r.q) || std::isnan(r.tau) || std::isnan(r.alpha)) fail("q, tau and alpha are required");
        r.h = number("h", nan);
        r.d_q = number("D_q", nan);
        r.f_alpha = number("f", nan);
        r.r2_tau = number("r2_tau", nan);
        r.r2_alpha = number("r2_alpha", nan);
        r.r2_f = number("r2_f", nan);
        r.legendre_residual = number("legendre_residual", nan);
        rows.push_back(std::move(r));
    }
    if (col.empty()) throw Error(ErrorCode::ParseError, source + ": empty report");
    return rows;
}

inline std::vector<ReportRow> read_report_csv(const std::string& path) {
    auto in = detail::open_in(path);
    return parse_report_csv(in, path);
}

/// Per-(q,s) intermediates shared by both estimators.
inline void write_intermediates_csv(std::ostream& out, const MomentTable& t) {
    out << "q,s,segments,ln_F,ln_chi,A,B\n";
    for (std::size_t i = 0; i < t.qs.size(); ++i) {
        for (std::size_t s = 0; s < t.scales.size(); ++s) {
            out << format_double(t.qs[i]) << ',' << t.scales[s] << ',' << t.segments[s] << ','
                << format_double(t.fluctuation.log_values[i][s]) << ','
                << format_double(t.partition.log_values[i][s]) << ',' << format_double(t.sums.a[i][s]) << ','
                << format_double(t.sums.b[i][s]) << '\n';
        }
    }
}

struct Deviation {
    std::string approach;
    double q = 0.0;
    double tau = 0.0;
    double tau_ref = 0.0;
    double alpha = 0.0;
    double alpha_ref = 0.0;

    double delta_tau() const { return tau - tau_ref; }
    double delta_alpha() const { return alpha - alpha_ref; }
};

inline std::vector<Deviation> compare_to_oracle(const std::vector<ReportRow>& rows, const AnalyticOracle& oracle) {
    std::vector<Deviation> out;
    for (const auto& r : rows) {
        const auto a = oracle.at(r.q);
        out.push_back({r.approach, r.q, r.tau, a.tau, r.alpha, a.alpha});
    }
    return out;
}

/// Row-by-row comparison with another report. Both must list the same
/// approaches on the same q grid.
inline std::vector<Deviation> compare_to_reference(const std::vector<ReportRow>& rows,
                                                   const std::vector<ReportRow>& reference) {
    std::map<std::string, std::vector<const ReportRow*>> ref_by, got_by;
    for (const auto& r : reference) ref_by[r.approach].push_back(&r);
    for (const auto& r : rows) got_by[r.approach].push_back(&r);
    std::vector<Deviation> out;
    for (const auto& [name, got] : got_by) {
        const auto it = ref_by.find(name);
        if (it == ref_by.end())
            throw Error(ErrorCode::MismatchedGrid, "reference has no rows for approach '" + name + "'");
        const auto& ref = it->second;
        if (ref.size() != got.size())
            throw Error(ErrorCode::MismatchedGrid, "q grids differ in length for approach '" + name + "' (" +
                                                       std::to_string(got.size()) + " vs " +
                                                       std::to_string(ref.size()) + ")");
        for (std::size_t i = 0; i < got.size(); ++i) {
            if (std::abs(got[i]->q - ref[i]->q) > kQEps)
                throw Error(ErrorCode::MismatchedGrid, "q grids differ for approach '" + name + "' at row " +
                                                           std::to_string(i + 1) + " (q = " +
                                                           format_double(got[i]->q) + " vs " +
                                                           format_double(ref[i]->q) + ")");
            out.push_back({name, got[i]->q, got[i]->tau, ref[i]->tau, got[i]->alpha, ref[i]->alpha});
        }
    }
    return out;
}

inline double max_abs_delta_tau(const std::vector<Deviation>& devs) {
    double worst = 0.0;
    for (const auto& d : devs) worst = std::max(worst, std::abs(d.delta_tau()));
    return worst;
}

inline void write_deviations_csv(std::ostream& out, const std::vector<Deviation>& devs) {
    out << "approach,q,tau,tau_ref,delta_tau,alpha,alpha_ref,delta_alpha\n";
    for (const auto& d : devs) {
        out << d.approach << ',' << format_double(d.q) << ',' << format_double(d.tau) << ','
            << format_double(d.tau_ref) << ',' << format_double(d.delta_tau()) << ',' << format_double(d.alpha)
            << ',' << format_double(d.alpha_ref) << ',' << format_double(d.delta_alpha()) << '\n';
    }
}

}  // namespace mfdma

#endif  // MFDMA_REPORT_HPP
