// mfdma: generate test signals, run MF-DMA, compare against closed forms.
//
// Exit codes: 0 success, 1 unexpected failure, 2 invalid input or arguments,
// 3 a compare deviation above --tol.

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mfdma/mfdma.hpp"

namespace {

using nlohmann::ordered_json;
using namespace mfdma;

constexpr int kExitValidation = 2;
constexpr int kExitTolerance = 3;

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    for (auto f : split_commas(text)) {
        double v = 0.0;
        if (!parse_double(f, v)) throw Error(ErrorCode::InvalidArgument, std::string("bad ") + what + " '" + text + "'");
        out.push_back(v);
    }
    return out;
}

int parse_int(std::string_view s, const std::string& whole) {
    double v = 0.0;
    if (!parse_double(s, v) || v != std::floor(v))
        throw Error(ErrorCode::InvalidArgument, "bad scale specification '" + whole + "'");
    return static_cast<int>(v);
}

// "log:MIN:MAX:COUNT", "dyadic:MIN:MAX" or an explicit "s1,s2,...".
std::vector<int> parse_scales(const std::string& text) {
    std::vector<std::string_view> parts;
    std::string_view rest = text;
    while (true) {
        const auto colon = rest.find(':');
        parts.push_back(rest.substr(0, colon));
        if (colon == std::string_view::npos) break;
        rest.remove_prefix(colon + 1);
    }
    if (parts[0] == "log") {
        if (parts.size() != 4) throw Error(ErrorCode::InvalidArgument, "expected log:MIN:MAX:COUNT");
        const auto g = ScaleGrid::log_spaced(parse_int(parts[1], text), parse_int(parts[2], text),
                                             parse_int(parts[3], text));
        return {g.scales().begin(), g.scales().end()};
    }
    if (parts[0] == "dyadic") {
        if (parts.size() != 3) throw Error(ErrorCode::InvalidArgument, "expected dyadic:MIN:MAX");
        const auto g = ScaleGrid::dyadic(parse_int(parts[1], text), parse_int(parts[2], text));
        return {g.scales().begin(), g.scales().end()};
    }
    if (parts.size() != 1) throw Error(ErrorCode::InvalidArgument, "bad scale specification '" + text + "'");
    std::vector<int> out;
    for (auto f : split_commas(text)) out.push_back(parse_int(f, text));
    return out;
}

FitRange parse_fit_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "expected --fit-range MIN:MAX");
    return FitRange{parse_int(std::string_view(text).substr(0, colon), text),
                    parse_int(std::string_view(text).substr(colon + 1), text)};
}

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
    return out;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    auto out = open_or_throw(path);
    out << text;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

ordered_json number_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

// ----------------------------------------------------------------------------

struct GridOptions {
    double q_min = -5.0, q_max = 5.0, q_step = 0.25;
    std::string scales, fit_range, theta = "backward";
    std::string approach = "both";

    void attach(CLI::App& cmd) {
        cmd.add_option("--theta", theta, "backward|centered|forward or a number in [0,1]")->capture_default_str();
        cmd.add_option("--q-min", q_min)->capture_default_str();
        cmd.add_option("--q-max", q_max)->capture_default_str();
        cmd.add_option("--q-step", q_step)->capture_default_str();
        cmd.add_option("--scales", scales, "log:MIN:MAX:COUNT, dyadic:MIN:MAX or s1,s2,...");
        cmd.add_option("--fit-range", fit_range, "MIN:MAX scales used by the regressions");
        cmd.add_option("--approach", approach, "traditional|direct|both")->capture_default_str();
    }

    AnalysisConfig config(int dimension, std::size_t rows, std::size_t cols) const {
        AnalysisConfig cfg;
        cfg.theta = ThetaPosition::parse(theta);
        cfg.qs = QGrid::range(q_min, q_max, q_step);
        ScaleGrid grid = scales.empty()
                             ? (dimension == 1 ? ScaleGrid::default_1d(rows) : ScaleGrid::default_2d(rows, cols))
                             : ScaleGrid(parse_scales(scales));
        if (!fit_range.empty()) grid = grid.with_fit_range(parse_fit_range(fit_range));
        cfg.scales = grid;
        cfg.approach = parse_approach(approach);
        return cfg;
    }
};

struct OracleOptions {
    std::optional<double> p1;
    std::string p;

    void attach(CLI::App& cmd) {
        cmd.add_option("--p1", p1, "closed-form binomial cascade with this p1");
        cmd.add_option("--p", p, "closed-form four-fold cascade with weights p1,p2,p3,p4");
    }

    std::optional<AnalyticOracle> oracle() const {
        if (p1 && !p.empty()) throw Error(ErrorCode::InvalidArgument, "give either --p1 or --p, not both");
        if (p1) {
            if (!(*p1 > 0.0 && *p1 < 1.0)) throw Error(ErrorCode::InvalidArgument, "--p1 must lie in (0,1)");
            return AnalyticOracle::binomial(*p1);
        }
        if (!p.empty()) {
            const auto v = parse_list(p, "--p");
            if (v.size() != 4) throw Error(ErrorCode::InvalidArgument, "--p needs four weights");
            for (double x : v)
                if (!(x > 0.0)) throw Error(ErrorCode::InvalidArgument, "--p weights must be positive");
            return AnalyticOracle::fourfold({v[0], v[1], v[2], v[3]});
        }
        return std::nullopt;
    }
};

ordered_json spectrum_diagnostics(const SpectrumResult& s) {
    double min_r2 = 1.0;
    for (const auto& r : s.rows) min_r2 = std::min(min_r2, r.tau_fit.r_squared);
    return {{"alpha_width", s.alpha_width()},
            {"max_legendre_residual", s.max_legendre_residual()},
            {"min_r2_tau", min_r2}};
}

ordered_json config_json(const AnalysisConfig& cfg, int dimension, const GridOptions& g) {
    ordered_json j;
    j["dimension"] = dimension;
    j["theta"] = {cfg.theta.theta1, cfg.theta.theta2};
    j["q_grid"] = {{"min", g.q_min}, {"max", g.q_max}, {"step", g.q_step}, {"count", cfg.qs.size()}};
    j["scales"] = std::vector<int>(cfg.scales.scales().begin(), cfg.scales.scales().end());
    j["fit_range"] = {cfg.scales.fit_range().min_scale, cfg.scales.fit_range().max_scale};
    j["approach"] = to_string(cfg.approach);
    return j;
}

// ----------------------------------------------------------------------------

struct GenerateCmd {
    std::string kind, out;
    double p1 = 0.3, hurst = 0.7;
    std::string p = "0.1,0.2,0.3,0.4";
    int depth = -1;
    std::size_t length = 65536;
    std::uint64_t seed = 1;

    void attach(CLI::App& app) {
        auto* cmd = app.add_subcommand("generate", "write a synthetic series or surface");
        cmd->add_option("kind", kind, "pmodel1d|pmodel2d|fbm")->required()->check(
            CLI::IsMember({"pmodel1d", "pmodel2d", "fbm"}));
        cmd->add_option("-o,--out", out, "output file ('-' for stdout)")->required();
        cmd->add_option("--p1", p1, "binomial cascade weight")->capture_default_str();
        cmd->add_option("--p", p, "four-fold cascade weights NW,NE,SW,SE")->capture_default_str();
        cmd->add_option("--depth", depth, "cascade levels (default 16 in 1D, 9 in 2D)");
        cmd->add_option("--hurst", hurst, "FBM Hurst index")->capture_default_str();
        cmd->add_option("--length", length, "FBM length")->capture_default_str();
        cmd->add_option("--seed", seed, "FBM seed")->capture_default_str();
        cmd->callback([this] { run(); });
    }

    void run() const {
        std::ostringstream text;
        if (kind == "pmodel1d") {
            write_series(text, pmodel_1d({p1, depth < 0 ? 16 : depth}));
        } else if (kind == "pmodel2d") {
            const auto v = parse_list(p, "--p");
            if (v.size() != 4) throw Error(ErrorCode::InvalidArgument, "--p needs four weights");
            write_surface(text, pmodel_2d({{v[0], v[1], v[2], v[3]}, depth < 0 ? 9 : depth}));
        } else {
            write_series(text, fbm({hurst, length, seed}));
        }
        emit(out, text.str());
    }
};

struct AnalyzeCmd {
    std::string in, out;
    int dimension = 1;
    unsigned threads = 1;
    std::string format = "csv";
    GridOptions grid;
    OracleOptions oracle;

    void attach(CLI::App& app) {
        auto* cmd = app.add_subcommand("analyze", "multifractal spectrum of a series or surface");
        cmd->add_option("input", in, "series (one value per line) or surface (CSV matrix)")->required();
        cmd->add_option("-o,--out", out, "output prefix")->required();
        cmd->add_option("--dimension", dimension, "1 for a series, 2 for a surface")
            ->check(CLI::IsMember({1, 2}))
            ->capture_default_str();
        cmd->add_option("--threads", threads, "scales analysed concurrently")->capture_default_str();
        cmd->add_option("--format", format, "csv (PREFIX.csv, PREFIX.scales.csv, PREFIX.json) or json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        grid.attach(*cmd);
        oracle.attach(*cmd);
        cmd->callback([this] { run(); });
    }

    void run() const {
        std::optional<Series1D> series;
        std::optional<Surface2D> surface;
        std::size_t rows = 0, cols = 1;
        if (dimension == 1) {
            series = read_series(in);
            rows = series->size();
        } else {
            surface = read_surface(in);
            rows = surface->rows();
            cols = surface->cols();
        }
        auto cfg = grid.config(dimension, rows, cols);
        cfg.threads = threads;
        const auto orc = oracle.oracle();
        if (orc && orc->dimension() != dimension)
            throw Error(ErrorCode::InvalidArgument, "oracle dimension does not match --dimension");
        const auto result = series ? analyze(*series, cfg) : analyze(*surface, cfg);
        const auto table = report_rows(result);

        ordered_json meta;
        meta["command"] = "analyze";
        meta["input"] = in;
        meta["config"] = config_json(cfg, dimension, grid);
        meta["segments"] = result.table.segments;
        meta["intermediates_hash"] = hex64(result.table.fluctuation_hash);
        ordered_json diag;
        if (result.traditional) diag["traditional"] = spectrum_diagnostics(*result.traditional);
        if (result.direct) diag["direct"] = spectrum_diagnostics(*result.direct);
        meta["diagnostics"] = diag;
        if (orc) {
            const auto devs = compare_to_oracle(table, *orc);
            meta["oracle"] = {{"dimension", orc->dimension()},
                              {"weights", orc->weights()},
                              {"max_abs_delta_tau", max_abs_delta_tau(devs)}};
        }

        if (format == "csv") {
            std::ostringstream per_q, per_qs;
            write_report_csv(per_q, table, orc ? &*orc : nullptr);
            write_intermediates_csv(per_qs, result.table);
            emit(out + ".csv", per_q.str());
            emit(out + ".scales.csv", per_qs.str());
        } else {
            ordered_json rows_json = ordered_json::array();
            for (const auto& r : table) {
                ordered_json row{{"approach", r.approach}, {"q", r.q},           {"h", number_or_null(r.h)},
                                 {"tau", r.tau},           {"D_q", r.d_q},       {"alpha", r.alpha},
                                 {"f", r.f_alpha},         {"r2_tau", r.r2_tau}, {"r2_alpha", number_or_null(r.r2_alpha)},
                                 {"r2_f", number_or_null(r.r2_f)}, {"legendre_residual", r.legendre_residual}};
                if (orc) {
                    const auto a = orc->at(r.q);
                    row["tau_analy"] = a.tau;
                    row["alpha_analy"] = a.alpha;
                    row["f_analy"] = a.f_alpha;
                    row["delta_tau"] = r.tau - a.tau;
                    row["delta_alpha"] = r.alpha - a.alpha;
                }
                rows_json.push_back(row);
            }
            meta["rows"] = rows_json;
            const auto& t = result.table;
            ordered_json inter = ordered_json::array();
            for (std::size_t i = 0; i < t.qs.size(); ++i)
                for (std::size_t s = 0; s < t.scales.size(); ++s)
                    inter.push_back({{"q", t.qs[i]},
                                     {"s", t.scales[s]},
                                     {"segments", t.segments[s]},
                                     {"ln_F", t.fluctuation.log_values[i][s]},
                                     {"ln_chi", t.partition.log_values[i][s]},
                                     {"A", t.sums.a[i][s]},
                                     {"B", t.sums.b[i][s]}});
            meta["intermediates"] = inter;
        }
        emit(out + ".json", meta.dump(2) + "\n");
    }
};

struct CompareCmd {
    std::string report, reference, out, format = "csv";
    double tol = 0.15;
    OracleOptions oracle;
    int* exit_code = nullptr;

    void attach(CLI::App& app, int& code) {
        exit_code = &code;
        auto* cmd = app.add_subcommand("compare", "deviations of a report from a closed form or another report");
        cmd->add_option("report", report, "per-q CSV written by analyze")->required();
        cmd->add_option("--reference", reference, "compare against this report instead of a closed form");
        cmd->add_option("--tol", tol, "largest |delta tau| accepted")->capture_default_str();
        cmd->add_option("-o,--out", out, "deviation table ('-' or omitted for stdout)");
        cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        oracle.attach(*cmd);
        cmd->callback([this] { run(); });
    }

    void run() const {
        const auto rows = read_report_csv(report);
        const auto orc = oracle.oracle();
        if (orc.has_value() == !reference.empty())
            throw Error(ErrorCode::InvalidArgument, "give exactly one of --p1, --p or --reference");
        const auto devs = orc ? compare_to_oracle(rows, *orc) : compare_to_reference(rows, read_report_csv(reference));
        const double worst = max_abs_delta_tau(devs);
        if (format == "csv") {
            std::ostringstream text;
            write_deviations_csv(text, devs);
            emit(out, text.str());
        } else {
            ordered_json j;
            j["tol"] = tol;
            j["max_abs_delta_tau"] = worst;
            j["pass"] = worst <= tol;
            ordered_json arr = ordered_json::array();
            for (const auto& d : devs)
                arr.push_back({{"approach", d.approach},
                               {"q", d.q},
                               {"tau", d.tau},
                               {"tau_ref", d.tau_ref},
                               {"delta_tau", d.delta_tau()},
                               {"alpha", d.alpha},
                               {"alpha_ref", d.alpha_ref},
                               {"delta_alpha", d.delta_alpha()}});
            j["rows"] = arr;
            emit(out, j.dump(2) + "\n");
        }
        std::cerr << "max |delta tau| = " << format_double(worst) << " (tol " << format_double(tol) << ")\n";
        if (worst > tol) *exit_code = kExitTolerance;
    }
};

struct HurstBenchCmd {
    std::string hursts = "0.3,0.5,0.7", out, format = "csv";
    std::size_t runs = 100, length = 65536;
    std::string theta = "centered";
    std::uint64_t seed = 1;
    unsigned threads = 1;
    double q_min = -5.0, q_max = 5.0, q_step = 0.25;
    std::string scales;

    void attach(CLI::App& app) {
        auto* cmd = app.add_subcommand("hurst-bench", "ensemble mean and spread of h(q) on FBM");
        cmd->add_option("--hurst", hursts, "comma-separated Hurst indices")->capture_default_str();
        cmd->add_option("--runs", runs, "realisations per Hurst index")->capture_default_str();
        cmd->add_option("--length", length)->capture_default_str();
        cmd->add_option("--theta", theta)->capture_default_str();
        cmd->add_option("--seed", seed, "run r uses seed + r")->capture_default_str();
        cmd->add_option("--threads", threads)->capture_default_str();
        cmd->add_option("--q-min", q_min)->capture_default_str();
        cmd->add_option("--q-max", q_max)->capture_default_str();
        cmd->add_option("--q-step", q_step)->capture_default_str();
        cmd->add_option("--scales", scales, "log:MIN:MAX:COUNT, dyadic:MIN:MAX or s1,s2,...");
        cmd->add_option("-o,--out", out, "output table ('-' or omitted for stdout)");
        cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        cmd->callback([this] { run(); });
    }

    void run() const {
        HurstBenchConfig cfg;
        cfg.hursts = parse_list(hursts, "--hurst");
        cfg.runs = runs;
        cfg.length = length;
        const auto th = ThetaPosition::parse(theta);
        cfg.theta = th.theta1;
        cfg.qs = QGrid::range(q_min, q_max, q_step);
        if (!scales.empty()) cfg.scales = ScaleGrid(parse_scales(scales));
        cfg.seed = seed;
        cfg.threads = threads;
        const auto rows = hurst_bench(cfg);
        if (format == "csv") {
            std::ostringstream text;
            text << "hurst,approach,q,mean_h,std_h,runs\n";
            for (const auto& r : rows)
                text << format_double(r.hurst) << ',' << to_string(r.approach) << ',' << format_double(r.q) << ','
                     << format_double(r.mean) << ',' << format_double(r.stddev) << ',' << r.count << '\n';
            emit(out, text.str());
        } else {
            ordered_json arr = ordered_json::array();
            for (const auto& r : rows)
                arr.push_back({{"hurst", r.hurst},
                               {"approach", to_string(r.approach)},
                               {"q", r.q},
                               {"mean_h", number_or_null(r.mean)},
                               {"std_h", number_or_null(r.stddev)},
                               {"runs", r.count}});
            ordered_json j{{"theta", cfg.theta}, {"length", length}, {"seed", seed}, {"rows", arr}};
            emit(out, j.dump(2) + "\n");
        }
    }
};

struct VolatilityCmd {
    std::string in, out, instrument;
    bool drop_gaps = false;

    void attach(CLI::App& app) {
        auto* cmd = app.add_subcommand("volatility", "absolute log returns of a timestamp,close CSV");
        cmd->add_option("input", in, "price CSV with header timestamp,close")->required();
        cmd->add_option("-o,--out", out, "series file; metadata goes to OUT.json")->required();
        cmd->add_option("--instrument", instrument, "instrument id recorded in the metadata");
        cmd->add_flag("--drop-session-gaps", drop_gaps, "drop returns that span a change of date");
        cmd->callback([this] { run(); });
    }

    void run() const {
        const auto vol = volatility(read_prices(in), {instrument, drop_gaps});
        std::ostringstream text;
        write_series(text, vol.values);
        emit(out, text.str());
        if (out != "-") {
            const auto& m = vol.metadata;
            ordered_json j{{"command", "volatility"},          {"input", in},
                           {"instrument", m.instrument},       {"first_timestamp", m.first_timestamp},
                           {"last_timestamp", m.last_timestamp}, {"count", m.count},
                           {"drop_session_gaps", drop_gaps},   {"dropped_gaps", m.dropped_gaps}};
            emit(out + ".json", j.dump(2) + "\n");
        }
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multifractal detrending moving average analysis"};
    app.name("mfdma");
    app.require_subcommand(1);
    int exit_code = 0;

    GenerateCmd generate;
    AnalyzeCmd analyze_cmd;
    CompareCmd compare;
    HurstBenchCmd bench;
    VolatilityCmd vol;
    generate.attach(app);
    analyze_cmd.attach(app);
    compare.attach(app, exit_code);
    bench.attach(app);
    vol.attach(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    } catch (const Error& e) {
        std::cerr << "mfdma: " << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "mfdma: " << e.what() << '\n';
        return 1;
    }
    return exit_code;
}
