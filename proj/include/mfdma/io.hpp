#ifndef MFDMA_IO_HPP
#define MFDMA_IO_HPP

// Text formats: a series is one value per line, a surface is a CSV matrix
// (one row per line). Numbers are written in shortest round-trip form so that
// identical inputs give byte-identical files.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mfdma/core.hpp"

namespace mfdma {

inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline void write_series(std::ostream& out, const Series1D& series) {
    for (double v : series.values()) out << format_double(v) << '\n';
}

inline Series1D read_series(std::istream& in, const std::string& source = "<input>") {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
        if (view.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        double v = 0.0;
        if (!parse_double(view, v))
            throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": bad value");
        values.push_back(v);
    }
    if (values.empty()) throw Error(ErrorCode::ParseError, source + ": no values");
    return Series1D(std::move(values));
}

inline void write_surface(std::ostream& out, const Surface2D& surface) {
    for (std::size_t i = 0; i < surface.rows(); ++i) {
        for (std::size_t j = 0; j < surface.cols(); ++j) {
            if (j) out << ',';
            out << format_double(surface(i, j));
        }
        out << '\n';
    }
}

inline Surface2D read_surface(std::istream& in, const std::string& source = "<input>") {
    std::vector<double> data;
    std::size_t cols = 0, rows = 0, line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
        if (view.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        const auto fields = split_commas(view);
        if (rows == 0) cols = fields.size();
        if (fields.size() != cols)
            throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": expected " +
                                                   std::to_string(cols) + " columns");
        for (auto f : fields) {
            double v = 0.0;
            if (!parse_double(f, v))
                throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": bad value");
            data.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw Error(ErrorCode::ParseError, source + ": no rows");
    return Surface2D(rows, cols, std::move(data));
}

namespace detail {

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
    return out;
}

}  // namespace detail

inline Series1D read_series(const std::string& path) {
    auto in = detail::open_in(path);
    return read_series(in, path);
}

inline Surface2D read_surface(const std::string& path) {
    auto in = detail::open_in(path);
    return read_surface(in, path);
}

inline void write_series(const std::string& path, const Series1D& series) {
    auto out = detail::open_out(path);
    write_series(out, series);
}

inline void write_surface(const std::string& path, const Surface2D& surface) {
    auto out = detail::open_out(path);
    write_surface(out, surface);
}

}  // namespace mfdma

#endif  // MFDMA_IO_HPP
