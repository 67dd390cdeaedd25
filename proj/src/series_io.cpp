#include "trendperm/series_io.hpp"

#include "trendperm/errors.hpp"
#include "trendperm/text.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace trendperm {

SeriesFormat series_format_for(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? SeriesFormat::Csv : SeriesFormat::PlainText;
}

void write_series(std::ostream& out, std::span<const double> values, SeriesFormat format) {
    if (format == SeriesFormat::Csv) {
        out << "value\n";
    }
    for (double v : values) {
        out << text::format_double(v) << '\n';
    }
}

void write_series(const std::filesystem::path& path, std::span<const double> values) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    write_series(out, values, series_format_for(path));
    if (!out) {
        throw std::runtime_error("write to '" + path.string() + "' failed");
    }
}

std::vector<double> read_series_values(std::istream& in) {
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto v = text::parse_double(t);
        if (!v) {
            if (first_content) {
                first_content = false;
                continue;  // header
            }
            throw ParseError("not a number: '" + std::string(t) + "'", lineno);
        }
        first_content = false;
        values.push_back(*v);
    }
    return values;
}

std::vector<double> read_series_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    return read_series_values(in);
}

}  // namespace trendperm
