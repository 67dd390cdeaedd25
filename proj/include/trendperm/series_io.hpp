#pragma once

#include "trendperm/series.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace trendperm {

enum class SeriesFormat {
    PlainText,  ///< one value per line
    Csv,        ///< single column with header "value"
};

/// Csv for a ".csv" extension, PlainText otherwise.
[[nodiscard]] SeriesFormat series_format_for(const std::filesystem::path& path);

/// Values are written in shortest round-trip form, so reading back is exact.
void write_series(std::ostream& out, std::span<const double> values, SeriesFormat format);
void write_series(const std::filesystem::path& path, std::span<const double> values);

/// Accepts both formats: a first line that is not a number is taken as a
/// header. Blank lines and lines starting with '#' are skipped. Throws
/// ParseError with the offending line number.
[[nodiscard]] std::vector<double> read_series_values(std::istream& in);
[[nodiscard]] std::vector<double> read_series_values(const std::filesystem::path& path);

}  // namespace trendperm
