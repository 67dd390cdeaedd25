#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trendperm {

/// Input outside an operation's domain (NaN, too short, bad order/bandwidth, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Duplicate values in a series constructed with the reject tie policy.
class TieError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Exact enumeration requested beyond the configured limit.
class LimitError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Malformed config/series/table file. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace trendperm
