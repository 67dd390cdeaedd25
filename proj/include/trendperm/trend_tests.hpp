#pragma once

#include "trendperm/permutation.hpp"
#include "trendperm/series.hpp"
#include "trendperm/variance.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace trendperm {

enum class Method {
    GlobalStudentized,
    GlobalUnstudentized,
    Classical,
    LocalStudentized,
    LocalUnstudentized,
};

[[nodiscard]] std::string_view to_string(Method m) noexcept;
/// Accepts "global-stud", "global_stud", ... Throws DomainError otherwise.
[[nodiscard]] Method parse_method(std::string_view id);
[[nodiscard]] constexpr bool is_local(Method m) noexcept {
    return m == Method::LocalStudentized || m == Method::LocalUnstudentized;
}

/// How the permutation null is obtained.
enum class NullMode {
    Sampled,    ///< B Fisher-Yates permutations of the data's ranks (default)
    Exact,      ///< all n! arrangements; n <= enumeration limit
    Tabulated,  ///< cached null computed once on (1..n); exact when permutations == 0
};

[[nodiscard]] std::string_view to_string(NullMode m) noexcept;
[[nodiscard]] NullMode parse_null_mode(std::string_view id);

struct TestOptions {
    double alpha = 0.05;
    Side side = Side::Greater;
    std::size_t permutations = 1000;
    std::uint64_t seed = 0;
    std::optional<std::size_t> bandwidth;  ///< floor(n^{1/3}) when empty
    double floor = kDefaultVarianceFloor;
    NullMode null_mode = NullMode::Sampled;
};

struct TestReport {
    std::string method;
    double statistic = 0.0;
    std::optional<VarianceEstimate> studentizer;
    PValue p_value;
    double alpha = 0.05;
    bool reject = false;
    Side side = Side::Greater;
    std::size_t n = 0;
    std::optional<std::size_t> order;
    std::optional<std::size_t> permutations;
    std::optional<std::uint64_t> seed;
    std::string null_mode;
};

/// sqrt(n) U_n / sigma_n against the permutation null of the same statistic;
/// the studentizer is recomputed on every permuted arrangement.
[[nodiscard]] TestReport global_studentized_test(const TimeSeries& series, const TestOptions& options = {});

/// sqrt(n) U_n against its permutation null.
[[nodiscard]] TestReport global_unstudentized_test(const TimeSeries& series, const TestOptions& options = {});

/// Classical Mann-Kendall: exact null of U_n for n <= 8, otherwise the normal
/// approximation with Var(U_n) = 2(2n+5) / (9n(n-1)), no continuity correction.
/// Uses only alpha and side from `options`.
[[nodiscard]] TestReport classical_mk_test(const TimeSeries& series, const TestOptions& options = {});

/// sqrt(n M) V_n / tau_n with V_n of order M.
[[nodiscard]] TestReport local_studentized_test(const TimeSeries& series, std::size_t order,
                                                const TestOptions& options = {});

/// sqrt(n M) V_n.
[[nodiscard]] TestReport local_unstudentized_test(const TimeSeries& series, std::size_t order,
                                                  const TestOptions& options = {});

/// Dispatch by method; `order` is only used by the local tests.
[[nodiscard]] TestReport run_test(Method method, const TimeSeries& series, const TestOptions& options,
                                  std::size_t order = 5);

/// Line-oriented key=value rendering.
[[nodiscard]] std::string format_report(const TestReport& report);
/// Single-line JSON record.
[[nodiscard]] std::string report_to_json(const TestReport& report);

}  // namespace trendperm
