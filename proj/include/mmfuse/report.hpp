#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmfuse/search.hpp"

namespace mmfuse {

/// Human-readable report: the Best configuration in "Config." / "rho" form
/// followed by the top `top` ranked entries (0 = all).
std::string format_report_table(const SearchReport& report, std::size_t top = 25);

/// One tab-separated line per entry, in rank order:
///   rank  config(inline key=value)  rho  n_evaluated  n_total  coverage  output_dim  status
/// rho and coverage are written in shortest round-trip form, "-" when absent.
/// The body carries no timestamps, so equal reports serialize byte-identically.
std::string format_report_entries(const SearchReport& report);

/// A parsed line of format_report_entries.
struct ReportRow {
    std::size_t rank = 0;
    Configuration config;
    std::optional<double> rho;
    std::size_t n_evaluated = 0;
    std::size_t n_total = 0;
    double coverage = 0.0;
    std::size_t output_dim = 0;
    std::string status;
};

std::vector<ReportRow> parse_report_entries(std::string_view text);

/// Renders parsed rows as the ranked text table used by format_report_table.
std::string format_rows_table(const std::vector<ReportRow>& rows, std::size_t top = 0);

/// rho at display precision (two decimals), "n/a" for an empty outcome.
std::string format_rho(const EvaluationResult& result);

/// Grid of named configurations (rows) by benchmarks (columns).
struct CrossRow {
    std::string label;
    Configuration config;
    std::vector<std::pair<std::string, EvaluationResult>> results;
};
std::string format_cross_table(const std::vector<CrossRow>& rows);
/// Machine-readable companion: label, benchmark, rho, n_evaluated, n_total, coverage, status.
std::string format_cross_entries(const std::vector<CrossRow>& rows);

}  // namespace mmfuse
