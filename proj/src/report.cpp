#include "mmfuse/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "mmfuse/errors.hpp"
#include "text_util.hpp"

namespace mmfuse {
namespace {

std::string single_line(std::string s) {
    for (auto& c : s) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

std::string status_of(const EvaluationResult& r) {
    return r.ok() ? "ok" : "failed: " + single_line(r.error);
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f%%", fraction * 100.0);
    return buf;
}

std::string rho_text(const std::optional<double>& rho) {
    if (!rho) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *rho);
    return buf;
}

std::string grid_line(const GridSpec& g) {
    std::ostringstream out;
    out << "dim_min=" << g.dim_min << " dim_step=" << g.dim_step
        << " alpha_step=" << detail::format_double(g.alpha_step)
        << " ridge=" << detail::format_double(g.ridge)
        << " motifs=" << (g.motif_filter ? format_motifs(*g.motif_filter) : std::string("all"));
    if (g.normalize_concat) out << " concat_norm=l2";
    return out.str();
}

void ranked_header(std::ostream& out) { out << "rank    rho   dim  coverage  config\n"; }

void ranked_line(std::ostream& out, std::size_t rank, const std::optional<double>& rho,
                 std::size_t dim, double coverage, const Configuration& config,
                 const std::string& status) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%4zu  %5s  %4zu  %8s  ", rank, rho_text(rho).c_str(), dim,
                  percent(coverage).c_str());
    out << buf << describe_configuration(config);
    if (status != "ok") out << "  [" << status << ']';
    out << '\n';
}

}  // namespace

std::string format_rho(const EvaluationResult& result) { return rho_text(result.rho); }

std::string format_report_table(const SearchReport& report, std::size_t top) {
    std::ostringstream out;
    out << "benchmark: " << report.benchmark_name << '\n';
    out << "inputs: textual dim " << report.dim_t << ", visual dim " << report.dim_v << '\n';
    out << "grid: " << grid_line(report.grid) << '\n';
    out << "configurations: " << report.entries.size() << " ("
        << report.entries.size() - report.failed() << " ok, " << report.failed() << " failed)\n\n";

    if (!report.entries.empty() && report.entries.front().ok()) {
        const auto& best = report.entries.front();
        out << "Best\n";
        out << "  Config.   " << describe_configuration(best.config) << '\n';
        out << "  rho       " << format_rho(best.result) << '\n';
        out << "  dim       " << best.output_dim << '\n';
        out << "  pairs     " << best.result.n_evaluated << " of " << best.result.n_total << " ("
            << percent(best.result.coverage()) << ")\n";
        out << "  flat      " << format_configuration_inline(best.config) << "\n\n";
    } else {
        out << "Best\n  none: every configuration failed\n\n";
    }

    ranked_header(out);
    const std::size_t n = top ? std::min(top, report.entries.size()) : report.entries.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = report.entries[i];
        ranked_line(out, i + 1, e.result.rho, e.output_dim, e.result.coverage(), e.config,
                    status_of(e.result));
    }
    if (n < report.entries.size()) out << "... " << report.entries.size() - n << " more\n";
    return out.str();
}

std::string format_report_entries(const SearchReport& report) {
    std::ostringstream out;
    out << "# benchmark=" << report.benchmark_name << ' ' << grid_line(report.grid) << '\n';
    out << "# rank\tconfig\trho\tn_evaluated\tn_total\tcoverage\toutput_dim\tstatus\n";
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        out << i + 1 << '\t' << format_configuration_inline(e.config) << '\t'
            << (e.result.rho ? detail::format_double(*e.result.rho) : std::string("-")) << '\t'
            << e.result.n_evaluated << '\t' << e.result.n_total << '\t'
            << detail::format_double(e.result.coverage()) << '\t' << e.output_dim << '\t'
            << status_of(e.result) << '\n';
    }
    return out.str();
}

std::vector<ReportRow> parse_report_entries(std::string_view text) {
    std::vector<ReportRow> rows;
    std::size_t line_no = 0;
    for (auto line : detail::split(text, '\n')) {
        ++line_no;
        if (detail::trim(line).empty() || line.front() == '#') continue;
        const auto f = detail::split(line, '\t');
        if (f.size() != 8) {
            throw ParseError("expected 8 tab-separated fields, found " + std::to_string(f.size()),
                             line_no);
        }
        ReportRow row;
        bool good = detail::parse_size(f[0], row.rank) && detail::parse_size(f[3], row.n_evaluated) &&
                    detail::parse_size(f[4], row.n_total) && detail::parse_double(f[5], row.coverage) &&
                    detail::parse_size(f[6], row.output_dim);
        if (f[2] != "-") {
            double rho = 0;
            good = good && detail::parse_double(f[2], rho);
            row.rho = rho;
        }
        if (!good) throw ParseError("malformed numeric field", line_no);
        try {
            row.config = parse_configuration(f[1]);
        } catch (const ParseError& e) {
            throw ParseError(std::string("config: ") + e.what(), line_no);
        }
        row.status = std::string(f[7]);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_rows_table(const std::vector<ReportRow>& rows, std::size_t top) {
    std::ostringstream out;
    ranked_header(out);
    const std::size_t n = top ? std::min(top, rows.size()) : rows.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = rows[i];
        ranked_line(out, r.rank, r.rho, r.output_dim, r.coverage, r.config, r.status);
    }
    if (n < rows.size()) out << "... " << rows.size() - n << " more\n";
    return out.str();
}

std::string format_cross_table(const std::vector<CrossRow>& rows) {
    std::ostringstream out;
    std::vector<std::string> benches;
    for (const auto& row : rows) {
        for (const auto& [name, _] : row.results) {
            if (std::find(benches.begin(), benches.end(), name) == benches.end()) {
                benches.push_back(name);
            }
        }
    }
    std::size_t label_width = 6;
    for (const auto& row : rows) label_width = std::max(label_width, row.label.size());

    char buf[64];
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(label_width), "config");
    out << buf;
    for (const auto& b : benches) {
        std::snprintf(buf, sizeof buf, "  %10s", b.c_str());
        out << buf;
    }
    out << '\n';
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(label_width), row.label.c_str());
        out << buf;
        for (const auto& b : benches) {
            auto it = std::find_if(row.results.begin(), row.results.end(),
                                   [&](const auto& r) { return r.first == b; });
            std::snprintf(buf, sizeof buf, "  %10s",
                          it == row.results.end() ? "" : format_rho(it->second).c_str());
            out << buf;
        }
        out << '\n';
    }
    out << '\n';
    for (const auto& row : rows) {
        out << row.label << ": " << describe_configuration(row.config) << '\n';
    }
    return out.str();
}

std::string format_cross_entries(const std::vector<CrossRow>& rows) {
    std::ostringstream out;
    out << "# config\tbenchmark\trho\tn_evaluated\tn_total\tcoverage\tstatus\n";
    for (const auto& row : rows) {
        for (const auto& [name, r] : row.results) {
            out << row.label << '\t' << name << '\t'
                << (r.rho ? detail::format_double(*r.rho) : std::string("-")) << '\t'
                << r.n_evaluated << '\t' << r.n_total << '\t' << detail::format_double(r.coverage())
                << '\t' << status_of(r) << '\n';
        }
    }
    return out.str();
}

}  // namespace mmfuse
