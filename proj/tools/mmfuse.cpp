// mmfuse command-line tool: eval, search, cross, apply, report.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "mmfuse/mmfuse.hpp"

namespace fs = std::filesystem;
using namespace mmfuse;

namespace {

enum Exit { ok = 0, usage = 1, input = 2, numerical = 3 };

struct Manifest {
    std::string text_vecs;
    std::string image_vecs;
    std::vector<std::string> benches;
    std::string out;
    std::size_t dim_step = 50;
    std::size_t dim_min = 50;
    double alpha_step = 0.1;
    double ridge = kDefaultRidge;
    std::string motifs;
    std::size_t workers = 1;
    bool concat_normalize = false;
};

// Input problems the user can fix; mapped to exit 2.
struct InputProblem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Timestamped sidecar log; canonical outputs never carry timestamps.
class RunLog {
public:
    void open(const fs::path& dir) { out_.open(dir / "run.log", std::ios::app); }
    void operator()(const std::string& msg) {
        if (out_) out_ << timestamp() << ' ' << msg << std::endl;
    }

private:
    std::ofstream out_;
};

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw InputProblem(std::string("missing ") + what + " path");
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw InputProblem(std::string(what) + " not found: " + path);
}

void check_inputs(const Manifest& m, bool need_bench) {
    require_file(m.text_vecs, "--text-vecs");
    require_file(m.image_vecs, "--image-vecs");
    if (need_bench && m.benches.empty()) throw InputProblem("at least one --bench is required");
    for (const auto& b : m.benches) require_file(b, "--bench");
}

fs::path prepare_out(const std::string& out) {
    if (out.empty()) throw InputProblem("--out is required");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw InputProblem("cannot create output directory " + out);
    const fs::path probe = fs::path(out) / ".mmfuse-write-test";
    {
        std::ofstream f(probe);
        if (!f) throw InputProblem("output directory is not writable: " + out);
    }
    fs::remove(probe, ec);
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw IoError("cannot write " + path.string());
}

std::pair<EmbeddingTable, EmbeddingTable> load_inputs(const Manifest& m, RunLog& log) {
    auto t = load_embeddings(m.text_vecs, "textual");
    auto v = load_embeddings(m.image_vecs, "visual");
    log("loaded textual " + std::to_string(t.size()) + "x" + std::to_string(t.dim()) + ", visual " +
        std::to_string(v.size()) + "x" + std::to_string(v.dim()));
    auto aligned = align_vocabularies(t, v);
    log("aligned vocabulary: " + std::to_string(aligned.first.size()) + " words");
    std::cerr << "vocabulary: " << aligned.first.size() << " words in both modalities\n";
    return aligned;
}

std::vector<Benchmark> load_benches(const Manifest& m) {
    std::vector<Benchmark> out;
    for (const auto& b : m.benches) out.push_back(load_benchmark(b));
    return out;
}

Configuration load_config(const std::string& path, const EmbeddingTable& t, const EmbeddingTable& v) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open configuration " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    const auto config = parse_configuration(ss.str());
    const auto violations = validate_configuration(config, t.dim(), v.dim());
    if (!violations.empty()) {
        std::string msg = "invalid configuration " + path + ":";
        for (const auto& s : violations) msg += "\n  " + s;
        throw ValidationError(msg);
    }
    return config;
}

std::string label_of(const std::string& config_path) {
    auto stem = fs::path(config_path).filename().string();
    for (const char* ext : {".best.cfg", ".cfg"}) {
        const std::string e = ext;
        if (stem.size() > e.size() && stem.compare(stem.size() - e.size(), e.size(), e) == 0) {
            return stem.substr(0, stem.size() - e.size());
        }
    }
    return stem;
}

GridSpec grid_of(const Manifest& m) {
    GridSpec g;
    g.dim_step = m.dim_step;
    g.dim_min = m.dim_min;
    g.alpha_step = m.alpha_step;
    g.ridge = m.ridge;
    g.normalize_concat = m.concat_normalize;
    if (!m.motifs.empty()) g.motif_filter = parse_motifs(m.motifs);
    return g;
}

int run_cross(const Manifest& m, const std::vector<std::string>& configs, const std::string& stem) {
    check_inputs(m, true);
    if (configs.empty()) throw InputProblem("at least one --config is required");
    for (const auto& c : configs) require_file(c, "--config");
    std::optional<fs::path> out;
    if (!m.out.empty()) out = prepare_out(m.out);
    RunLog log;
    if (out) log.open(*out);
    log(stem + " started");

    const auto [t, v] = load_inputs(m, log);
    const auto benches = load_benches(m);
    std::vector<CrossRow> rows;
    for (const auto& path : configs) {
        const auto config = load_config(path, t, v);
        rows.push_back({label_of(path), config, cross_evaluate(config, t, v, benches)});
        log("evaluated " + path);
    }
    const auto table = format_cross_table(rows);
    std::cout << table;
    if (out) {
        write_text(*out / (stem + ".txt"), table);
        write_text(*out / (stem + ".tsv"), format_cross_entries(rows));
    }
    bool failed = false;
    for (const auto& row : rows) {
        for (const auto& [name, r] : row.results) {
            if (!r.ok()) {
                failed = true;
                std::cerr << row.label << " on " << name << ": " << r.error << '\n';
            }
        }
    }
    log(stem + (failed ? " finished with failed evaluations" : " finished"));
    return failed ? numerical : ok;
}

int run_search(const Manifest& m, std::size_t top) {
    check_inputs(m, true);
    const GridSpec grid = grid_of(m);
    const fs::path out = prepare_out(m.out);
    RunLog log;
    log.open(out);
    log("search started: " + std::to_string(m.benches.size()) + " benchmark(s), workers " +
        std::to_string(m.workers));

    const auto [t, v] = load_inputs(m, log);
    const auto benches = load_benches(m);
    FitCache cache(t, v);

    std::ostringstream summary;
    summary << "benchmark\trho\tcoverage\toutput_dim\tfailed\tconfig\n";
    int status = ok;
    for (const auto& bench : benches) {
        SearchOptions opts;
        opts.workers = m.workers;
        // Carriage-return updates on a terminal, one line per 10% otherwise.
        const bool tty = ::isatty(STDERR_FILENO);
        const std::size_t granularity = tty ? 1 : 10;
        std::size_t last = 101;
        opts.progress = [&, tty, granularity](std::size_t done, std::size_t total) {
            const std::size_t pct = done * 100 / total / granularity * granularity;
            if (pct == last && done != total) return;
            last = pct;
            std::cerr << (tty ? "\r" : "") << bench.name() << ": " << done << '/' << total << " configurations"
                      << (tty && done != total ? "" : "\n") << std::flush;
        };
        const auto report = grid_search(cache, bench, grid, opts);
        write_text(out / (bench.name() + ".report.txt"), format_report_table(report, top));
        write_text(out / (bench.name() + ".entries.tsv"), format_report_entries(report));
        log(bench.name() + ": " + std::to_string(report.entries.size()) + " configurations, " +
            std::to_string(report.failed()) + " failed");
        if (report.failed()) status = numerical;

        if (!report.entries.empty() && report.entries.front().ok()) {
            const auto& best = report.best();
            write_text(out / (bench.name() + ".best.cfg"), format_configuration(best.config));
            summary << bench.name() << '\t' << format_rho(best.result) << '\t'
                    << best.result.n_evaluated << '/' << best.result.n_total << '\t' << best.output_dim
                    << '\t' << report.failed() << '\t' << describe_configuration(best.config) << '\n';
            std::cout << bench.name() << ": rho " << format_rho(best.result) << "  "
                      << describe_configuration(best.config) << '\n';
        } else {
            summary << bench.name() << "\t-\t-\t-\t" << report.failed() << "\tno successful configuration\n";
            std::cerr << bench.name() << ": no successful configuration\n";
        }
    }
    write_text(out / "summary.txt", summary.str());
    log("search finished");
    return status;
}

int run_apply(const Manifest& m, const std::string& config_path) {
    require_file(m.text_vecs, "--text-vecs");
    require_file(m.image_vecs, "--image-vecs");
    require_file(config_path, "--config");
    const fs::path out = prepare_out(m.out);
    RunLog log;
    log.open(out);
    const auto [t, v] = load_inputs(m, log);
    const auto config = load_config(config_path, t, v);
    const auto model = apply_configuration(config, t, v);

    std::ostringstream desc;
    desc << format_configuration(config);
    if (model.is_pair()) {
        save_embeddings(model.pair().first, out / "first.vec");
        save_embeddings(model.pair().second, out / "second.vec");
        desc << "scoring=li\nalpha=" << model.pair().alpha << "\nfirst=first.vec " << model.pair().first.name()
             << "\nsecond=second.vec " << model.pair().second.name() << '\n';
    } else {
        save_embeddings(model.single().table, out / "fused.vec");
        desc << "scoring=cosine\ntable=fused.vec " << model.single().table.name() << '\n';
    }
    desc << "words=" << model.vocab().size() << "\noutput_dim=" << model.output_dim() << '\n';
    write_text(out / "model.txt", desc.str());
    log("applied " + config_path);
    std::cout << describe_configuration(config) << ": " << model.vocab().size() << " words, "
              << model.output_dim() << " dims\n";
    return ok;
}

int run_report(const std::string& entries, std::size_t top) {
    require_file(entries, "--entries");
    std::ifstream f(entries);
    std::stringstream ss;
    ss << f.rdbuf();
    std::cout << format_rows_table(parse_report_entries(ss.str()), top);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimodal word-embedding fusion: evaluate, search and apply motif compositions."};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--manifest", "", "key=value file supplying any of the long options below");

    Manifest m;
    app.add_option("--text-vecs", m.text_vecs, "Textual embeddings (word2vec text format)");
    app.add_option("--image-vecs", m.image_vecs, "Visual embeddings (word2vec text format)");
    app.add_option("--bench", m.benches, "Benchmark file (word1, word2, score); repeatable");
    app.add_option("--out", m.out, "Output directory");
    app.add_option("--dim-step", m.dim_step, "Dimension grid step")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--dim-min", m.dim_min, "Smallest grid dimension")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--alpha-step", m.alpha_step, "LI weight grid step")->capture_default_str();
    app.add_option("--ridge", m.ridge, "CCA ridge")->capture_default_str()->check(CLI::NonNegativeNumber);
    app.add_option("--motifs", m.motifs, "Restrict the search to these motifs, e.g. li or pca,cca,rcca,li");
    app.add_option("--workers", m.workers, "Parallel workers for search")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_flag("--concat-normalize", m.concat_normalize, "L2-normalize each block before concatenation");

    std::vector<std::string> configs;
    std::string config;
    std::string entries;
    std::size_t top = 25;

    auto* eval = app.add_subcommand("eval", "Evaluate one configuration on the benchmarks");
    eval->add_option("--config", config, "Configuration file")->required();

    auto* search = app.add_subcommand("search", "Exhaustive grid search per benchmark");
    search->add_option("--top", top, "Ranked entries in the text report (0 = all)")->capture_default_str();

    auto* cross = app.add_subcommand("cross", "Evaluate configurations across benchmarks");
    cross->add_option("--config", configs, "Configuration file; repeatable")->required();

    auto* apply = app.add_subcommand("apply", "Write the fused tables of one configuration");
    apply->add_option("--config", config, "Configuration file")->required();

    auto* report = app.add_subcommand("report", "Print a saved entries file as a ranked table");
    report->add_option("--entries", entries, "<bench>.entries.tsv from search")->required();
    report->add_option("--top", top, "Rows to print (0 = all)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (*eval) return run_cross(m, {config}, "eval");
        if (*search) return run_search(m, top);
        if (*cross) return run_cross(m, configs, "cross");
        if (*apply) return run_apply(m, config);
        if (*report) return run_report(entries, top);
    } catch (const InputProblem& e) {
        std::cerr << "error: " << e.what() << '\n';
        return input;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return numerical;
    } catch (const NoResultError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return numerical;
    } catch (const ParseError& e) {
        std::cerr << "parse error";
        if (e.line()) std::cerr << " (line " << e.line() << ")";
        std::cerr << ": " << e.what() << '\n';
        return input;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return input;
    }
    return usage;
}
