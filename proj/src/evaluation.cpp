#include "mmfuse/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <utility>

#include "mmfuse/errors.hpp"
#include "text_util.hpp"

namespace mmfuse {
namespace {

std::pair<std::string_view, std::string_view> unordered(const WordPair& p) {
    std::string_view a = p.first;
    std::string_view b = p.second;
    if (b < a) std::swap(a, b);
    return {a, b};
}

double row_cosine(const Matrix& m, Eigen::Index i, Eigen::Index j, bool& degenerate) {
    double dot = 0;
    double ni = 0;
    double nj = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double a = m(i, c);
        const double b = m(j, c);
        dot += a * b;
        ni += a * a;
        nj += b * b;
    }
    ni = std::sqrt(ni);
    nj = std::sqrt(nj);
    if (ni < kDegenerateNorm || nj < kDegenerateNorm) {
        degenerate = true;
        return 0.0;
    }
    return dot / (ni * nj);
}

double indexed_score(const ScoringModel& model, Eigen::Index i, Eigen::Index j, bool& degenerate) {
    if (!model.is_pair()) return row_cosine(model.single().table.matrix(), i, j, degenerate);
    const auto& p = model.pair();
    const double s1 = row_cosine(p.first.matrix(), i, j, degenerate);
    const double s2 = row_cosine(p.second.matrix(), i, j, degenerate);
    return p.alpha * s1 + (1.0 - p.alpha) * s2;
}

}  // namespace

Benchmark::Benchmark(std::string name, std::vector<WordPair> pairs)
    : name_(std::move(name)), pairs_(std::move(pairs)) {
    std::set<std::pair<std::string_view, std::string_view>> seen;
    for (const auto& p : pairs_) {
        if (!std::isfinite(p.gold)) {
            throw ParseError("non-finite gold score for " + p.first + "/" + p.second);
        }
        if (!seen.insert(unordered(p)).second) {
            throw DuplicateError("duplicate pair " + p.first + "/" + p.second + " in " + name_);
        }
    }
}

Benchmark load_benchmark(const std::filesystem::path& path, std::string name) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open benchmark file " + path.string());
    if (name.empty()) name = path.stem().string();

    std::vector<WordPair> pairs;
    std::set<std::pair<std::string, std::string>> seen;
    char delim = 0;
    bool first = true;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        if (!delim) {
            if (line.find('\t') != std::string::npos) {
                delim = '\t';
            } else if (line.find(',') != std::string::npos) {
                delim = ',';
            } else {
                throw ParseError("expected tab- or comma-separated fields", line_no);
            }
        }
        auto fields = detail::split(line, delim);
        if (fields.size() != 3) {
            throw ParseError("expected 3 fields, found " + std::to_string(fields.size()), line_no);
        }
        WordPair p{std::string(detail::trim(fields[0])), std::string(detail::trim(fields[1])), 0.0};
        const bool numeric = detail::parse_double(detail::trim(fields[2]), p.gold);
        if (first) {
            first = false;
            if (!numeric) continue;
        }
        if (!numeric) {
            throw ParseError("score is not a number: '" + std::string(detail::trim(fields[2])) + "'",
                             line_no);
        }
        if (p.first.empty() || p.second.empty()) throw ParseError("empty word", line_no);
        if (!std::isfinite(p.gold)) throw ParseError("non-finite score", line_no);
        auto key = p.first < p.second ? std::pair(p.first, p.second) : std::pair(p.second, p.first);
        if (!seen.insert(std::move(key)).second) {
            throw DuplicateError("duplicate pair " + p.first + "/" + p.second, line_no);
        }
        pairs.push_back(std::move(p));
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    if (pairs.empty()) throw EmptyInputError("no word pairs in " + path.string());
    return Benchmark(std::move(name), std::move(pairs));
}

void save_benchmark(const Benchmark& bench, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& p : bench.pairs()) {
        out << p.first << '\t' << p.second << '\t' << detail::format_double(p.gold) << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
}

Benchmark filter_coverage(const Benchmark& bench, const Vocabulary& vocab) {
    std::vector<WordPair> kept;
    for (const auto& p : bench.pairs()) {
        if (vocab.contains(p.first) && vocab.contains(p.second)) kept.push_back(p);
    }
    return Benchmark(bench.name(), std::move(kept));
}

double cosine(std::span<const double> u, std::span<const double> v, bool* degenerate) {
    if (u.size() != v.size()) {
        throw DimensionError("cosine of vectors of length " + std::to_string(u.size()) + " and " +
                             std::to_string(v.size()));
    }
    double dot = 0;
    double nu = 0;
    double nv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    nu = std::sqrt(nu);
    nv = std::sqrt(nv);
    const bool deg = nu < kDegenerateNorm || nv < kDegenerateNorm;
    if (degenerate) *degenerate = deg;
    return deg ? 0.0 : dot / (nu * nv);
}

double pair_score(const ScoringModel& model, std::string_view w1, std::string_view w2,
                  bool* degenerate) {
    const auto& vocab = model.vocab();
    const auto i = vocab.find(w1);
    const auto j = vocab.find(w2);
    if (!i || !j) {
        throw LookupError("word '" + std::string(i ? w2 : w1) + "' not in model vocabulary");
    }
    bool deg = false;
    const double s = indexed_score(model, static_cast<Eigen::Index>(*i),
                                   static_cast<Eigen::Index>(*j), deg);
    if (degenerate) *degenerate = deg;
    return s;
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        // Positions i..j-1 hold ranks i+1..j.
        const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = mean_rank;
        i = j;
    }
    return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("spearman of lists of length " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()));
    }
    if (a.size() < 2) throw UndefinedCorrelation("spearman needs at least 2 values");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    // Average ranks always have mean (n + 1) / 2.
    const double mean = 0.5 * static_cast<double>(a.size() + 1);
    double sab = 0;
    double saa = 0;
    double sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - mean;
        const double db = rb[i] - mean;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0 || sbb == 0) throw UndefinedCorrelation("constant ranks on one side");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

EvaluationResult evaluate(const ScoringModel& model, const Benchmark& bench) {
    EvaluationResult result;
    result.n_total = bench.size();
    const auto& vocab = model.vocab();

    std::vector<double> predicted;
    std::vector<double> gold;
    for (const auto& p : bench.pairs()) {
        const auto i = vocab.find(p.first);
        const auto j = vocab.find(p.second);
        if (!i || !j) continue;
        bool deg = false;
        predicted.push_back(
            indexed_score(model, static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j), deg));
        gold.push_back(p.gold);
        if (deg) ++result.n_degenerate;
    }
    result.n_evaluated = predicted.size();
    try {
        result.rho = spearman(predicted, gold);
    } catch (const UndefinedCorrelation& e) {
        result.error = std::string("undefined correlation: ") + e.what();
    }
    return result;
}

}  // namespace mmfuse
