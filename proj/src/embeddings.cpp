#include "mmfuse/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mmfuse/errors.hpp"
#include "text_util.hpp"

namespace mmfuse {

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], i).second) {
            throw DuplicateError("duplicate word '" + words_[i] + "'");
        }
    }
}

std::optional<std::size_t> Vocabulary::find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, Matrix matrix, std::string name)
    : EmbeddingTable(std::make_shared<const Vocabulary>(std::move(words)), std::move(matrix),
                     std::move(name)) {}

EmbeddingTable::EmbeddingTable(std::shared_ptr<const Vocabulary> vocab, Matrix matrix,
                               std::string name)
    : vocab_(std::move(vocab)), matrix_(std::move(matrix)), name_(std::move(name)) {
    validate();
}

void EmbeddingTable::validate() const {
    if (!vocab_) throw Error("embedding table without vocabulary");
    if (static_cast<std::size_t>(matrix_.rows()) != vocab_->size()) {
        throw DimensionError("vocabulary has " + std::to_string(vocab_->size()) +
                             " words but matrix has " + std::to_string(matrix_.rows()) + " rows");
    }
    if (matrix_.cols() < 1) throw DimensionError("embedding dimension must be at least 1");
    if (!matrix_.allFinite()) throw NumericalError("embedding matrix contains NaN or Inf");
}

Vector EmbeddingTable::row(std::string_view word) const {
    auto i = vocab_->find(word);
    if (!i) throw LookupError("word '" + std::string(word) + "' not in table " + name_);
    return matrix_.row(static_cast<Eigen::Index>(*i)).transpose();
}

EmbeddingTable EmbeddingTable::derive(Matrix matrix, std::string name) const {
    return EmbeddingTable(vocab_, std::move(matrix), std::move(name));
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::string name) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embeddings file " + path.string());
    if (name.empty()) name = path.stem().string();

    std::vector<std::string> words;
    std::vector<double> values;
    std::optional<std::size_t> header_rows;
    std::optional<std::size_t> dim;
    std::size_t line_no = 0;
    bool first = true;
    std::string line;

    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = detail::split_whitespace(line);
        if (tokens.empty()) continue;

        if (first) {
            first = false;
            std::size_t n = 0;
            std::size_t d = 0;
            if (tokens.size() == 2 && detail::parse_size(tokens[0], n) &&
                detail::parse_size(tokens[1], d)) {
                if (d == 0) throw ParseError("header declares dimension 0", line_no);
                header_rows = n;
                dim = d;
                continue;
            }
        }

        if (tokens.size() < 2) throw ParseError("expected a word followed by numbers", line_no);
        const std::size_t row_dim = tokens.size() - 1;
        if (!dim) dim = row_dim;
        if (row_dim != *dim) {
            throw ParseError("expected " + std::to_string(*dim) + " numbers, found " +
                                 std::to_string(row_dim),
                             line_no);
        }
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            double v = 0.0;
            if (!detail::parse_double(tokens[t], v)) {
                throw ParseError("not a number: '" + std::string(tokens[t]) + "'", line_no);
            }
            if (!std::isfinite(v)) throw ParseError("non-finite value", line_no);
            values.push_back(v);
        }
        words.emplace_back(tokens[0]);
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    if (words.empty()) throw EmptyInputError("no embeddings in " + path.string());
    if (header_rows && *header_rows != words.size()) {
        throw ParseError("header declares " + std::to_string(*header_rows) + " rows, found " +
                         std::to_string(words.size()));
    }

    const auto n = static_cast<Eigen::Index>(words.size());
    const auto d = static_cast<Eigen::Index>(*dim);
    Matrix m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), n, d);
    try {
        return EmbeddingTable(std::move(words), std::move(m), std::move(name));
    } catch (const DuplicateError& e) {
        throw DuplicateError(std::string(e.what()) + " in " + path.string());
    }
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << table.size() << ' ' << table.dim() << '\n';
    const Matrix& m = table.matrix();
    char buf[64];
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << table.vocab()[i];
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, " %.*f", kSavedPrecision,
                          m(static_cast<Eigen::Index>(i), j));
            out << buf;
        }
        out << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
}

std::pair<EmbeddingTable, EmbeddingTable> align_vocabularies(const EmbeddingTable& a,
                                                             const EmbeddingTable& b) {
    std::vector<std::string> shared;
    for (const auto& w : a.vocab().words()) {
        if (b.vocab().contains(w)) shared.push_back(w);
    }
    if (shared.empty()) {
        throw AlignmentError("tables '" + a.name() + "' and '" + b.name() + "' share no words");
    }
    std::sort(shared.begin(), shared.end());

    auto vocab = std::make_shared<const Vocabulary>(std::move(shared));
    auto gather = [&vocab](const EmbeddingTable& t) {
        Matrix m(static_cast<Eigen::Index>(vocab->size()), t.matrix().cols());
        for (std::size_t i = 0; i < vocab->size(); ++i) {
            m.row(static_cast<Eigen::Index>(i)) =
                t.matrix().row(static_cast<Eigen::Index>(*t.vocab().find((*vocab)[i])));
        }
        return EmbeddingTable(vocab, std::move(m), t.name());
    };
    return {gather(a), gather(b)};
}

}  // namespace mmfuse
