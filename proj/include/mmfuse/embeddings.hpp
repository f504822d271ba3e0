#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mmfuse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Ordered list of unique words with O(1) lookup. Immutable once built.
class Vocabulary {
public:
    explicit Vocabulary(std::vector<std::string> words);

    std::size_t size() const noexcept { return words_.size(); }
    const std::vector<std::string>& words() const noexcept { return words_; }
    const std::string& operator[](std::size_t i) const { return words_[i]; }

    std::optional<std::size_t> find(std::string_view word) const;
    bool contains(std::string_view word) const { return find(word).has_value(); }

    bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Words mapped to the rows of a dense matrix.
///
/// Invariants checked at construction: unique vocabulary, one row per word,
/// at least one column, every entry finite. Tables derived from one another
/// (PCA, CCA, residuals) share the same `Vocabulary` instance.
class EmbeddingTable {
public:
    EmbeddingTable(std::vector<std::string> words, Matrix matrix, std::string name = {});
    EmbeddingTable(std::shared_ptr<const Vocabulary> vocab, Matrix matrix, std::string name = {});

    const Vocabulary& vocab() const noexcept { return *vocab_; }
    const std::shared_ptr<const Vocabulary>& shared_vocab() const noexcept { return vocab_; }
    const Matrix& matrix() const noexcept { return matrix_; }
    const std::string& name() const noexcept { return name_; }

    std::size_t size() const noexcept { return vocab_->size(); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }

    /// Row of `word`; throws LookupError when absent.
    Vector row(std::string_view word) const;

    /// Same vocabulary, new values.
    EmbeddingTable derive(Matrix matrix, std::string name) const;

private:
    void validate() const;

    std::shared_ptr<const Vocabulary> vocab_;
    Matrix matrix_;
    std::string name_;
};

/// Decimal digits written after the point by save_embeddings.
inline constexpr int kSavedPrecision = 6;

/// Reads word2vec-style text: optional "n dim" header, then "word v1 ... vdim"
/// per line. A first line of exactly two non-negative integers is a header.
/// Blank lines are ignored.
EmbeddingTable load_embeddings(const std::filesystem::path& path, std::string name = {});

/// Header "n dim" then one row per word with kSavedPrecision decimals.
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

/// Restricts both tables to their shared words, in byte-wise lexicographic order.
std::pair<EmbeddingTable, EmbeddingTable> align_vocabularies(const EmbeddingTable& a,
                                                             const EmbeddingTable& b);

}  // namespace mmfuse
