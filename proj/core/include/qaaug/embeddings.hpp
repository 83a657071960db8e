#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qaaug {

enum class EmbeddingFormat { word2vec_text, word2vec_binary };

EmbeddingFormat embedding_format_from_string(std::string_view name);

/// Word vectors, one unit-length row per vocabulary word.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  /// `vectors` is row-major, words.size() x dim. Rows are normalized here.
  /// A repeated word keeps its first row; later ones are counted and
  /// skipped. Zero rows are rejected.
  EmbeddingTable(const std::vector<std::string>& words, const std::vector<float>& vectors, std::size_t dim);

  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t duplicates_skipped() const { return duplicates_; }

  std::optional<std::size_t> find(std::string_view word) const;
  const std::string& word(std::size_t row) const { return words_[row]; }
  std::span<const float> vector(std::size_t row) const {
    return std::span<const float>(vectors_).subspan(row * dim_, dim_);
  }

  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
    return a.dim_ == b.dim_ && a.words_ == b.words_ && a.vectors_ == b.vectors_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<float> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t duplicates_ = 0;
};

/// Text layout: "count dim" header, then "word v1 ... vdim" per line.
EmbeddingTable parse_embeddings_text(std::string_view text);
/// Binary layout: "count dim\n" header, then per row the word, one space
/// and dim little-endian IEEE-754 floats (an optional '\n' may follow).
EmbeddingTable parse_embeddings_binary(std::string_view bytes);
EmbeddingTable load_embeddings(const std::filesystem::path& path, EmbeddingFormat format);

/// Up to K vocabulary words closest to `token` by cosine, excluding the
/// token itself, keeping only cosine >= C. Sorted by cosine descending,
/// ties by word. An out-of-vocabulary token yields [].
std::vector<std::pair<std::string, double>> neighbors(std::string_view token, const EmbeddingTable& table,
                                                      std::size_t K, double C);

}  // namespace qaaug
