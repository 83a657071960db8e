#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qaaug/segmenter.hpp"

namespace qaaug {

struct CorpusDocument {
  std::string doc_id;
  std::string title;
  std::string abstract;

  /// Indexed text: title and abstract joined by one space.
  std::string body() const;

  friend bool operator==(const CorpusDocument&, const CorpusDocument&) = default;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct SearchHit {
  std::string doc_id;
  double score = 0.0;
};

/// JSON-lines with `doc_id`, `title`, `abstract`.
std::vector<CorpusDocument> parse_corpus_text(std::string_view text);
std::vector<CorpusDocument> parse_corpus(const std::filesystem::path& path);

/// Okapi BM25 inverted index over lowercased alphanumeric terms.
class Bm25Index {
 public:
  Bm25Index() = default;
  Bm25Index(const std::vector<CorpusDocument>& documents, Bm25Params params);

  /// Documents sharing at least one term with the query, sorted by score
  /// descending then doc_id ascending, at most `top_k` of them.
  std::vector<SearchHit> search(std::string_view query, std::size_t top_k,
                                const std::vector<CorpusDocument>& documents) const;

  std::size_t document_count() const { return doc_lengths_.size(); }
  double average_length() const { return avg_length_; }
  const Bm25Params& params() const { return params_; }

  void save(const std::filesystem::path& path) const;
  static Bm25Index load(const std::filesystem::path& path);

 private:
  struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;
  };

  Bm25Params params_;
  std::vector<std::uint32_t> doc_lengths_;
  double avg_length_ = 0.0;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

/// Document collection with cached sentence segmentation and a BM25 index.
///
/// Ingest and index building need a single writer. Once built, any number
/// of threads may read, search and fetch sentences concurrently.
///
/// On-disk layout (one directory):
///   documents.jsonl  document log, one record per line in ingest order
///   index.bin        BM25 index, "QAAUGIDX" magic + format version;
///                    rebuilt only by an explicit build_index()
class CorpusStore {
 public:
  explicit CorpusStore(SentenceSegmenter segmenter = SentenceSegmenter(), Bm25Params params = {});

  CorpusStore(CorpusStore&&) noexcept;
  CorpusStore& operator=(CorpusStore&&) noexcept;
  ~CorpusStore();

  /// Duplicate ids within `records`, or an existing id with different
  /// content, throw ValidationError. Re-ingesting an identical document is
  /// a no-op.
  void ingest(const std::vector<CorpusDocument>& records);

  std::size_t size() const { return documents_.size(); }
  const std::vector<CorpusDocument>& documents() const { return documents_; }

  /// Throws NotFoundError for unknown ids.
  const CorpusDocument& get_document(std::string_view doc_id) const;
  const std::vector<Sentence>& get_sentences(std::string_view doc_id) const;
  const std::vector<Sentence>& sentences_at(std::size_t doc_index) const;

  void build_index();
  bool indexed() const { return !index_stale_; }

  /// Throws Error when documents were ingested after the last build_index().
  std::vector<SearchHit> bm25_search(std::string_view query, std::size_t top_k) const;

  const Bm25Params& params() const { return params_; }
  const SentenceSegmenter& segmenter() const { return segmenter_; }

  void save(const std::filesystem::path& dir) const;
  /// Loads documents.jsonl and, when present, index.bin. Without an
  /// explicit segmenter the stored abbreviations.txt is used.
  static CorpusStore open(const std::filesystem::path& dir,
                          std::optional<SentenceSegmenter> segmenter = std::nullopt);

 private:
  std::size_t index_of(std::string_view doc_id) const;

  SentenceSegmenter segmenter_;
  Bm25Params params_;
  std::vector<CorpusDocument> documents_;
  std::unordered_map<std::string, std::size_t> by_id_;
  Bm25Index index_;
  bool index_stale_ = false;

  mutable std::unique_ptr<std::shared_mutex> cache_mutex_;
  mutable std::unordered_map<std::size_t, std::vector<Sentence>> sentence_cache_;
};

}  // namespace qaaug
