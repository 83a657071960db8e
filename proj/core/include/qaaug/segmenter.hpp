#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qaaug {

/// A sentence of a document body. Offsets are code points into the body.
struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// Non-empty, non-comment lines of a one-entry-per-line word list.
std::vector<std::string> parse_word_list(std::string_view text);

/// Rule-based splitter. A boundary follows `.`, `!` or `?` (plus any
/// closing quotes or brackets) when the next non-space character, after at
/// least one whitespace character, is an uppercase letter or a digit. A `.`
/// that ends a guard-list abbreviation never splits.
class SentenceSegmenter {
 public:
  static constexpr int kVersion = 1;

  /// Uses the built-in guard list shipped as data/abbreviations.txt.
  SentenceSegmenter();
  explicit SentenceSegmenter(std::vector<std::string> abbreviations);
  static SentenceSegmenter from_file(const std::filesystem::path& path);

  std::vector<Sentence> segment(std::string_view text, std::string_view doc_id = {}) const;

  const std::vector<std::string>& abbreviations() const { return abbreviations_; }

 private:
  bool guarded(std::u32string_view text, std::size_t period) const;

  std::vector<std::string> abbreviations_;
  std::vector<std::u32string> wide_abbreviations_;
};

/// Segments with the built-in guard list.
std::vector<Sentence> segment_sentences(std::string_view text);

}  // namespace qaaug
