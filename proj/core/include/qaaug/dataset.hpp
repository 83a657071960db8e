#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qaaug {

/// Half-open code-point range [start, end) into a snippet.
struct AnswerSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend auto operator<=>(const AnswerSpan&, const AnswerSpan&) = default;
};

enum class Method { original, biomrc, backtranslation, ir, w2v_subst, mlm_subst, qgen, context, other };

std::string_view to_string(Method method);
/// Throws ParseError for unknown names.
Method method_from_string(std::string_view name);

using Params = std::map<std::string, std::string>;

struct Provenance {
  Method method = Method::original;
  std::optional<std::string> parent_id;
  Params params;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Triple {
  std::string id;
  std::string question;
  std::string snippet;
  std::vector<std::string> answers;
  std::vector<AnswerSpan> spans;
  std::optional<std::string> source_doc;
  Provenance provenance;

  friend bool operator==(const Triple&, const Triple&) = default;
};

/// Ordered triples plus free-form run annotations. `meta` is in-memory
/// only: it is not part of the on-disk record format and does not take
/// part in equality.
struct Dataset {
  std::vector<Triple> triples;
  Params meta;

  std::size_t size() const { return triples.size(); }
  bool empty() const { return triples.empty(); }

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.triples == b.triples; }
};

enum class MatchMode { exact, casefold };

std::string_view to_string(MatchMode mode);
MatchMode match_mode_from_string(std::string_view name);

/// All non-overlapping occurrences of any answer string, scanning left to
/// right and taking the longest answer that matches at each position.
/// Sorted by start; empty when nothing matches.
std::vector<AnswerSpan> locate_answer(std::string_view snippet, const std::vector<std::string>& answers,
                                      MatchMode mode = MatchMode::casefold);
std::vector<AnswerSpan> locate_answer(std::u32string_view snippet, const std::vector<std::string>& answers,
                                      MatchMode mode = MatchMode::casefold);

/// True when snippet[span] equals one of `answers` under `mode`.
bool span_matches_answer(std::u32string_view snippet, const AnswerSpan& span,
                         const std::vector<std::string>& answers, MatchMode mode = MatchMode::casefold);

/// Throws ValidationError naming the triple id on any invariant violation.
/// Spans are checked under case folding, which accepts both match modes.
void validate_triple(const Triple& triple, bool require_spans = false);

/// Validates every triple and id uniqueness.
void validate_dataset(const Dataset& dataset);

/// One compact JSON object, fields in canonical order, no trailing newline.
std::string to_json_line(const Triple& triple);
/// Throws ParseError (line number 0) on malformed input.
Triple triple_from_json(std::string_view line);

std::string serialize_dataset(const Dataset& dataset);
Dataset parse_dataset_text(std::string_view text);

/// JSON-lines reader. Errors carry the 1-based line number.
Dataset parse_dataset(const std::filesystem::path& path);
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Key shared by all triples derived from one source question. Uses
/// provenance param "group" when present, else the question text.
std::string question_group(const Triple& triple);

struct DatasetSplit {
  Dataset train;
  Dataset dev;
  Dataset test;
};

/// Question-disjoint split. Fractions must be positive and sum to 1.
DatasetSplit split_dataset(const Dataset& dataset, std::array<double, 3> fractions, std::uint64_t seed);

/// Id for an artificial triple: parent/method/ordinal.
std::string derived_id(std::string_view parent_id, Method method, std::size_t ordinal);

/// Copy of `parent` re-labelled as an artificial child: derived id,
/// provenance method and parent, and the parent's question group.
Triple derive_triple(const Triple& parent, Method method, std::size_t ordinal);

}  // namespace qaaug
