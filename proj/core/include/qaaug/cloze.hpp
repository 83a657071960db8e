#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qaaug/dataset.hpp"

namespace qaaug {

/// A cloze-style reading-comprehension record: an article title with one
/// entity replaced by a placeholder, and the article abstract.
struct ClozeRecord {
  std::string record_id;
  std::string cloze_question;
  std::string passage;
  /// Gold entity string first, then any synonyms.
  std::vector<std::string> answers;
  std::vector<std::string> candidates;
};

/// JSON-lines with `record_id`, `cloze_question`, `passage`, `answers`
/// and optional `candidates`.
std::vector<ClozeRecord> parse_cloze_text(std::string_view text);
std::vector<ClozeRecord> parse_cloze(const std::filesystem::path& path);

struct ClozeConfig {
  MatchMode match = MatchMode::casefold;
  /// Recognized placeholder spellings; the question must hold exactly one.
  std::vector<std::string> placeholders{"XXXX", "@placeholder", "[MASK]"};
};

/// One triple per passage sentence containing an answer string, with the
/// placeholder rewritten to [MASK]. Throws ValidationError when the
/// question does not hold exactly one placeholder.
std::vector<Triple> convert_cloze(const ClozeRecord& record, const ClozeConfig& config = {});

/// Converts every record, ordered by (record_id, sentence index).
/// meta: records, records_without_answer, generated.
Dataset convert_cloze_dataset(const std::vector<ClozeRecord>& records, const ClozeConfig& config = {});

/// Uniform sample of n triples without replacement; original order kept.
Dataset sample_dataset(const Dataset& dataset, std::size_t n, std::uint64_t seed);

}  // namespace qaaug
