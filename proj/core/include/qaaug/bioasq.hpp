#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qaaug/dataset.hpp"

namespace qaaug {

struct BioasqSnippet {
  std::string text;
  /// PubMed id of the article the snippet was extracted from.
  std::optional<std::string> document;
};

struct BioasqQuestion {
  std::string id;
  std::string body;
  std::string type;
  /// Gold answer phrasings, flattened and de-duplicated in input order.
  std::vector<std::string> answers;
  std::vector<BioasqSnippet> snippets;
};

/// Reads the BioASQ Task B JSON layout: {"questions": [{"id", "body",
/// "type", "exact_answer", "snippets": [{"text", "document"}]}]}.
/// Document URLs are reduced to their trailing PubMed id.
std::vector<BioasqQuestion> parse_bioasq_json(std::string_view text);
std::vector<BioasqQuestion> parse_bioasq(const std::filesystem::path& path);

/// One triple per (question, snippet) pair whose snippet contains an answer
/// phrasing. Snippets without one are dropped; counts go to `meta`:
/// questions_total, questions_kept, snippets_total, snippets_dropped.
Dataset convert_bioasq(const std::vector<BioasqQuestion>& questions,
                       const std::set<std::string>& keep_types = {"factoid"},
                       MatchMode mode = MatchMode::casefold);

}  // namespace qaaug
