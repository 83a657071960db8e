#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qaaug/corpus.hpp"
#include "qaaug/dataset.hpp"

namespace qaaug {

/// Where a snippet sits in its source document body.
struct SnippetAlignment {
  std::size_t start = 0;  ///< code points into the body
  std::size_t end = 0;
  std::size_t preceding = 0;  ///< whole sentences before the snippet
  std::size_t following = 0;  ///< whole sentences after it
};

/// Whitespace-normalized search for the snippet in its source document.
/// Returns nullopt when the document is unknown or the snippet is absent.
std::optional<SnippetAlignment> align_snippet(const Triple& triple, const CorpusStore& store);

/// For every split K = k1 + k2, surrounds the snippet with up to k1
/// preceding and k2 following sentences of its source document, joined by
/// single spaces, and shifts the spans. Splits that run past the document
/// edge are truncated; repeated results and the unchanged snippet are
/// dropped. Params record K, k1, k2 and the counts actually used.
std::vector<Triple> extend_context(const Triple& triple, const CorpusStore& store, std::size_t K);

struct ContextConfig {
  std::vector<std::size_t> Ks{2, 4};
  /// Variants longer than this many code points are removed.
  std::size_t char_limit = 500;
};

/// Union of extend_context over Ks, length-filtered, deduplicated on
/// (question, snippet) against originals and each other. Ordered by
/// (parent id, K, k1). meta: generated, deduped, filtered, misses.
Dataset augment_context(const Dataset& dataset, const CorpusStore& store, const ContextConfig& config = {});

}  // namespace qaaug
