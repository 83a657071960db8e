#pragma once

#include <cstddef>
#include <cstdint>

#include "qaaug/corpus.hpp"
#include "qaaug/dataset.hpp"
#include "qaaug/provider.hpp"

namespace qaaug {

inline constexpr std::size_t kDefaultQuestionsPerSnippet = 5;

/// Generates new questions for every distinct snippet. Per snippet, only
/// the first item for each distinct (start, end) span is kept, and items
/// repeating an original (question, span) pair are dropped. Provider
/// failures skip the snippet. Ordered by (snippet first appearance, span
/// start). meta: snippets, generated, deduped, skipped, dropped_invalid.
Dataset augment_qg_from_dataset(const Dataset& dataset, Gateway& gateway,
                                std::size_t max_per_snippet = kDefaultQuestionsPerSnippet);

/// Samples n_snippets corpus sentences (a document uniformly, then one of
/// its sentences uniformly) and generates questions for each as above.
/// Throws ArgumentError on an empty store.
Dataset augment_qg_from_corpus(const CorpusStore& store, Gateway& gateway, std::size_t n_snippets,
                               std::uint64_t seed, std::size_t max_per_snippet = kDefaultQuestionsPerSnippet);

}  // namespace qaaug
