#pragma once

#include <cstddef>

#include "qaaug/corpus.hpp"
#include "qaaug/dataset.hpp"

namespace qaaug {

struct IrConfig {
  std::size_t top_k = 500;
  MatchMode match = MatchMode::casefold;
};

/// For each distinct question, retrieves the top_k BM25 documents and
/// emits one triple per retrieved sentence that contains a whole gold
/// answer string. Sentences equal to a gold snippet of the question and
/// repeated sentences are dropped. Ordered by (question, doc rank, sentence
/// index). meta: questions, generated, deduped.
Dataset augment_ir(const Dataset& dataset, const CorpusStore& store, const IrConfig& config = {});

}  // namespace qaaug
