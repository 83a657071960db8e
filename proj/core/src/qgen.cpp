#include "qaaug/qgen.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <unordered_map>

#include "qaaug/errors.hpp"
#include "qaaug/log.hpp"
#include "qaaug/random.hpp"
#include "qaaug/text.hpp"

namespace qaaug {

namespace {

using QuestionSpan = std::tuple<std::string, std::size_t, std::size_t>;

struct Counters {
  std::size_t generated = 0;
  std::size_t deduped = 0;
  std::size_t skipped = 0;
};

/// Valid items for one snippet after the distinct-span and original-pair rules.
std::vector<GeneratedQA> generate_distinct(const std::string& snippet, const std::set<QuestionSpan>& originals,
                                           Gateway& gateway, std::size_t max_per_snippet, Counters& counters) {
  std::vector<GeneratedQA> items;
  try {
    items = gateway.generate_questions(snippet, max_per_snippet);
  } catch (const ProviderError& e) {
    ++counters.skipped;
    log(LogLevel::info, std::string("question generation skipped a snippet: ") + e.what());
    return {};
  }
  counters.generated += items.size();
  std::set<std::pair<std::size_t, std::size_t>> spans;
  std::vector<GeneratedQA> kept;
  for (auto& item : items) {
    const auto span_key = std::make_pair(item.span.start, item.span.end);
    if (!spans.insert(span_key).second ||
        originals.contains({collapse_whitespace(item.question), item.span.start, item.span.end})) {
      ++counters.deduped;
      continue;
    }
    kept.push_back(std::move(item));
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const GeneratedQA& a, const GeneratedQA& b) { return a.span.start < b.span.start; });
  return kept;
}

void finish_meta(Dataset& out, std::size_t snippets, const Counters& c, const Gateway& gateway,
                 std::size_t dropped_before) {
  out.meta["snippets"] = std::to_string(snippets);
  out.meta["generated"] = std::to_string(c.generated);
  out.meta["deduped"] = std::to_string(c.deduped);
  out.meta["skipped"] = std::to_string(c.skipped);
  out.meta["dropped_invalid"] = std::to_string(gateway.stats().dropped_items - dropped_before);
}

}  // namespace

Dataset augment_qg_from_dataset(const Dataset& dataset, Gateway& gateway, std::size_t max_per_snippet) {
  if (max_per_snippet == 0) throw ConfigError("max_per_snippet must be positive");
  std::vector<std::size_t> parents;
  std::unordered_map<std::string, std::size_t> by_snippet;
  std::vector<std::set<QuestionSpan>> originals;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& t = dataset.triples[i];
    auto [it, inserted] = by_snippet.emplace(t.snippet, parents.size());
    if (inserted) {
      parents.push_back(i);
      originals.emplace_back();
    }
    for (const auto& s : t.spans) originals[it->second].insert({collapse_whitespace(t.question), s.start, s.end});
  }

  const auto dropped_before = gateway.stats().dropped_items;
  Counters counters;
  Dataset out;
  for (std::size_t k = 0; k < parents.size(); ++k) {
    const Triple& parent = dataset.triples[parents[k]];
    std::size_t ordinal = 0;
    for (auto& item : generate_distinct(parent.snippet, originals[k], gateway, max_per_snippet, counters)) {
      Triple child = derive_triple(parent, Method::qgen, ordinal++);
      child.question = std::move(item.question);
      child.answers = {std::move(item.answer)};
      child.spans = {item.span};
      child.provenance.params["parent_snippet"] = parent.id;
      out.triples.push_back(std::move(child));
    }
  }
  finish_meta(out, parents.size(), counters, gateway, dropped_before);
  return out;
}

Dataset augment_qg_from_corpus(const CorpusStore& store, Gateway& gateway, std::size_t n_snippets,
                               std::uint64_t seed, std::size_t max_per_snippet) {
  if (store.size() == 0) throw ArgumentError("question generation from corpus needs a non-empty store");
  if (max_per_snippet == 0) throw ConfigError("max_per_snippet must be positive");

  Rng rng(seed);
  std::vector<std::pair<std::size_t, std::size_t>> picks;
  std::set<std::pair<std::size_t, std::size_t>> picked;
  constexpr std::size_t kMaxRedraws = 1000;
  for (std::size_t s = 0; s < n_snippets; ++s) {
    std::size_t redraws = 0;
    while (true) {
      const auto doc = static_cast<std::size_t>(rng.below(store.size()));
      const auto& sentences = store.sentences_at(doc);
      if (!sentences.empty()) {
        const auto sent = static_cast<std::size_t>(rng.below(sentences.size()));
        // A sentence drawn twice is generated once.
        if (picked.insert({doc, sent}).second) picks.emplace_back(doc, sent);
        break;
      }
      if (++redraws > kMaxRedraws) throw ArgumentError("corpus documents have no sentences to sample");
    }
  }

  const auto dropped_before = gateway.stats().dropped_items;
  Counters counters;
  Dataset out;
  for (const auto& [doc, sent] : picks) {
    const auto& sentence = store.sentences_at(doc)[sent];
    const std::string pseudo_parent = "corpus:" + sentence.doc_id + ":" + std::to_string(sent);
    std::size_t ordinal = 0;
    for (auto& item : generate_distinct(sentence.text, {}, gateway, max_per_snippet, counters)) {
      Triple t;
      t.id = derived_id(pseudo_parent, Method::qgen, ordinal++);
      t.question = std::move(item.question);
      t.snippet = sentence.text;
      t.answers = {std::move(item.answer)};
      t.spans = {item.span};
      t.source_doc = sentence.doc_id;
      t.provenance.method = Method::qgen;
      t.provenance.params["group"] = pseudo_parent;
      t.provenance.params["doc_id"] = sentence.doc_id;
      t.provenance.params["sentence"] = std::to_string(sent);
      out.triples.push_back(std::move(t));
    }
  }
  finish_meta(out, picks.size(), counters, gateway, dropped_before);
  return out;
}

}  // namespace qaaug
