#include "qaaug/context.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_set>

#include "qaaug/errors.hpp"
#include "qaaug/log.hpp"
#include "qaaug/text.hpp"

namespace qaaug {

std::optional<SnippetAlignment> align_snippet(const Triple& triple, const CorpusStore& store) {
  if (!triple.source_doc) return std::nullopt;
  const CorpusDocument* doc = nullptr;
  try {
    doc = &store.get_document(*triple.source_doc);
  } catch (const NotFoundError&) {
    return std::nullopt;
  }
  const auto body = to_u32(doc->body());
  // Normalized body with a map back to original offsets.
  std::u32string normalized;
  std::vector<std::size_t> origin;
  bool pending_space = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (is_space(body[i])) {
      pending_space = !normalized.empty();
      continue;
    }
    if (pending_space) {
      normalized.push_back(U' ');
      origin.push_back(i - 1);
      pending_space = false;
    }
    normalized.push_back(body[i]);
    origin.push_back(i);
  }
  const auto needle = to_u32(collapse_whitespace(triple.snippet));
  if (needle.empty()) return std::nullopt;
  const auto at = normalized.find(needle);
  if (at == std::u32string::npos) return std::nullopt;

  SnippetAlignment a;
  a.start = origin[at];
  a.end = origin[at + needle.size() - 1] + 1;
  for (const auto& s : store.get_sentences(doc->doc_id)) {
    if (s.end <= a.start) ++a.preceding;
    if (s.start >= a.end) ++a.following;
  }
  return a;
}

std::vector<Triple> extend_context(const Triple& triple, const CorpusStore& store, std::size_t K) {
  std::vector<Triple> out;
  const auto alignment = align_snippet(triple, store);
  if (!alignment) {
    log(LogLevel::info, "context: snippet of '" + triple.id + "' not found in its source document");
    return out;
  }
  const auto& sentences = store.get_sentences(*triple.source_doc);
  std::vector<const Sentence*> before;
  std::vector<const Sentence*> after;
  for (const auto& s : sentences) {
    if (s.end <= alignment->start) before.push_back(&s);
    if (s.start >= alignment->end) after.push_back(&s);
  }

  std::set<std::pair<std::size_t, std::size_t>> taken;
  for (std::size_t k1 = 0; k1 <= K; ++k1) {
    const std::size_t k2 = K - k1;
    const std::size_t use_before = std::min(k1, before.size());
    const std::size_t use_after = std::min(k2, after.size());
    if (use_before == 0 && use_after == 0) continue;
    if (!taken.insert({use_before, use_after}).second) continue;

    std::string prefix;
    for (std::size_t i = before.size() - use_before; i < before.size(); ++i) {
      prefix += before[i]->text;
      prefix += ' ';
    }
    std::string suffix;
    for (std::size_t i = 0; i < use_after; ++i) {
      suffix += ' ';
      suffix += after[i]->text;
    }
    const std::size_t shift = cp_length(prefix);
    Triple child = derive_triple(triple, Method::context, out.size());
    child.snippet = prefix + triple.snippet + suffix;
    for (auto& span : child.spans) {
      span.start += shift;
      span.end += shift;
    }
    auto& params = child.provenance.params;
    params["K"] = std::to_string(K);
    params["k1"] = std::to_string(k1);
    params["k2"] = std::to_string(k2);
    params["k1_used"] = std::to_string(use_before);
    params["k2_used"] = std::to_string(use_after);
    out.push_back(std::move(child));
  }
  return out;
}

Dataset augment_context(const Dataset& dataset, const CorpusStore& store, const ContextConfig& config) {
  std::vector<std::size_t> Ks = config.Ks;
  std::sort(Ks.begin(), Ks.end());
  Ks.erase(std::unique(Ks.begin(), Ks.end()), Ks.end());

  std::unordered_set<std::string> seen;
  auto key = [](const Triple& t) { return t.question + '\x1f' + t.snippet; };
  for (const auto& t : dataset.triples) seen.insert(key(t));

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dataset.triples[a].id < dataset.triples[b].id; });

  Dataset out;
  std::size_t generated = 0, deduped = 0, filtered = 0, misses = 0;
  for (auto i : order) {
    const Triple& parent = dataset.triples[i];
    if (!align_snippet(parent, store)) {
      ++misses;
      continue;
    }
    std::size_t ordinal = 0;
    for (auto K : Ks) {
      for (auto& variant : extend_context(parent, store, K)) {
        ++generated;
        if (cp_length(variant.snippet) > config.char_limit) {
          ++filtered;
          continue;
        }
        if (!seen.insert(key(variant)).second) {
          ++deduped;
          continue;
        }
        variant.id = derived_id(parent.id, Method::context, ordinal++);
        out.triples.push_back(std::move(variant));
      }
    }
  }
  out.meta["generated"] = std::to_string(generated);
  out.meta["deduped"] = std::to_string(deduped);
  out.meta["filtered"] = std::to_string(filtered);
  out.meta["misses"] = std::to_string(misses);
  return out;
}

}  // namespace qaaug
