#include "qaaug/backtranslate.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "qaaug/errors.hpp"
#include "qaaug/log.hpp"
#include "qaaug/parallel.hpp"
#include "qaaug/text.hpp"

namespace qaaug {

namespace {

std::string dedup_key(const Triple& t) {
  return collapse_whitespace(t.question) + '\x1f' + collapse_whitespace(t.snippet);
}

}  // namespace

std::string_view to_string(BtTarget target) { return target == BtTarget::question ? "question" : "snippet"; }

BtTarget bt_target_from_string(std::string_view name) {
  if (name == "question") return BtTarget::question;
  if (name == "snippet") return BtTarget::snippet;
  throw ConfigError("unknown back-translation target '" + std::string(name) + "'");
}

void validate(const BtConfig& config) {
  if (config.pivots.empty()) throw ConfigError("back-translation needs at least one pivot language");
  if (config.targets.empty()) throw ConfigError("back-translation needs at least one target field");
}

BtResult backtranslate_triple(const Triple& triple, const std::string& pivot, BtTarget target, Gateway& gateway,
                              const BtConfig& config, std::size_t ordinal) {
  const std::string& original = target == BtTarget::question ? triple.question : triple.snippet;
  std::string paraphrase;
  try {
    const auto forward = gateway.translate(original, config.source_language, pivot);
    paraphrase = gateway.translate(forward, pivot, config.source_language);
  } catch (const ProviderError& e) {
    log(LogLevel::info, "back-translation skipped for '" + triple.id + "': " + e.what());
    return {std::nullopt, BtStatus::provider_error};
  }

  Triple child = derive_triple(triple, Method::backtranslation, ordinal);
  if (target == BtTarget::question) {
    child.question = std::move(paraphrase);
  } else {
    child.snippet = std::move(paraphrase);
    child.spans = locate_answer(std::string_view(child.snippet), child.answers, config.answer_match);
    if (child.spans.empty()) return {std::nullopt, BtStatus::answer_lost};
  }
  if (dedup_key(child) == dedup_key(triple)) return {std::nullopt, BtStatus::identical};
  child.provenance.params["pivot"] = pivot;
  child.provenance.params["target"] = std::string(to_string(target));
  return {std::move(child), BtStatus::produced};
}

Dataset augment_bt(const Dataset& dataset, Gateway& gateway, const BtConfig& config) {
  validate(config);
  const auto& triples = dataset.triples;
  const std::size_t combos = config.pivots.size() * config.targets.size();
  std::vector<BtResult> results(triples.size() * combos);
  parallel_for(triples.size(), config.jobs, [&](std::size_t i) {
    for (std::size_t p = 0; p < config.pivots.size(); ++p) {
      for (std::size_t k = 0; k < config.targets.size(); ++k) {
        const std::size_t ordinal = p * config.targets.size() + k;
        results[i * combos + ordinal] =
            backtranslate_triple(triples[i], config.pivots[p], config.targets[k], gateway, config, ordinal);
      }
    }
  });

  std::size_t generated = 0, deduped = 0, identical = 0, lost = 0, skipped = 0;
  for (const auto& r : results) {
    switch (r.status) {
      case BtStatus::produced: ++generated; break;
      case BtStatus::identical: ++identical; break;
      case BtStatus::answer_lost: ++lost; break;
      case BtStatus::provider_error: ++skipped; break;
    }
  }
  if (!results.empty() && skipped == results.size()) {
    throw ProviderError("back-translation: every provider request failed");
  }

  std::unordered_set<std::string> seen;
  for (const auto& t : triples) seen.insert(dedup_key(t));
  std::vector<std::size_t> order(triples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return triples[a].id < triples[b].id; });

  Dataset out;
  for (auto i : order) {
    for (std::size_t c = 0; c < combos; ++c) {
      auto& r = results[i * combos + c];
      if (!r.triple) continue;
      if (!seen.insert(dedup_key(*r.triple)).second) {
        ++deduped;
        continue;
      }
      out.triples.push_back(std::move(*r.triple));
    }
  }
  out.meta["generated"] = std::to_string(generated);
  out.meta["deduped"] = std::to_string(deduped);
  out.meta["identical"] = std::to_string(identical);
  out.meta["answer_lost"] = std::to_string(lost);
  out.meta["skipped"] = std::to_string(skipped);
  return out;
}

}  // namespace qaaug
