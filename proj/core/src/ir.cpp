#include "qaaug/ir.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "qaaug/errors.hpp"
#include "qaaug/text.hpp"

namespace qaaug {

namespace {

struct QuestionGroup {
  const Triple* parent = nullptr;
  std::vector<std::string> answers;
  std::unordered_set<std::string> gold_snippets;
};

}  // namespace

Dataset augment_ir(const Dataset& dataset, const CorpusStore& store, const IrConfig& config) {
  if (config.top_k == 0) throw ConfigError("top_k must be positive");
  std::vector<QuestionGroup> groups;
  std::unordered_map<std::string, std::size_t> by_question;
  for (const auto& t : dataset.triples) {
    auto [it, inserted] = by_question.emplace(t.question, groups.size());
    if (inserted) groups.push_back({&t, {}, {}});
    auto& g = groups[it->second];
    for (const auto& a : t.answers) {
      if (std::find(g.answers.begin(), g.answers.end(), a) == g.answers.end()) g.answers.push_back(a);
    }
    g.gold_snippets.insert(collapse_whitespace(t.snippet));
  }

  Dataset out;
  std::size_t generated = 0;
  std::size_t deduped = 0;
  for (const auto& g : groups) {
    std::unordered_set<std::string> seen;
    std::size_t ordinal = 0;
    const auto hits = store.bm25_search(g.parent->question, config.top_k);
    for (std::size_t rank = 0; rank < hits.size(); ++rank) {
      for (const auto& sentence : store.get_sentences(hits[rank].doc_id)) {
        auto spans = locate_answer(std::string_view(sentence.text), g.answers, config.match);
        if (spans.empty()) continue;
        ++generated;
        if (g.gold_snippets.contains(collapse_whitespace(sentence.text)) || !seen.insert(sentence.text).second) {
          ++deduped;
          continue;
        }
        Triple child = derive_triple(*g.parent, Method::ir, ordinal++);
        child.snippet = sentence.text;
        child.answers = g.answers;
        child.spans = std::move(spans);
        child.source_doc = sentence.doc_id;
        child.provenance.params["doc_id"] = sentence.doc_id;
        child.provenance.params["rank"] = std::to_string(rank + 1);
        child.provenance.params["sentence"] = std::to_string(sentence.index);
        out.triples.push_back(std::move(child));
      }
    }
  }
  out.meta["questions"] = std::to_string(groups.size());
  out.meta["generated"] = std::to_string(generated);
  out.meta["deduped"] = std::to_string(deduped);
  return out;
}

}  // namespace qaaug
