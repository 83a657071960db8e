#include <gtest/gtest.h>

#include <set>

#include "qaaug/errors.hpp"
#include "qaaug/ir.hpp"
#include "test_support.hpp"

using namespace qaaug;
using qaaug::testing::make_triple;

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

CorpusStore fixture_store() {
  CorpusStore store;
  store.ingest(parse_corpus(qaaug::testing::fixture_dir() / "corpus_small.jsonl"));
  store.build_index();
  return store;
}

}  // namespace

TEST(Ir, MatchesBruteForceSentenceScan) {
  const auto store = fixture_store();
  Dataset ds;
  ds.triples.push_back(make_triple("q1_0", "Which gene is mutated in neurofibromatosis type 1?",
                                   "Neurofibromatosis type 1 is caused by mutations in the NF1 gene.", {"NF1"}));
  ds.triples.push_back(make_triple("q2_0", "What enzyme does aspirin inhibit?",
                                   "Aspirin irreversibly inhibits cyclooxygenase in platelets.", {"cyclooxygenase", "COX"}));
  const auto out = augment_ir(ds, store);

  std::vector<std::string> bodies;
  for (const auto& d : store.documents()) bodies.push_back(d.body());
  std::set<std::pair<std::string, std::string>> expected;
  for (const auto& t : ds.triples) {
    const auto scores = qaaug::testing::okapi_scores(bodies, t.question);
    for (const auto& [doc, score] : scores) {
      const auto& doc_id = store.documents()[doc].doc_id;
      for (const auto& s : store.get_sentences(doc_id)) {
        bool has = false;
        for (const auto& a : t.answers) has = has || lower(s.text).find(lower(a)) != std::string::npos;
        if (has && s.text != t.snippet) expected.insert({t.question, s.text});
      }
    }
  }
  std::set<std::pair<std::string, std::string>> got;
  for (const auto& t : out.triples) {
    got.insert({t.question, t.snippet});
    EXPECT_NO_THROW(validate_triple(t, true));
    EXPECT_EQ(t.provenance.method, Method::ir);
  }
  EXPECT_EQ(got.size(), out.size());
  EXPECT_EQ(got, expected);
  EXPECT_FALSE(expected.empty());
}

TEST(Ir, RankAndSourceRecorded) {
  const auto store = fixture_store();
  Dataset ds;
  ds.triples.push_back(make_triple("q1_0", "Which gene is mutated in neurofibromatosis?", "NF1 is a gene.", {"NF1"}));
  const auto out = augment_ir(ds, store, {1, MatchMode::casefold});
  ASSERT_FALSE(out.empty());
  for (const auto& t : out.triples) {
    EXPECT_EQ(t.provenance.params.at("rank"), "1");
    EXPECT_EQ(t.source_doc, t.provenance.params.at("doc_id"));
  }
}

TEST(Ir, SharedQuestionsAreSearchedOnce) {
  const auto store = fixture_store();
  Dataset ds;
  ds.triples.push_back(make_triple("q_0", "Which gene is mutated in neurofibromatosis?", "Gene NF1 here.", {"NF1"}));
  ds.triples.push_back(make_triple("q_1", "Which gene is mutated in neurofibromatosis?", "NF1 there.", {"NF1"}));
  const auto out = augment_ir(ds, store);
  EXPECT_EQ(out.meta.at("questions"), "1");
  std::set<std::string> snippets;
  for (const auto& t : out.triples) EXPECT_TRUE(snippets.insert(t.snippet).second);
}

TEST(Ir, ZeroTopKRejected) {
  const auto store = fixture_store();
  EXPECT_THROW(augment_ir({}, store, {0, MatchMode::casefold}), ConfigError);
}
