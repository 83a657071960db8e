#include <gtest/gtest.h>

#include "qaaug/context.hpp"
#include "qaaug/text.hpp"
#include "test_support.hpp"

using namespace qaaug;
using qaaug::testing::make_triple;

namespace {

/// Ten sentences S0..S9; the snippet is S4 and carries the answer.
CorpusStore ten_sentence_store() {
  std::string abstract;
  for (int i = 0; i < 10; ++i) {
    if (i) abstract += ' ';
    abstract += i == 4 ? "Sentence four mentions NF1 here." : "Sentence " + std::to_string(i) + " is filler.";
  }
  CorpusStore store;
  store.ingest({{"doc", "", abstract}});
  return store;
}

Triple interior_triple() {
  return make_triple("q1_0", "Which gene?", "Sentence four mentions NF1 here.", {"NF1"}, "doc");
}

}  // namespace

TEST(Context, AlignsInteriorSnippet) {
  const auto store = ten_sentence_store();
  const auto a = align_snippet(interior_triple(), store);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->preceding, 4u);
  EXPECT_EQ(a->following, 5u);
  auto missing = interior_triple();
  missing.snippet = "Not in the document NF1.";
  EXPECT_FALSE(align_snippet(missing, store));
  missing.source_doc = "nope";
  EXPECT_FALSE(align_snippet(missing, store));
}

TEST(Context, KTwoGivesThreeVariants) {
  const auto store = ten_sentence_store();
  const auto v = extend_context(interior_triple(), store, 2);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].snippet, "Sentence four mentions NF1 here. Sentence 5 is filler. Sentence 6 is filler.");
  EXPECT_EQ(v[1].snippet, "Sentence 3 is filler. Sentence four mentions NF1 here. Sentence 5 is filler.");
  for (const auto& t : v) {
    EXPECT_NO_THROW(validate_triple(t, true));
    EXPECT_EQ(cp_substr(t.snippet, t.spans[0].start, t.spans[0].end), "NF1");
  }
  EXPECT_EQ(v[2].provenance.params.at("k1"), "2");
}

TEST(Context, TwoAndFourGiveEight) {
  const auto store = ten_sentence_store();
  Dataset ds;
  ds.triples.push_back(interior_triple());
  ContextConfig config;
  config.char_limit = 100000;
  const auto out = augment_context(ds, store, config);
  EXPECT_EQ(out.size(), 8u);
  EXPECT_EQ(out.meta.at("generated"), "8");
}

TEST(Context, CharLimitFiltersExactlyTheLongOnes) {
  const auto store = ten_sentence_store();
  Dataset ds;
  ds.triples.push_back(interior_triple());
  ContextConfig config;
  config.char_limit = 100000;
  const auto all = augment_context(ds, store, config);
  config.char_limit = 80;
  const auto kept = augment_context(ds, store, config);
  std::size_t short_ones = 0;
  for (const auto& t : all.triples) short_ones += cp_length(t.snippet) <= 80;
  EXPECT_EQ(kept.size(), short_ones);
  EXPECT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept.meta.at("filtered"), std::to_string(all.size() - short_ones));
}

TEST(Context, TruncatesAtDocumentEdges) {
  CorpusStore store;
  store.ingest({{"doc", "", "First has NF1. Second sentence. Third sentence."}});
  const auto t = make_triple("q", "Which?", "First has NF1.", {"NF1"}, "doc");
  const auto v = extend_context(t, store, 2);
  // Splits (0,2), (1,1) and (2,0) reduce to (0,2), (0,1); (0,0) is dropped.
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].snippet, "First has NF1. Second sentence. Third sentence.");
  EXPECT_EQ(v[1].provenance.params.at("k2_used"), "1");
}

TEST(Context, MissingDocumentsCounted) {
  const auto store = ten_sentence_store();
  Dataset ds;
  auto t = interior_triple();
  t.source_doc = std::nullopt;
  ds.triples.push_back(t);
  const auto out = augment_context(ds, store);
  EXPECT_TRUE(out.empty());
  EXPECT_EQ(out.meta.at("misses"), "1");
}
