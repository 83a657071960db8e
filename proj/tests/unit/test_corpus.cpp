#include <gtest/gtest.h>

#include "qaaug/corpus.hpp"
#include "qaaug/errors.hpp"
#include "test_support.hpp"

using namespace qaaug;
using qaaug::testing::TempDir;

namespace {

std::vector<CorpusDocument> five_docs() {
  return {
      {"d1", "NF1 gene", "The NF1 gene is mutated in neurofibromatosis. NF1 encodes neurofibromin."},
      {"d2", "Aspirin", "Aspirin inhibits cyclooxygenase. It is widely used."},
      {"d3", "", "Neurofibromatosis type 1 patients develop tumours. The gene NF1 is large and the gene is old."},
      {"d4", "Tumour biology", "Tumours grow. Growth signals include RAS."},
      {"d5", "Heart", ""},
  };
}

std::vector<std::string> bodies(const std::vector<CorpusDocument>& docs) {
  std::vector<std::string> out;
  for (const auto& d : docs) out.push_back(d.body());
  return out;
}

}  // namespace

TEST(Bm25, MatchesDirectOkapiFormula) {
  const auto docs = five_docs();
  CorpusStore store;
  store.ingest(docs);
  store.build_index();
  for (const std::string query : {"NF1 gene", "neurofibromatosis tumours", "aspirin", "gene gene NF1", "heart RAS"}) {
    const auto expected = qaaug::testing::okapi_scores(bodies(docs), query);
    const auto hits = store.bm25_search(query, 10);
    ASSERT_EQ(hits.size(), expected.size()) << query;
    for (const auto& h : hits) {
      const std::size_t idx = h.doc_id[1] - '1';
      ASSERT_TRUE(expected.contains(idx));
      EXPECT_NEAR(h.score, expected.at(idx), 1e-9) << query << " " << h.doc_id;
    }
    for (std::size_t i = 1; i < hits.size(); ++i) {
      EXPECT_TRUE(hits[i - 1].score > hits[i].score ||
                  (hits[i - 1].score == hits[i].score && hits[i - 1].doc_id < hits[i].doc_id));
    }
  }
}

TEST(Bm25, TopKTruncatesAndUnknownTermsReturnNothing) {
  CorpusStore store;
  store.ingest(five_docs());
  store.build_index();
  EXPECT_EQ(store.bm25_search("NF1 gene tumours", 2).size(), 2u);
  EXPECT_TRUE(store.bm25_search("zebrafish", 5).empty());
  EXPECT_TRUE(store.bm25_search("", 5).empty());
}

TEST(Bm25, MoreOccurrencesNeverLowerTheScore) {
  // Same length documents, increasing term frequency.
  std::vector<CorpusDocument> docs{{"a", "", "x y z w"}, {"b", "", "x x z w"}, {"c", "", "x x x w"}, {"d", "", "q r s t"}};
  CorpusStore store;
  store.ingest(docs);
  store.build_index();
  const auto hits = store.bm25_search("x", 10);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].doc_id, "c");
  EXPECT_EQ(hits[1].doc_id, "b");
  EXPECT_EQ(hits[2].doc_id, "a");
}

TEST(Bm25, StaleIndexIsAnError) {
  CorpusStore store;
  store.ingest(five_docs());
  EXPECT_THROW(store.bm25_search("NF1", 3), Error);
  store.build_index();
  store.ingest({{"d6", "New", "NF1 again."}});
  EXPECT_FALSE(store.indexed());
  EXPECT_THROW(store.bm25_search("NF1", 3), Error);
}

TEST(Store, IngestRules) {
  CorpusStore store;
  store.ingest(five_docs());
  EXPECT_NO_THROW(store.ingest({five_docs()[0]}));
  EXPECT_EQ(store.size(), 5u);
  EXPECT_THROW(store.ingest({{"d1", "changed", "text"}}), ValidationError);
  EXPECT_THROW(store.ingest({{"x", "a", "b"}, {"x", "a", "b"}}), ValidationError);
  EXPECT_THROW(store.get_document("nope"), NotFoundError);
}

TEST(Store, SentencesCoverTitleAndAbstract) {
  CorpusStore store;
  store.ingest(five_docs());
  const auto& ss = store.get_sentences("d1");
  ASSERT_EQ(ss.size(), 2u);
  EXPECT_EQ(ss[0].text, "NF1 gene The NF1 gene is mutated in neurofibromatosis.");
  EXPECT_EQ(ss[1].text, "NF1 encodes neurofibromin.");
  EXPECT_EQ(ss[1].doc_id, "d1");
}

TEST(Store, SaveAndOpenRoundTrip) {
  TempDir dir;
  CorpusStore store;
  store.ingest(five_docs());
  store.build_index();
  store.save(dir.path());
  const auto reopened = CorpusStore::open(dir.path());
  EXPECT_TRUE(reopened.indexed());
  EXPECT_EQ(reopened.documents(), store.documents());
  const auto a = store.bm25_search("NF1 gene", 5);
  const auto b = reopened.bm25_search("NF1 gene", 5);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].doc_id, b[i].doc_id);
    EXPECT_DOUBLE_EQ(a[i].score, b[i].score);
  }
}

TEST(Store, CorruptIndexRejected) {
  TempDir dir;
  CorpusStore store;
  store.ingest(five_docs());
  store.build_index();
  store.save(dir.path());
  qaaug::testing::write_file(dir / "index.bin", "QAAUGIDX garbage");
  EXPECT_THROW(CorpusStore::open(dir.path()), Error);
  EXPECT_THROW(CorpusStore::open(dir / "missing"), IoError);
}

TEST(Store, ParseCorpusErrors) {
  EXPECT_THROW(parse_corpus_text("{\"doc_id\":1}\n"), ParseError);
  EXPECT_EQ(parse_corpus_text("{\"doc_id\":\"a\",\"title\":\"t\",\"abstract\":\"b\"}\n").size(), 1u);
}
