#include <gtest/gtest.h>

#include "qaaug/bioasq.hpp"
#include "qaaug/errors.hpp"
#include "test_support.hpp"

using namespace qaaug;

TEST(Bioasq, ParsesAndFlattensAnswers) {
  const auto qs = parse_bioasq(qaaug::testing::fixture_dir() / "bioasq_small.json");
  ASSERT_EQ(qs.size(), 4u);
  EXPECT_EQ(qs[0].answers, (std::vector<std::string>{"NF1", "neurofibromin 1"}));
  EXPECT_EQ(qs[1].answers, (std::vector<std::string>{"cyclooxygenase", "COX"}));
  EXPECT_EQ(qs[0].snippets[0].document, "1001");
}

TEST(Bioasq, ConvertKeepsAnswerBearingFactoidSnippets) {
  const auto qs = parse_bioasq(qaaug::testing::fixture_dir() / "bioasq_small.json");
  const auto ds = convert_bioasq(qs);
  // q1: 2 of 3 snippets, q2: 2, q3 is yes/no, q4: casefold match of BCR-ABL.
  ASSERT_EQ(ds.size(), 5u);
  EXPECT_NO_THROW(validate_dataset(ds));
  EXPECT_EQ(ds.triples[0].id, "q1_0");
  EXPECT_EQ(ds.triples[1].id, "q1_1");
  EXPECT_EQ(ds.triples[1].spans, (std::vector<AnswerSpan>{{8, 23}}));
  EXPECT_EQ(ds.triples[4].source_doc, "4001");
  EXPECT_EQ(ds.meta.at("snippets_dropped"), "1");
  EXPECT_EQ(ds.meta.at("questions_kept"), "3");
  EXPECT_EQ(question_group(ds.triples[0]), "q1");
}

TEST(Bioasq, ExactModeIsCaseSensitive) {
  const auto qs = parse_bioasq(qaaug::testing::fixture_dir() / "bioasq_small.json");
  EXPECT_EQ(convert_bioasq(qs, {"factoid"}, MatchMode::exact).size(), 4u);
}

TEST(Bioasq, MalformedInput) {
  EXPECT_THROW(parse_bioasq_json("{"), ParseError);
  EXPECT_THROW(parse_bioasq_json(R"({"questions":[{"id":"x","body":"b","type":"factoid","snippets":[{}]}]})"),
               ParseError);
  EXPECT_TRUE(parse_bioasq_json(R"({"questions":[]})").empty());
}
