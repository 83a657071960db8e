#include <gtest/gtest.h>

#include "qaaug/segmenter.hpp"
#include "qaaug/text.hpp"

using namespace qaaug;

namespace {

std::vector<std::string> texts(const std::vector<Sentence>& ss) {
  std::vector<std::string> out;
  for (const auto& s : ss) out.push_back(s.text);
  return out;
}

}  // namespace

TEST(Segmenter, SplitsOnTerminalsBeforeCapitals) {
  EXPECT_EQ(texts(segment_sentences("One here. Two there! Three? 4 follows.")),
            (std::vector<std::string>{"One here.", "Two there!", "Three?", "4 follows."}));
}

TEST(Segmenter, NoSplitBeforeLowercase) {
  EXPECT_EQ(segment_sentences("Values were 3.5 mg. and stable.").size(), 1u);
}

TEST(Segmenter, AbbreviationsGuard) {
  EXPECT_EQ(segment_sentences("Smith et al. Reported this. Next one.").size(), 2u);
  EXPECT_EQ(segment_sentences("As shown in Fig. 2 the gene. Done.").size(), 2u);
  EXPECT_EQ(segment_sentences("Treated e.g. Aspirin users. Done.").size(), 2u);
}

TEST(Segmenter, ClosingQuotesAndBrackets) {
  EXPECT_EQ(texts(segment_sentences("He said \"stop.\" Then left. (See above.) Fine.")),
            (std::vector<std::string>{"He said \"stop.\"", "Then left.", "(See above.)", "Fine."}));
}

TEST(Segmenter, OffsetsAreCodePointsIntoTheText) {
  const std::string text = "  Δ is small.  Ω is large. ";
  const auto ss = segment_sentences(text);
  ASSERT_EQ(ss.size(), 2u);
  for (const auto& s : ss) EXPECT_EQ(cp_substr(text, s.start, s.end), s.text);
  EXPECT_EQ(ss[1].start, 15u);
  EXPECT_EQ(ss[1].index, 1u);
}

TEST(Segmenter, EmptyAndWhitespace) {
  EXPECT_TRUE(segment_sentences("").empty());
  EXPECT_TRUE(segment_sentences("   \n ").empty());
}

TEST(Segmenter, CustomGuardList) {
  SentenceSegmenter seg({"approx."});
  EXPECT_EQ(seg.segment("It is approx. Ten. Yes.").size(), 2u);
  EXPECT_EQ(seg.segment("Smith et al. Reported.").size(), 2u);
}

TEST(Segmenter, ParseWordListSkipsComments) {
  EXPECT_EQ(parse_word_list("# header\n\nfoo.\r\n bar. \n"), (std::vector<std::string>{"foo.", "bar."}));
}
