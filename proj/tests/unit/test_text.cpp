#include <gtest/gtest.h>

#include "qaaug/random.hpp"
#include "qaaug/text.hpp"

using namespace qaaug;

TEST(Utf8, RoundTripsMultibyte) {
  const std::string s = "α-NF1 😀 日本";
  EXPECT_EQ(to_utf8(to_u32(s)), s);
  EXPECT_EQ(cp_length(s), 10u);
  EXPECT_EQ(cp_substr(s, 6, 7), "😀");
}

TEST(Utf8, InvalidBytesBecomeReplacement) {
  const std::string bad = "a\xC3";
  const auto wide = to_u32(bad);
  ASSERT_EQ(wide.size(), 2u);
  EXPECT_EQ(wide[1], U'�');
}

TEST(CaseFold, FoldsAsciiLatinGreekCyrillic) {
  EXPECT_EQ(fold_case(std::string_view("NF1 Gene")), "nf1 gene");
  EXPECT_EQ(fold_case(std::string_view("ÉCOLE")), "école");
  EXPECT_EQ(fold_case(std::string_view("ΔΣ")), "δσ");
  EXPECT_EQ(fold_case(std::string_view("БЕЛОК")), "белок");
}

TEST(Whitespace, Collapses) {
  EXPECT_EQ(collapse_whitespace("  a \t b\n\nc  "), "a b c");
  EXPECT_EQ(collapse_whitespace(""), "");
}

TEST(Numbers, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(std::stod(format_number(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Tokens, IndexTermsAreLowercaseAlnumRuns) {
  const auto terms = index_terms(U"BRCA1-linked, Tumour's");
  std::vector<std::u32string> expected{U"brca1", U"linked", U"tumour", U"s"};
  EXPECT_EQ(terms, expected);
}

TEST(Tokens, WordTokensKeepInternalHyphens) {
  const auto toks = word_tokens(U"anti-tumour agent-");
  ASSERT_EQ(toks.size(), 2u);
  EXPECT_EQ(toks[0].text, U"anti-tumour");
  EXPECT_EQ(toks[0].start, 0u);
  EXPECT_EQ(toks[0].end, 11u);
  EXPECT_EQ(toks[1].text, U"agent");
}

TEST(Random, BelowIsBoundedAndSeeded) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.below(7);
    EXPECT_LT(x, 7u);
    EXPECT_EQ(x, b.below(7));
  }
}

TEST(Random, SampleIndicesDistinctSorted) {
  Rng rng(3);
  for (std::size_t pop : {1u, 5u, 100u, 1000u}) {
    for (std::size_t k : {std::size_t{0}, std::size_t{1}, pop / 2, pop}) {
      const auto s = rng.sample_indices(pop, k);
      ASSERT_EQ(s.size(), k);
      EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
      EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
      if (!s.empty()) EXPECT_LT(s.back(), pop);
    }
  }
}

TEST(Random, HashSeedDependsOnKeyAndSeed) {
  EXPECT_NE(hash_seed(1, "a"), hash_seed(1, "b"));
  EXPECT_NE(hash_seed(1, "a"), hash_seed(2, "a"));
  EXPECT_EQ(hash_seed(9, "x"), hash_seed(9, "x"));
}

TEST(Random, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
