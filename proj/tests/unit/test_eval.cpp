#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qaaug/errors.hpp"
#include "qaaug/eval.hpp"
#include "test_support.hpp"

using namespace qaaug;
using qaaug::testing::make_triple;

namespace {

TokenProbabilities probs_of(std::vector<double> begin, std::vector<double> end) {
  TokenProbabilities p;
  for (std::size_t i = 0; i < begin.size(); ++i) p.tokens.push_back({"t", 2 * i, 2 * i + 1});
  p.begin = std::move(begin);
  p.end = std::move(end);
  return p;
}

std::vector<std::size_t> as_vector(const std::set<std::size_t>& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(EvalTokenizer, WordsAndPunctuation) {
  const auto toks = tokenize_for_eval("NF1 gene.");
  ASSERT_EQ(toks.size(), 3u);
  EXPECT_EQ(toks[0], (EvalToken{"NF1", 0, 3}));
  EXPECT_EQ(toks[1], (EvalToken{"gene", 4, 8}));
  EXPECT_EQ(toks[2], (EvalToken{".", 8, 9}));
  EXPECT_TRUE(tokenize_for_eval("").empty());
  EXPECT_EQ(tokenize_for_eval("α-β"), tokenize_for_eval("α-β"));
  EXPECT_EQ(tokenize_for_eval("α-β").size(), 3u);
}

TEST(Decode, HandExamples) {
  EXPECT_TRUE(decode_spans(probs_of({0, 0, 0}, {0, 0, 0}), 0.5).empty());
  EXPECT_EQ(decode_spans(probs_of({0.9, 0, 0}, {0, 0, 0.9}), 0.5), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_TRUE(decode_spans(probs_of({0, 0.9, 0}, {0.9, 0, 0}), 0.5).empty());
}

TEST(Decode, RaisingTheThresholdNeverGrowsTheSelection) {
  // The nearest end above 0.5 sits at 1; above 0.7 only the far end is left.
  const auto p = probs_of({0.9, 0, 0, 0}, {0, 0.6, 0, 0.9});
  EXPECT_EQ(decode_spans(p, 0.5), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(decode_spans(p, 0.7).empty());
}

TEST(Decode, AntiMonotoneOnRandomDraws) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const auto p = qaaug::testing::random_probs(rng, 1 + rng() % 10);
    double t1 = u(rng), t2 = u(rng);
    if (t1 > t2) std::swap(t1, t2);
    const auto lo = decode_spans(p, t1);
    const auto hi = decode_spans(p, t2);
    ASSERT_TRUE(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));
  }
}

TEST(Decode, MatchesOracle) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto p = qaaug::testing::random_probs(rng, 1 + rng() % 8);
    for (double t : {0.0, 0.3, 0.5, 1.0}) {
      ASSERT_EQ(decode_spans(p, t), as_vector(qaaug::testing::oracle_decode(p.begin, p.end, t)));
    }
  }
}

TEST(GoldTokens, CharacterOverlap) {
  const auto toks = tokenize_for_eval("The NF1-related gene.");
  EXPECT_EQ(gold_tokens(toks, {{4, 7}}), (std::vector<std::size_t>{1}));
  EXPECT_EQ(gold_tokens(toks, {{5, 10}}), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_TRUE(gold_tokens(toks, {}).empty());
}

TEST(PrCurve, PerfectAndAllZero) {
  const auto perfect = pr_curve(probs_of({0, 1, 0, 0, 0}, {0, 0, 1, 0, 0}), {1, 2});
  EXPECT_EQ(perfect.auc, 1.0);
  EXPECT_EQ(perfect.points, (std::vector<PrPoint>{{0, 1}, {1, 1}}));
  const auto zero = pr_curve(probs_of({0, 0, 0}, {0, 0, 0}), {1});
  EXPECT_EQ(zero.auc, 0.0);
  EXPECT_EQ(zero.points, (std::vector<PrPoint>{{0, 1}}));
}

TEST(PrCurve, FiveTokenExampleMatchesOracle) {
  const auto p = probs_of({0.1, 0.8, 0, 0, 0.3}, {0, 0, 0.9, 0, 0.3});
  const auto curve = pr_curve(p, {1, 2});
  EXPECT_NEAR(curve.auc, qaaug::testing::oracle_auc(p.begin, p.end, {1, 2}), 1e-12);
  // t in (0.3, 0.8] finds exactly {1, 2}; lower thresholds add noise tokens.
  EXPECT_EQ(curve.auc, 1.0);
}

TEST(PrCurve, BruteForceEquivalence) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng() % 8;
    const auto p = qaaug::testing::random_probs(rng, n);
    std::set<std::size_t> gold;
    while (gold.empty()) {
      for (std::size_t k = 0; k < n; ++k) {
        if (rng() % 3 == 0) gold.insert(k);
      }
    }
    const auto curve = pr_curve(p, as_vector(gold));
    ASSERT_NEAR(curve.auc, qaaug::testing::oracle_auc(p.begin, p.end, gold), 1e-12);
    ASSERT_GE(curve.auc, 0.0);
    ASSERT_LE(curve.auc, 1.0);
    for (std::size_t k = 1; k < curve.points.size(); ++k) ASSERT_LE(curve.points[k - 1].recall, curve.points[k].recall);
  }
}

TEST(PrCurve, RecallNonIncreasingAlongSweep) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto p = qaaug::testing::random_probs(rng, 6);
    std::set<double> ts(p.begin.begin(), p.begin.end());
    ts.insert(p.end.begin(), p.end.end());
    double last = 2.0;
    for (double t : ts) {
      const auto r = pr_curve(p, {0, 3}, std::vector<double>{t}).points.front().recall;
      ASSERT_LE(r, last);
      last = r;
    }
  }
}

TEST(PrCurve, InvariantUnderMonotoneRescaling) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 200; ++i) {
    auto p = qaaug::testing::random_probs(rng, 7);
    const auto before = pr_curve(p, {2, 3, 4}).auc;
    for (auto* v : {&p.begin, &p.end}) {
      for (auto& x : *v) x = x * x * x;
    }
    ASSERT_NEAR(pr_curve(p, {2, 3, 4}).auc, before, 1e-12);
  }
}

TEST(PrCurve, ErrorsOnEmptyGoldAndBadInput) {
  EXPECT_THROW(pr_curve(probs_of({0.5}, {0.5}), {}), ArgumentError);
  EXPECT_THROW(pr_curve(probs_of({1.5}, {0.5}), {0}), ArgumentError);
  auto p = probs_of({0.5, 0.5}, {0.5});
  EXPECT_THROW(pr_curve(p, {0}), ArgumentError);
}

TEST(Trapezoid, KnownArea) {
  EXPECT_DOUBLE_EQ(trapezoid_auc({{0, 1}, {0.5, 0.5}, {1, 0.5}}), 0.375 + 0.25);
  EXPECT_EQ(trapezoid_auc({}), 0.0);
}

TEST(Macro, MeanOfPerTriple) {
  Dataset ds;
  ds.triples.push_back(make_triple("a", "q", "The NF1 gene.", {"NF1"}));
  ds.triples.push_back(make_triple("b", "q", "The NF1 gene.", {"NF1"}));
  const Scorer scorer = [](const Triple& t) {
    TokenProbabilities p;
    p.tokens = tokenize_for_eval(t.snippet);
    p.begin.assign(p.tokens.size(), 0.0);
    p.end.assign(p.tokens.size(), 0.0);
    if (t.id == "a") p.begin[1] = p.end[1] = 1.0;
    return p;
  };
  const auto r = macro_pr_auc(ds, scorer);
  EXPECT_EQ(r.macro_auc, 0.5);
  EXPECT_EQ(r.per_triple[0], (std::pair<std::string, double>{"a", 1.0}));
  EXPECT_EQ(macro_pr_auc(ds, scorer, 4).macro_auc, 0.5);
  EXPECT_THROW(macro_pr_auc(Dataset{}, scorer), ArgumentError);
}

TEST(Lexical, SharedTokensScorePositive) {
  const auto none = lexical_scorer(make_triple("a", "Which enzyme?", "NF1 is a gene.", {"NF1"}));
  for (double v : none.begin) EXPECT_EQ(v, 0.0);
  const auto some = lexical_scorer(make_triple("a", "Which gene?", "NF1 is a gene.", {"NF1"}));
  EXPECT_GT(some.begin[3], 0.0);
  EXPECT_EQ(some.begin, some.end);
  EXPECT_EQ(some.begin, lexical_scorer(make_triple("a", "Which gene?", "NF1 is a gene.", {"NF1"})).begin);
}

TEST(Lexical, MacroMatchesOracleComposition) {
  Dataset ds;
  ds.triples.push_back(make_triple("a", "Which gene causes neurofibromatosis?", "The NF1 gene causes neurofibromatosis.", {"NF1"}));
  ds.triples.push_back(make_triple("b", "What does aspirin inhibit?", "Aspirin inhibits cyclooxygenase, a key enzyme.", {"cyclooxygenase"}));
  ds.triples.push_back(make_triple("c", "Which kinase?", "Imatinib blocks BCR-ABL kinase activity.", {"BCR-ABL"}));
  double sum = 0.0;
  for (const auto& t : ds.triples) {
    const auto p = lexical_scorer(t);
    const auto gold = gold_tokens(p.tokens, t.spans);
    sum += qaaug::testing::oracle_auc(p.begin, p.end, {gold.begin(), gold.end()});
  }
  EXPECT_NEAR(macro_pr_auc(ds, lexical_scorer).macro_auc, sum / 3.0, 1e-12);
}

TEST(Predictions, FileRoundTripMatchesScorer) {
  Dataset ds;
  ds.triples.push_back(make_triple("a", "Which gene?", "The NF1 gene.", {"NF1"}));
  const auto p = lexical_scorer(ds.triples[0]);
  std::string line = R"({"id":"a","tokens":[)";
  for (std::size_t i = 0; i < p.tokens.size(); ++i) {
    line += (i ? "," : "") + std::string("[") + std::to_string(p.tokens[i].start) + "," + std::to_string(p.tokens[i].end) + "]";
  }
  line += R"(],"begin":[)";
  for (std::size_t i = 0; i < p.begin.size(); ++i) line += (i ? "," : "") + format_number(p.begin[i]);
  line += R"(],"end":[)";
  for (std::size_t i = 0; i < p.end.size(); ++i) line += (i ? "," : "") + format_number(p.end[i]);
  line += "]}\n";
  const auto preds = parse_predictions_text(line);
  EXPECT_EQ(evaluate_predictions(ds, preds).macro_auc, macro_pr_auc(ds, lexical_scorer).macro_auc);
  ds.triples.push_back(make_triple("b", "Which?", "The NF1 gene.", {"NF1"}));
  EXPECT_THROW(evaluate_predictions(ds, preds), ValidationError);
}

TEST(Predictions, MalformedRows) {
  EXPECT_THROW(parse_predictions_text(R"({"id":"a","tokens":[[0,1]],"begin":[0.5]})"), ParseError);
  EXPECT_THROW(parse_predictions_text(R"({"id":"a","tokens":[[0,1]],"begin":[0.5],"end":[2]})"), ParseError);
  EXPECT_THROW(parse_predictions_text("{\"id\":\"a\",\"tokens\":[],\"begin\":[],\"end\":[]}\n"
                                      "{\"id\":\"a\",\"tokens\":[],\"begin\":[],\"end\":[]}\n"),
               ParseError);
  EXPECT_THROW(builtin_scorer("neural"), ArgumentError);
}
