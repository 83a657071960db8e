#include <gtest/gtest.h>

#include <random>
#include <set>

#include "qaaug/errors.hpp"
#include "qaaug/subst.hpp"
#include "test_support.hpp"

using namespace qaaug;
using qaaug::testing::make_triple;

namespace {

/// Positions from the snippet's word tokens with hand-made options.
CandidateSet manual_candidates(const Triple& t, const std::vector<std::size_t>& option_counts) {
  auto positions = substitutable_positions(t, {});
  CandidateSet out;
  for (std::size_t i = 0; i < positions.size() && i < option_counts.size(); ++i) {
    auto pos = positions[i];
    for (std::size_t k = 0; k < option_counts[i]; ++k) pos.options.push_back({"r" + std::to_string(i) + std::to_string(k), 1.0});
    out.push_back(pos);
  }
  return out;
}

std::set<std::string> snippets_of(const std::vector<Triple>& ts) {
  std::set<std::string> out;
  for (const auto& t : ts) out.insert(t.snippet);
  return out;
}

Triple nf1_triple() {
  return make_triple("q1_0", "Which gene?", "Neurofibromatosis type 1 is caused by mutations in the NF1 gene.", {"NF1"});
}

std::shared_ptr<const EmbeddingTable> fixture_table() {
  return std::make_shared<EmbeddingTable>(
      load_embeddings(qaaug::testing::fixture_dir() / "embeddings_small.txt", EmbeddingFormat::word2vec_text));
}

}  // namespace

TEST(SpaceSize, ProductMinusOne) {
  const auto t = make_triple("a", "q", "alpha beta gamma X", {"X"});
  EXPECT_EQ(substitution_space_size(manual_candidates(t, {2, 3})).value, 11u);
  EXPECT_EQ(substitution_space_size(manual_candidates(t, {2, 0, 1})).value, 5u);
  EXPECT_EQ(substitution_space_size({}).value, 0u);
}

TEST(SpaceSize, SaturatesInsteadOfOverflowing) {
  CandidateSet big(70);
  for (auto& p : big) p.options = {{"a", 1}, {"b", 1}};
  const auto s = substitution_space_size(big);
  EXPECT_TRUE(s.saturated);
  EXPECT_EQ(s.value, std::numeric_limits<std::uint64_t>::max());
}

TEST(Positions, SkipStopwordsAndAnswerTokens) {
  const auto positions = substitutable_positions(nf1_triple(), default_stopwords());
  std::vector<std::string> words;
  for (const auto& p : positions) words.push_back(p.original);
  EXPECT_EQ(words, (std::vector<std::string>{"Neurofibromatosis", "type", "1", "caused", "mutations", "gene"}));
}

TEST(Generate, FullSpaceEqualsBruteForceEnumeration) {
  const auto t = make_triple("a", "q", "alpha beta gamma delta X", {"X"});
  const auto cands = manual_candidates(t, {1, 2, 0, 3});
  std::set<std::string> expected;
  for (const auto& choice : qaaug::testing::enumerate_choices(cands)) {
    if (std::any_of(choice.begin(), choice.end(), [](auto d) { return d != 0; })) {
      expected.insert(qaaug::testing::splice(t.snippet, cands, choice));
    }
  }
  ASSERT_EQ(expected.size(), 23u);
  SubstConfig config;
  const auto variants = generate_substitutions(t, cands, config, 1000, Method::w2v_subst);
  EXPECT_EQ(variants.size(), 23u);
  EXPECT_EQ(snippets_of(variants), expected);
  for (const auto& v : variants) {
    EXPECT_NO_THROW(validate_triple(v, true));
    EXPECT_EQ(v.provenance.parent_id, "a");
  }
}

TEST(Generate, SamplesAreDistinctSeededSubsets) {
  const auto t = make_triple("a", "q", "alpha beta gamma delta X", {"X"});
  const auto cands = manual_candidates(t, {3, 3, 3, 3});
  SubstConfig config;
  config.seed = 1;
  const auto a = generate_substitutions(t, cands, config, 20, Method::w2v_subst);
  const auto b = generate_substitutions(t, cands, config, 20, Method::w2v_subst);
  config.seed = 2;
  const auto c = generate_substitutions(t, cands, config, 20, Method::w2v_subst);
  EXPECT_EQ(a, b);
  EXPECT_EQ(snippets_of(a).size(), 20u);
  EXPECT_NE(snippets_of(a), snippets_of(c));
  EXPECT_EQ(a[3].id, "a/w2v_subst/3");
}

TEST(Generate, RespectsMaxTokensChanged) {
  const auto t = make_triple("a", "q", "alpha beta gamma delta X", {"X"});
  const auto cands = manual_candidates(t, {2, 2, 2, 2});
  SubstConfig config;
  config.max_tokens_changed = 1;
  const auto variants = generate_substitutions(t, cands, config, 1000, Method::w2v_subst);
  EXPECT_EQ(variants.size(), 8u);
  for (const auto& v : variants) EXPECT_EQ(v.provenance.params.at("changed"), "1");
}

TEST(Generate, LargeSpacesUseRejectionSampling) {
  std::string snippet;
  for (int i = 0; i < 30; ++i) snippet += "w" + std::to_string(i) + " ";
  const auto t = make_triple("big", "q", snippet + "ANSWER", {"ANSWER"});
  const auto cands = manual_candidates(t, std::vector<std::size_t>(30, 3));
  ASSERT_GT(substitution_space_size(cands).value, std::uint64_t{1} << 20);
  SubstConfig config;
  const auto variants = generate_substitutions(t, cands, config, 50, Method::w2v_subst);
  EXPECT_EQ(snippets_of(variants).size(), 50u);
  for (const auto& v : variants) EXPECT_NO_THROW(validate_triple(v, true));
}

TEST(Generate, SpansFollowLengthChanges) {
  const auto t = make_triple("a", "q", "ab cdefgh X and more", {"X"});
  auto cands = substitutable_positions(t, {});
  cands[0].options = {{"longer-word", 1.0}};
  cands[1].options = {{"c", 1.0}};
  const auto v = apply_substitution(t, cands, {1, 1, 0, 0});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->snippet, "longer-word c X and more");
  EXPECT_EQ(v->spans, (std::vector<AnswerSpan>{{14, 15}}));
}

TEST(Candidates, EmbeddingNeighborsAboveFloor) {
  EmbeddingCandidates source(fixture_table());
  SubstConfig config;
  config.K = 2;
  config.C = 0.95;
  const auto cands = source.candidates(nf1_triple(), config);
  std::map<std::string, std::vector<std::string>> options;
  for (const auto& p : cands) {
    for (const auto& o : p.options) options[p.original].push_back(o.word);
  }
  EXPECT_EQ(options["caused"], (std::vector<std::string>{"triggered", "induced"}));
  EXPECT_EQ(options["mutations"], (std::vector<std::string>{"variants", "alterations"}));
  EXPECT_EQ(options["gene"], (std::vector<std::string>{"locus"}));
  EXPECT_EQ(substitution_space_size(cands).value, 17u);
}

TEST(Candidates, MaskedLmKeepsConfidentWholeWords) {
  MaskTable table;
  table["Neurofibromatosis type 1 is [MASK] by mutations in the NF1 gene."] = {
      {"driven", 0.97}, {"##ed", 0.99}, {"caused", 0.99}, {"two words", 0.98}, {"made", 0.5}};
  auto gateway = std::make_shared<Gateway>(std::make_shared<StubProvider>(StubTranslation::identity, table));
  MaskedLmCandidates source(gateway);
  SubstConfig config;
  config.mode = SubstMode::mlm;
  const auto cands = source.candidates(nf1_triple(), config);
  std::size_t total = 0;
  for (const auto& p : cands) {
    total += p.options.size();
    if (p.original == "caused") EXPECT_EQ(p.options, (std::vector<Candidate>{{"driven", 0.97}}));
  }
  EXPECT_EQ(total, 1u);
  EXPECT_EQ(gateway->stats().fill_mask_requests, cands.size());
}

TEST(Quotas, ProportionalAndExact) {
  const std::vector<std::uint64_t> sizes{100, 10, 0, 1};
  const std::vector<std::string> ids{"a", "b", "c", "d"};
  const auto q = allocate_quotas(sizes, ids, 50);
  EXPECT_EQ(std::accumulate(q.begin(), q.end(), std::uint64_t{0}), 50u);
  for (std::size_t i = 0; i < q.size(); ++i) EXPECT_LE(q[i], sizes[i]);
  EXPECT_GT(q[0], q[1]);
  EXPECT_EQ(q[2], 0u);
  const auto all = allocate_quotas(sizes, ids, 1000);
  EXPECT_EQ(all, sizes);
}

TEST(Quotas, RandomizedInvariants) {
  std::mt19937_64 rng(8);
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<std::uint64_t> sizes(1 + rng() % 8);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      sizes[i] = rng() % 20;
      ids.push_back("t" + std::to_string(i));
    }
    const std::uint64_t total = std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
    const std::uint64_t n = rng() % 60;
    const auto q = allocate_quotas(sizes, ids, n);
    ASSERT_EQ(std::accumulate(q.begin(), q.end(), std::uint64_t{0}), std::min(n, total));
    for (std::size_t i = 0; i < q.size(); ++i) ASSERT_LE(q[i], sizes[i]);
  }
}

TEST(Augment, DatasetLevelCountsAndDeterminism) {
  Dataset ds;
  ds.triples.push_back(nf1_triple());
  ds.triples.push_back(make_triple("q0_0", "Which?", "Mutations in the gene caused disease NF1.", {"NF1"}));
  EmbeddingCandidates source(fixture_table());
  SubstConfig config;
  config.K = 2;
  config.C = 0.95;
  config.n_samples = 10;
  config.seed = 4;
  const auto a = augment_substitution(ds, config, source);
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(a.triples.front().provenance.parent_id, "q0_0");
  EXPECT_EQ(a.triples.back().provenance.parent_id, "q1_0");
  config.jobs = 4;
  EXPECT_EQ(augment_substitution(ds, config, source), a);
  config.n_samples = 1000;
  const auto all = augment_substitution(ds, config, source);
  EXPECT_EQ(all.size(), std::stoull(all.meta.at("space_total")));
  EXPECT_EQ(snippets_of(all.triples).size(), all.size());
}

TEST(Augment, ProviderFailuresBeyondRatioFail) {
  class Failing : public TextProvider {
   public:
    std::string translate(const std::string&, const std::string&, const std::string&) override { return {}; }
    std::vector<MaskSuggestion> fill_mask(const std::string&) override { throw ProviderError("down"); }
    std::vector<GeneratedQA> generate_questions(const std::string&, std::size_t) override { return {}; }
  };
  Dataset ds;
  ds.triples.push_back(nf1_triple());
  MaskedLmCandidates source(std::make_shared<Gateway>(std::make_shared<Failing>()));
  SubstConfig config;
  config.mode = SubstMode::mlm;
  config.n_samples = 5;
  EXPECT_THROW(augment_substitution(ds, config, source), ProviderError);
  config.max_failure_ratio = 1.0;
  const auto out = augment_substitution(ds, config, source);
  EXPECT_TRUE(out.empty());
  EXPECT_EQ(out.meta.at("skipped"), "1");
}

TEST(Config, RejectsOutOfRange) {
  SubstConfig c;
  c.C = 0.0;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.K = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.max_tokens_changed = 0;
  EXPECT_THROW(validate(c), ConfigError);
}
