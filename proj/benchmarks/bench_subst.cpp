#include <benchmark/benchmark.h>

#include <string>

#include "qaaug/subst.hpp"
#include "qaaug/text.hpp"

namespace {

/// A 20-token snippet with `k` options on every non-answer token.
std::pair<qaaug::Triple, qaaug::CandidateSet> instance(std::size_t k) {
  qaaug::Triple t;
  t.id = "b";
  t.question = "q";
  for (int i = 0; i < 19; ++i) t.snippet += "token" + std::to_string(i) + " ";
  t.snippet += "ANSWER";
  t.answers = {"ANSWER"};
  t.spans = qaaug::locate_answer(std::string_view(t.snippet), t.answers, qaaug::MatchMode::exact);
  auto cands = qaaug::substitutable_positions(t, {});
  for (auto& p : cands) {
    for (std::size_t j = 0; j < k; ++j) p.options.push_back({"alt" + std::to_string(j), 1.0});
  }
  return {t, cands};
}

void BM_GenerateSubstitutions(benchmark::State& state) {
  const auto [t, cands] = instance(static_cast<std::size_t>(state.range(0)));
  qaaug::SubstConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qaaug::generate_substitutions(t, cands, config, 100, qaaug::Method::w2v_subst));
  }
}
BENCHMARK(BM_GenerateSubstitutions)->Arg(1)->Arg(3)->Arg(10);

}  // namespace
