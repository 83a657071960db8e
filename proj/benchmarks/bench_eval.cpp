#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qaaug/eval.hpp"

namespace {

qaaug::TokenProbabilities random_probs(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  qaaug::TokenProbabilities p;
  for (std::size_t i = 0; i < n; ++i) {
    p.tokens.push_back({"w", 2 * i, 2 * i + 1});
    p.begin.push_back(unit(rng) < 0.7 ? 0.0 : unit(rng));
    p.end.push_back(unit(rng) < 0.7 ? 0.0 : unit(rng));
  }
  return p;
}

void BM_PrCurve(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto probs = random_probs(n, rng);
  const std::vector<std::size_t> gold = {n / 3, n / 3 + 1, n / 3 + 2};
  for (auto _ : state) benchmark::DoNotOptimize(qaaug::pr_curve(probs, gold).auc);
}
BENCHMARK(BM_PrCurve)->Arg(32)->Arg(128)->Arg(512);

void BM_Decode(benchmark::State& state) {
  std::mt19937_64 rng(6);
  const auto probs = random_probs(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(qaaug::decode_spans(probs, 0.5));
}
BENCHMARK(BM_Decode)->Arg(128)->Arg(512);

}  // namespace
