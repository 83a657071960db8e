#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "qaaug/embeddings.hpp"

namespace {

qaaug::EmbeddingTable random_table(std::size_t words, std::size_t dim) {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> normal;
  std::vector<std::string> vocab;
  std::vector<float> vectors(words * dim);
  for (std::size_t i = 0; i < words; ++i) vocab.push_back("w" + std::to_string(i));
  for (auto& v : vectors) v = normal(rng);
  return qaaug::EmbeddingTable(vocab, vectors, dim);
}

void BM_Neighbors(benchmark::State& state) {
  const auto table = random_table(static_cast<std::size_t>(state.range(0)), 200);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qaaug::neighbors("w" + std::to_string(i++ % table.size()), table, 10, 0.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Neighbors)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
