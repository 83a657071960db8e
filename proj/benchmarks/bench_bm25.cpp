#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "qaaug/corpus.hpp"

namespace {

/// Zipf-ish synthetic abstracts over a fixed vocabulary.
std::vector<qaaug::CorpusDocument> synthetic_corpus(std::size_t docs, std::size_t vocabulary) {
  std::mt19937_64 rng(7);
  std::vector<double> weights(vocabulary);
  for (std::size_t i = 0; i < vocabulary; ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> word(weights.begin(), weights.end());
  std::vector<qaaug::CorpusDocument> out;
  for (std::size_t d = 0; d < docs; ++d) {
    std::string abstract;
    for (int s = 0; s < 8; ++s) {
      for (int w = 0; w < 18; ++w) abstract += (w ? " t" : "T") + std::to_string(word(rng));
      abstract += ". ";
    }
    out.push_back({"d" + std::to_string(d), "Title " + std::to_string(d), abstract});
  }
  return out;
}

void BM_IndexBuild(benchmark::State& state) {
  const auto docs = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 20000);
  for (auto _ : state) {
    qaaug::Bm25Index index(docs, {});
    benchmark::DoNotOptimize(index.document_count());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IndexBuild)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Search(benchmark::State& state) {
  qaaug::CorpusStore store;
  store.ingest(synthetic_corpus(static_cast<std::size_t>(state.range(0)), 20000));
  store.build_index();
  const std::vector<std::string> queries = {"t3 t150 t4000", "t12 t13 t14 t15 t16 t17", "t19999 t1", "t250 t2500"};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(store.bm25_search(queries[i++ % queries.size()], 500));
  }
}
BENCHMARK(BM_Search)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

}  // namespace
