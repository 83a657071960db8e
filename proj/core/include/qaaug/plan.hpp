#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qaaug/cloze.hpp"
#include "qaaug/corpus.hpp"
#include "qaaug/dataset.hpp"
#include "qaaug/embeddings.hpp"
#include "qaaug/provider.hpp"

namespace qaaug {

/// Toolkit version string.
std::string_view version();

enum class Assembly { mixed, staged };

std::string_view to_string(Assembly assembly);
Assembly assembly_from_string(std::string_view name);

/// Which triples a step reads.
enum class StepInput {
  original,     ///< the plan's original dataset
  previous,     ///< the previous step's output (original for the first step)
  accumulated,  ///< the original plus every earlier step's output
};

std::string_view to_string(StepInput input);
StepInput step_input_from_string(std::string_view name);

struct PlanStep {
  std::string strategy;
  /// Strategy settings as a compact JSON object.
  std::string config = "{}";
  std::optional<std::size_t> n_samples;
  StepInput input = StepInput::original;
};

struct AugmentPlan {
  std::vector<PlanStep> steps;
  Assembly assembly = Assembly::mixed;
  std::uint64_t seed = 0;
};

/// Plan file: {"assembly": "mixed"|"staged", "seed": N, "steps": [
/// {"strategy": name, "n_samples": N, "input": ..., "config": {...}}]}.
/// Throws ConfigError on malformed plans.
AugmentPlan parse_plan(std::string_view json_text);
AugmentPlan load_plan(const std::filesystem::path& path);

/// Sorted-key compact JSON; equal plans give equal text.
std::string canonical_json(const AugmentPlan& plan);
std::string plan_hash(const AugmentPlan& plan);

/// Inputs that strategies may need. Absent members are only an error for
/// plans that use a strategy requiring them.
struct PlanResources {
  std::shared_ptr<const CorpusStore> store;
  std::shared_ptr<const EmbeddingTable> embeddings;
  std::shared_ptr<Gateway> gateway;
  std::shared_ptr<const std::vector<ClozeRecord>> cloze_records;
  std::optional<std::set<std::string>> stopwords;
  unsigned jobs = 1;
};

enum class Resource { store, embeddings, gateway, cloze_records };

std::string_view to_string(Resource resource);

struct StepContext {
  const Dataset& input;
  const PlanStep& step;
  std::uint64_t seed;
  const PlanResources& resources;
};

struct StrategyInfo {
  std::set<Resource> needs;
  /// True when the strategy treats n_samples as its own target (and
  /// requires it). Otherwise n_samples caps the output by sampling.
  bool owns_n_samples = false;
  /// Throws ConfigError for a bad step config. Called before any work.
  std::function<void(const PlanStep&)> check;
  std::function<Dataset(const StepContext&)> run;
};

class StrategyRegistry {
 public:
  /// Replaces an existing entry of the same name.
  void add(std::string name, StrategyInfo info);
  const StrategyInfo* find(std::string_view name) const;
  std::vector<std::string> names() const;

  /// w2v, mlm, bt, ir, biomrc, qgen, qgen_corpus, context.
  static const StrategyRegistry& builtin();

 private:
  std::map<std::string, StrategyInfo, std::less<>> entries_;
};

struct StepReport {
  std::string strategy;
  std::string input_mode;
  std::size_t input = 0;
  std::size_t generated = 0;
  std::size_t deduped = 0;
  std::size_t filtered = 0;
  std::size_t output = 0;
  std::size_t skipped = 0;
  std::size_t renamed = 0;
  std::size_t provider_requests = 0;
  std::size_t remote_calls = 0;
  std::size_t cache_hits = 0;
  Params details;  ///< strategy-specific counters
  double seconds = 0.0;
};

struct RunManifest {
  std::string plan_hash;
  std::string version;
  int segmenter_version = 0;
  int eval_tokenizer_version = 0;
  Assembly assembly = Assembly::mixed;
  std::uint64_t seed = 0;
  std::size_t original = 0;
  std::vector<StepReport> steps;
  std::vector<std::pair<std::string, std::size_t>> outputs;  ///< stage name, triple count
  double wall_seconds = 0.0;
};

/// Manifest without timings, so identical runs give identical text.
std::string manifest_json(const RunManifest& manifest);
/// Wall time per step and overall.
std::string timing_json(const RunManifest& manifest);

struct PlanResult {
  /// mixed: {"mixed"}; staged: {"00_original", "01_<strategy>", ...}.
  std::vector<std::pair<std::string, Dataset>> stages;
  RunManifest manifest;
};

/// Runs the steps in order. Unknown strategies, bad step configs and
/// missing resources throw ConfigError before any step runs. Artificial
/// ids that collide with an earlier id get an "@s<step>" suffix.
PlanResult execute_plan(const AugmentPlan& plan, const Dataset& original, const PlanResources& resources,
                        const StrategyRegistry& registry = StrategyRegistry::builtin());

/// Writes every stage as <name>.jsonl plus manifest.json and timing.json.
void write_outputs(const PlanResult& result, const std::filesystem::path& dir);

}  // namespace qaaug
