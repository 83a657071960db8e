#include "qaaug/plan.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "qaaug/backtranslate.hpp"
#include "qaaug/context.hpp"
#include "qaaug/errors.hpp"
#include "qaaug/eval.hpp"
#include "qaaug/ir.hpp"
#include "qaaug/log.hpp"
#include "qaaug/qgen.hpp"
#include "qaaug/random.hpp"
#include "qaaug/segmenter.hpp"
#include "qaaug/subst.hpp"

namespace qaaug {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view version() { return QAAUG_VERSION; }

std::string_view to_string(Assembly assembly) { return assembly == Assembly::mixed ? "mixed" : "staged"; }

Assembly assembly_from_string(std::string_view name) {
  if (name == "mixed") return Assembly::mixed;
  if (name == "staged") return Assembly::staged;
  throw ConfigError("unknown assembly '" + std::string(name) + "' (expected mixed or staged)");
}

std::string_view to_string(StepInput input) {
  switch (input) {
    case StepInput::original: return "original";
    case StepInput::previous: return "previous";
    case StepInput::accumulated: return "accumulated";
  }
  return "original";
}

StepInput step_input_from_string(std::string_view name) {
  if (name == "original") return StepInput::original;
  if (name == "previous") return StepInput::previous;
  if (name == "accumulated") return StepInput::accumulated;
  throw ConfigError("unknown step input '" + std::string(name) + "' (expected original, previous or accumulated)");
}

std::string_view to_string(Resource resource) {
  switch (resource) {
    case Resource::store: return "corpus store";
    case Resource::embeddings: return "embeddings";
    case Resource::gateway: return "provider gateway";
    case Resource::cloze_records: return "cloze records";
  }
  return "resource";
}

namespace {

/// Typed access to a JSON object that rejects keys nobody asked for.
class Settings {
 public:
  Settings(const json& object, std::string where) : object_(object), where_(std::move(where)) {
    if (!object_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!object_.contains(key)) return fallback;
    try {
      return object_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + ": bad value for '" + key + "': " + e.what());
    }
  }

  template <typename T>
  std::optional<T> optional(const std::string& key) {
    if (!object_.contains(key)) {
      used_.insert(key);
      return std::nullopt;
    }
    return get<T>(key, T{});
  }

  void finish() const {
    for (const auto& [key, value] : object_.items()) {
      if (!used_.contains(key)) throw ConfigError(where_ + ": unknown setting '" + key + "'");
    }
  }

 private:
  const json& object_;
  std::string where_;
  std::set<std::string> used_;
};

json step_config(const PlanStep& step) {
  try {
    return json::parse(step.config);
  } catch (const json::exception& e) {
    throw ConfigError("step '" + step.strategy + "': config is not valid JSON: " + e.what());
  }
}

SubstConfig subst_config(const PlanStep& step, SubstMode mode) {
  const json j = step_config(step);
  Settings s(j, "step '" + step.strategy + "'");
  SubstConfig c;
  c.mode = mode;
  c.K = s.get<std::size_t>("K", c.K);
  if (mode == SubstMode::w2v) {
    c.C = s.get<double>("C", c.C);
  } else {
    c.P = s.get<double>("P", c.P);
  }
  c.max_tokens_changed = s.optional<std::size_t>("max_tokens_changed");
  c.max_failure_ratio = s.get<double>("max_failure_ratio", c.max_failure_ratio);
  s.finish();
  if (!step.n_samples) throw ConfigError("step '" + step.strategy + "' needs n_samples");
  c.n_samples = *step.n_samples;
  validate(c);
  return c;
}

BtConfig bt_config(const PlanStep& step) {
  const json j = step_config(step);
  Settings s(j, "step '" + step.strategy + "'");
  BtConfig c;
  c.pivots = s.get<std::vector<std::string>>("pivots", c.pivots);
  if (j.contains("targets")) {
    c.targets.clear();
    for (const auto& name : s.get<std::vector<std::string>>("targets", {})) c.targets.push_back(bt_target_from_string(name));
  }
  c.answer_match = match_mode_from_string(s.get<std::string>("answer_match", std::string(to_string(c.answer_match))));
  c.source_language = s.get<std::string>("source_language", c.source_language);
  s.finish();
  validate(c);
  return c;
}

IrConfig ir_config(const PlanStep& step) {
  const json j = step_config(step);
  Settings s(j, "step '" + step.strategy + "'");
  IrConfig c;
  c.top_k = s.get<std::size_t>("top_k", c.top_k);
  c.match = match_mode_from_string(s.get<std::string>("match", std::string(to_string(c.match))));
  s.finish();
  if (c.top_k == 0) throw ConfigError("step 'ir': top_k must be positive");
  return c;
}

ClozeConfig cloze_config(const PlanStep& step) {
  const json j = step_config(step);
  Settings s(j, "step '" + step.strategy + "'");
  ClozeConfig c;
  c.match = match_mode_from_string(s.get<std::string>("match", std::string(to_string(c.match))));
  c.placeholders = s.get<std::vector<std::string>>("placeholders", c.placeholders);
  s.finish();
  if (c.placeholders.empty()) throw ConfigError("step 'biomrc': placeholders must not be empty");
  return c;
}

std::size_t qgen_config(const PlanStep& step, bool needs_samples) {
  const json j = step_config(step);
  Settings s(j, "step '" + step.strategy + "'");
  const auto max_per_snippet = s.get<std::size_t>("max_per_snippet", kDefaultQuestionsPerSnippet);
  s.finish();
  if (max_per_snippet == 0) throw ConfigError("step '" + step.strategy + "': max_per_snippet must be positive");
  if (needs_samples && !step.n_samples) throw ConfigError("step '" + step.strategy + "' needs n_samples");
  return max_per_snippet;
}

ContextConfig context_config(const PlanStep& step) {
  const json j = step_config(step);
  Settings s(j, "step '" + step.strategy + "'");
  ContextConfig c;
  c.Ks = s.get<std::vector<std::size_t>>("Ks", c.Ks);
  c.char_limit = s.get<std::size_t>("char_limit", c.char_limit);
  s.finish();
  if (c.Ks.empty()) throw ConfigError("step 'context': Ks must not be empty");
  for (auto K : c.Ks) {
    if (K == 0) throw ConfigError("step 'context': every K must be positive");
  }
  return c;
}

StrategyRegistry make_builtin() {
  StrategyRegistry r;
  auto subst = [](SubstMode mode) {
    StrategyInfo info;
    info.needs = {mode == SubstMode::w2v ? Resource::embeddings : Resource::gateway};
    info.owns_n_samples = true;
    info.check = [mode](const PlanStep& step) { subst_config(step, mode); };
    info.run = [mode](const StepContext& ctx) {
      SubstConfig c = subst_config(ctx.step, mode);
      c.seed = ctx.seed;
      c.jobs = ctx.resources.jobs;
      if (ctx.resources.stopwords) c.stopwords = *ctx.resources.stopwords;
      if (mode == SubstMode::w2v) {
        EmbeddingCandidates source(ctx.resources.embeddings);
        return augment_substitution(ctx.input, c, source);
      }
      MaskedLmCandidates source(ctx.resources.gateway);
      return augment_substitution(ctx.input, c, source);
    };
    return info;
  };
  r.add("w2v", subst(SubstMode::w2v));
  r.add("mlm", subst(SubstMode::mlm));

  r.add("bt", {{Resource::gateway}, false, [](const PlanStep& step) { bt_config(step); },
               [](const StepContext& ctx) {
                 BtConfig c = bt_config(ctx.step);
                 c.jobs = ctx.resources.jobs;
                 return augment_bt(ctx.input, *ctx.resources.gateway, c);
               }});
  r.add("ir", {{Resource::store}, false, [](const PlanStep& step) { ir_config(step); },
               [](const StepContext& ctx) { return augment_ir(ctx.input, *ctx.resources.store, ir_config(ctx.step)); }});
  r.add("biomrc", {{Resource::cloze_records}, false, [](const PlanStep& step) { cloze_config(step); },
                   [](const StepContext& ctx) {
                     return convert_cloze_dataset(*ctx.resources.cloze_records, cloze_config(ctx.step));
                   }});
  r.add("qgen", {{Resource::gateway}, false, [](const PlanStep& step) { qgen_config(step, false); },
                 [](const StepContext& ctx) {
                   return augment_qg_from_dataset(ctx.input, *ctx.resources.gateway, qgen_config(ctx.step, false));
                 }});
  r.add("qgen_corpus", {{Resource::store, Resource::gateway}, true,
                        [](const PlanStep& step) { qgen_config(step, true); },
                        [](const StepContext& ctx) {
                          const auto max_per_snippet = qgen_config(ctx.step, true);
                          return augment_qg_from_corpus(*ctx.resources.store, *ctx.resources.gateway,
                                                        *ctx.step.n_samples, ctx.seed, max_per_snippet);
                        }});
  r.add("context", {{Resource::store}, false, [](const PlanStep& step) { context_config(step); },
                    [](const StepContext& ctx) {
                      return augment_context(ctx.input, *ctx.resources.store, context_config(ctx.step));
                    }});
  return r;
}

bool has_resource(const PlanResources& r, Resource need) {
  switch (need) {
    case Resource::store: return r.store != nullptr;
    case Resource::embeddings: return r.embeddings != nullptr;
    case Resource::gateway: return r.gateway != nullptr;
    case Resource::cloze_records: return r.cloze_records != nullptr;
  }
  return false;
}

std::size_t meta_count(const Params& meta, const std::string& key, std::size_t fallback = 0) {
  auto it = meta.find(key);
  if (it == meta.end()) return fallback;
  try {
    return static_cast<std::size_t>(std::stoull(it->second));
  } catch (const std::exception&) {
    return fallback;
  }
}

std::string step_name(std::size_t index, const std::string& strategy) {
  std::string n = std::to_string(index);
  if (n.size() < 2) n.insert(0, 2 - n.size(), '0');
  return n + "_" + strategy;
}

json plan_to_json(const AugmentPlan& plan) {
  json j;
  j["assembly"] = std::string(to_string(plan.assembly));
  j["seed"] = plan.seed;
  j["steps"] = json::array();
  for (const auto& step : plan.steps) {
    json s;
    s["strategy"] = step.strategy;
    s["config"] = json::parse(step.config);
    s["input"] = std::string(to_string(step.input));
    if (step.n_samples) s["n_samples"] = *step.n_samples;
    j["steps"].push_back(std::move(s));
  }
  return j;
}

}  // namespace

AugmentPlan parse_plan(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plan is not valid JSON: ") + e.what());
  }
  Settings top(j, "plan");
  AugmentPlan plan;
  plan.assembly = assembly_from_string(top.get<std::string>("assembly", "mixed"));
  plan.seed = top.get<std::uint64_t>("seed", 0);
  const json steps = top.get<json>("steps", json::array());
  top.finish();
  if (!steps.is_array()) throw ConfigError("plan: 'steps' must be an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    Settings s(steps[i], "plan step " + std::to_string(i + 1));
    PlanStep step;
    step.strategy = s.get<std::string>("strategy", "");
    if (step.strategy.empty()) throw ConfigError("plan step " + std::to_string(i + 1) + ": missing strategy");
    if (steps[i].contains("n_samples") && !steps[i]["n_samples"].is_number_unsigned()) {
      throw ConfigError("plan step " + std::to_string(i + 1) + ": n_samples must be a non-negative integer");
    }
    step.n_samples = s.optional<std::size_t>("n_samples");
    step.input = step_input_from_string(s.get<std::string>("input", "original"));
    const json config = s.get<json>("config", json::object());
    if (!config.is_object()) throw ConfigError("plan step " + std::to_string(i + 1) + ": config must be an object");
    step.config = config.dump();
    s.finish();
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

AugmentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open plan '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_plan(buffer.str());
}

std::string canonical_json(const AugmentPlan& plan) { return plan_to_json(plan).dump(); }

std::string plan_hash(const AugmentPlan& plan) { return sha256_hex(canonical_json(plan)); }

void StrategyRegistry::add(std::string name, StrategyInfo info) { entries_[std::move(name)] = std::move(info); }

const StrategyInfo* StrategyRegistry::find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> StrategyRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, info] : entries_) out.push_back(name);
  return out;
}

const StrategyRegistry& StrategyRegistry::builtin() {
  static const StrategyRegistry registry = make_builtin();
  return registry;
}

PlanResult execute_plan(const AugmentPlan& plan, const Dataset& original, const PlanResources& resources,
                        const StrategyRegistry& registry) {
  using Clock = std::chrono::steady_clock;
  const auto run_start = Clock::now();

  std::vector<const StrategyInfo*> infos;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    const std::string where = "step " + std::to_string(i + 1) + " (" + step.strategy + ")";
    const StrategyInfo* info = registry.find(step.strategy);
    if (!info) {
      std::string known;
      for (const auto& n : registry.names()) known += (known.empty() ? "" : ", ") + n;
      throw ConfigError(where + ": unknown strategy (registered: " + known + ")");
    }
    for (auto need : info->needs) {
      if (!has_resource(resources, need)) throw ConfigError(where + ": requires " + std::string(to_string(need)));
    }
    try {
      if (info->check) info->check(step);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
    infos.push_back(info);
  }
  validate_dataset(original);

  PlanResult result;
  RunManifest& m = result.manifest;
  m.plan_hash = plan_hash(plan);
  m.version = std::string(version());
  m.segmenter_version = SentenceSegmenter::kVersion;
  m.eval_tokenizer_version = kEvalTokenizerVersion;
  m.assembly = plan.assembly;
  m.seed = plan.seed;
  m.original = original.size();

  std::unordered_set<std::string> used_ids;
  for (const auto& t : original.triples) used_ids.insert(t.id);

  std::vector<Dataset> outputs;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    const auto step_start = Clock::now();
    const std::uint64_t seed = hash_seed(plan.seed, "step:" + std::to_string(i + 1));

    Dataset accumulated;
    const Dataset* input = &original;
    if (step.input == StepInput::previous && !outputs.empty()) {
      input = &outputs.back();
    } else if (step.input == StepInput::accumulated) {
      accumulated.triples = original.triples;
      for (const auto& o : outputs) accumulated.triples.insert(accumulated.triples.end(), o.triples.begin(), o.triples.end());
      input = &accumulated;
    }

    const GatewayStats before = resources.gateway ? resources.gateway->stats() : GatewayStats{};
    log(LogLevel::info, "running step " + std::to_string(i + 1) + " (" + step.strategy + ") on " +
                            std::to_string(input->size()) + " triples");
    Dataset out = infos[i]->run(StepContext{*input, step, seed, resources});
    const GatewayStats after = resources.gateway ? resources.gateway->stats() : GatewayStats{};

    StepReport report;
    report.strategy = step.strategy;
    report.input_mode = std::string(to_string(step.input));
    report.input = input->size();
    report.details = out.meta;
    report.generated = meta_count(out.meta, "generated", out.size());
    report.deduped = meta_count(out.meta, "deduped");
    report.filtered = meta_count(out.meta, "filtered");
    report.skipped = meta_count(out.meta, "skipped") + meta_count(out.meta, "misses");

    if (!infos[i]->owns_n_samples && step.n_samples && out.size() > *step.n_samples) {
      const std::size_t before_cap = out.size();
      Params meta = out.meta;
      out = sample_dataset(out, *step.n_samples, hash_seed(seed, "cap"));
      out.meta = std::move(meta);
      report.filtered += before_cap - out.size();
    }

    for (auto& t : out.triples) {
      if (used_ids.insert(t.id).second) continue;
      const std::string base = t.id + "@s" + std::to_string(i + 1);
      std::string id = base;
      for (std::size_t k = 2; !used_ids.insert(id).second; ++k) id = base + "." + std::to_string(k);
      t.id = std::move(id);
      ++report.renamed;
    }
    validate_dataset(out);

    report.output = out.size();
    report.provider_requests = (after.translate_requests - before.translate_requests) +
                               (after.fill_mask_requests - before.fill_mask_requests) +
                               (after.qg_requests - before.qg_requests);
    report.remote_calls = after.remote_calls - before.remote_calls;
    report.cache_hits = after.cache_hits - before.cache_hits;
    report.seconds = std::chrono::duration<double>(Clock::now() - step_start).count();
    m.steps.push_back(std::move(report));
    outputs.push_back(std::move(out));
  }

  if (plan.assembly == Assembly::mixed) {
    Dataset mixed;
    mixed.triples = original.triples;
    for (auto& o : outputs) {
      for (auto& t : o.triples) mixed.triples.push_back(std::move(t));
    }
    Rng rng(hash_seed(plan.seed, "mixed"));
    rng.shuffle(mixed.triples);
    result.stages.emplace_back("mixed", std::move(mixed));
  } else {
    result.stages.emplace_back("00_original", original);
    result.stages.back().second.meta.clear();
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      outputs[i].meta.clear();
      result.stages.emplace_back(step_name(i + 1, plan.steps[i].strategy), std::move(outputs[i]));
    }
  }
  for (const auto& [name, ds] : result.stages) m.outputs.emplace_back(name, ds.size());
  m.wall_seconds = std::chrono::duration<double>(Clock::now() - run_start).count();
  return result;
}

std::string manifest_json(const RunManifest& m) {
  ordered_json j;
  j["version"] = m.version;
  j["plan_hash"] = m.plan_hash;
  j["segmenter_version"] = m.segmenter_version;
  j["eval_tokenizer_version"] = m.eval_tokenizer_version;
  j["assembly"] = std::string(to_string(m.assembly));
  j["seed"] = m.seed;
  j["original"] = m.original;
  j["steps"] = ordered_json::array();
  for (const auto& s : m.steps) {
    ordered_json step;
    step["strategy"] = s.strategy;
    step["input_mode"] = s.input_mode;
    step["input"] = s.input;
    step["generated"] = s.generated;
    step["deduped"] = s.deduped;
    step["filtered"] = s.filtered;
    step["output"] = s.output;
    step["skipped"] = s.skipped;
    step["renamed"] = s.renamed;
    step["provider_requests"] = s.provider_requests;
    step["remote_calls"] = s.remote_calls;
    step["cache_hits"] = s.cache_hits;
    step["details"] = s.details;
    j["steps"].push_back(std::move(step));
  }
  j["outputs"] = ordered_json::array();
  for (const auto& [name, count] : m.outputs) j["outputs"].push_back({{"name", name}, {"triples", count}});
  return j.dump(2) + "\n";
}

std::string timing_json(const RunManifest& m) {
  ordered_json j;
  j["wall_seconds"] = m.wall_seconds;
  j["steps"] = ordered_json::array();
  for (const auto& s : m.steps) j["steps"].push_back({{"strategy", s.strategy}, {"seconds", s.seconds}});
  return j.dump(2) + "\n";
}

void write_outputs(const PlanResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  for (const auto& [name, ds] : result.stages) write_dataset(ds, dir / (name + ".jsonl"));
  auto write_text = [&](const std::string& file, const std::string& text) {
    std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + (dir / file).string() + "'");
    out << text;
  };
  write_text("manifest.json", manifest_json(result.manifest));
  write_text("timing.json", timing_json(result.manifest));
}

}  // namespace qaaug
