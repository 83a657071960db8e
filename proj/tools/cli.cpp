#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qaaug/bioasq.hpp"
#include "qaaug/cloze.hpp"
#include "qaaug/corpus.hpp"
#include "qaaug/dataset.hpp"
#include "qaaug/embeddings.hpp"
#include "qaaug/errors.hpp"
#include "qaaug/eval.hpp"
#include "qaaug/log.hpp"
#include "qaaug/parallel.hpp"
#include "qaaug/plan.hpp"
#include "qaaug/provider.hpp"
#include "qaaug/subst.hpp"
#include "qaaug/text.hpp"

namespace qaaug::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Options {
  std::string log_level = "warn";
  unsigned jobs = default_jobs();
  std::optional<std::uint64_t> seed;

  // convert
  std::string input;
  std::string output;
  std::vector<std::string> types{"factoid"};
  std::string match = "casefold";
  std::optional<std::size_t> sample;

  // split
  std::string dataset;
  std::vector<double> fractions{0.8, 0.1, 0.1};
  std::string out_dir;

  // index
  std::vector<std::string> corpus;
  std::string abbreviations;
  double k1 = 1.2;
  double b = 0.75;

  // augment
  std::string plan;
  std::string index_dir;
  std::string embeddings;
  std::string embeddings_format = "word2vec_text";
  std::string cloze;
  std::string provider;
  std::string stub_translation = "identity";
  std::string mask_table;
  std::string cache_dir;
  std::string stopwords;
  int max_retries = 3;
  int max_concurrent = 4;
  int timeout_ms = 30000;

  // evaluate / stats
  std::string scorer;
  std::string predictions;
  std::string format = "text";
};

void run_convert_bioasq(const Options& o) {
  const auto questions = parse_bioasq(o.input);
  const std::set<std::string> types(o.types.begin(), o.types.end());
  const auto ds = convert_bioasq(questions, types, match_mode_from_string(o.match));
  write_dataset(ds, o.output);
  log(LogLevel::info, "converted " + ds.meta.at("questions_kept") + " questions into " + std::to_string(ds.size()) +
                          " triples");
}

void run_convert_biomrc(const Options& o) {
  ClozeConfig config;
  config.match = match_mode_from_string(o.match);
  auto ds = convert_cloze_dataset(parse_cloze(o.input), config);
  if (o.sample) ds = sample_dataset(ds, *o.sample, o.seed.value_or(0));
  write_dataset(ds, o.output);
  log(LogLevel::info, "wrote " + std::to_string(ds.size()) + " cloze triples");
}

void run_split(const Options& o) {
  if (o.fractions.size() != 3) throw ArgumentError("--fractions needs three values (train, dev, test)");
  const auto ds = parse_dataset(o.dataset);
  const auto split = split_dataset(ds, {o.fractions[0], o.fractions[1], o.fractions[2]}, o.seed.value_or(0));
  std::filesystem::create_directories(o.out_dir);
  const std::filesystem::path dir(o.out_dir);
  write_dataset(split.train, dir / "train.jsonl");
  write_dataset(split.dev, dir / "dev.jsonl");
  write_dataset(split.test, dir / "test.jsonl");
}

void run_index(const Options& o) {
  const std::filesystem::path dir(o.out_dir);
  std::optional<SentenceSegmenter> segmenter;
  if (!o.abbreviations.empty()) segmenter = SentenceSegmenter::from_file(o.abbreviations);
  CorpusStore store = std::filesystem::exists(dir / "documents.jsonl")
                          ? CorpusStore::open(dir, segmenter)
                          : CorpusStore(segmenter.value_or(SentenceSegmenter()), Bm25Params{o.k1, o.b});
  for (const auto& path : o.corpus) store.ingest(parse_corpus(path));
  store.build_index();
  store.save(dir);
  log(LogLevel::info, "indexed " + std::to_string(store.size()) + " documents");
}

void run_augment(const Options& o) {
  AugmentPlan plan = load_plan(o.plan);
  if (o.seed) plan.seed = *o.seed;
  const Dataset original = parse_dataset(o.dataset);

  PlanResources resources;
  resources.jobs = o.jobs;
  if (!o.index_dir.empty()) resources.store = std::make_shared<CorpusStore>(CorpusStore::open(o.index_dir));
  if (!o.embeddings.empty()) {
    resources.embeddings = std::make_shared<EmbeddingTable>(
        load_embeddings(o.embeddings, embedding_format_from_string(o.embeddings_format)));
  }
  if (!o.cloze.empty()) resources.cloze_records = std::make_shared<std::vector<ClozeRecord>>(parse_cloze(o.cloze));
  if (!o.stopwords.empty()) resources.stopwords = load_stopwords(o.stopwords);
  if (!o.provider.empty()) {
    ProviderConfig config;
    config.endpoint = o.provider;
    config.max_retries = o.max_retries;
    config.max_concurrent = o.max_concurrent;
    config.timeout = std::chrono::milliseconds(o.timeout_ms);
    if (o.stub_translation == "marker") {
      config.stub_translation = StubTranslation::marker;
    } else if (o.stub_translation != "identity") {
      throw ArgumentError("--stub-translation must be identity or marker");
    }
    if (!o.mask_table.empty()) config.mask_table = o.mask_table;
    if (!o.cache_dir.empty()) {
      config.cache_dir = o.cache_dir;
    } else if (const char* env = std::getenv("QA_AUGMENT_CACHE"); env && *env) {
      config.cache_dir = env;
    }
    if (const char* token = std::getenv("QA_AUGMENT_TOKEN"); token && *token) config.bearer_token = token;
    resources.gateway = make_gateway(config);
  }

  const auto result = execute_plan(plan, original, resources);
  write_outputs(result, o.out_dir);
  for (const auto& step : result.manifest.steps) {
    log(LogLevel::info, step.strategy + ": " + std::to_string(step.output) + " triples");
  }
}

void run_evaluate(const Options& o, std::ostream& out) {
  if (o.scorer.empty() == o.predictions.empty()) throw ArgumentError("give exactly one of --scorer or --predictions");
  const auto ds = parse_dataset(o.dataset);
  const MacroResult result = o.predictions.empty() ? macro_pr_auc(ds, builtin_scorer(o.scorer), o.jobs)
                                                   : evaluate_predictions(ds, parse_predictions(o.predictions));
  if (o.format == "json") {
    ordered_json j;
    j["triples"] = ds.size();
    j["macro_pr_auc"] = result.macro_auc;
    j["tokenizer_version"] = kEvalTokenizerVersion;
    j["per_triple"] = ordered_json::array();
    for (const auto& [id, auc] : result.per_triple) j["per_triple"].push_back({{"id", id}, {"pr_auc", auc}});
    out << j.dump(2) << '\n';
  } else {
    out << "triples\t" << ds.size() << '\n';
    out << "macro_pr_auc\t" << format_number(result.macro_auc) << '\n';
  }
}

void run_stats(const Options& o, std::ostream& out) {
  const auto ds = parse_dataset(o.dataset);
  std::map<std::string, std::size_t> by_method;
  std::size_t artificial = 0;
  for (const auto& t : ds.triples) {
    ++by_method[std::string(to_string(t.provenance.method))];
    if (t.provenance.method != Method::original) ++artificial;
  }
  if (o.format == "json") {
    ordered_json j;
    j["total"] = ds.size();
    j["original"] = ds.size() - artificial;
    j["artificial"] = artificial;
    j["by_method"] = ordered_json::object();
    for (const auto& [method, count] : by_method) j["by_method"][method] = count;
    out << j.dump(2) << '\n';
  } else {
    out << "method\ttriples\n";
    for (const auto& [method, count] : by_method) out << method << '\t' << count << '\n';
    out << "total\t" << ds.size() << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Question-answering training data augmentation", "qa-augment"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));
  app.add_option("--log-level", o.log_level, "debug, info, warn, error or off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));
  app.add_option("--jobs", o.jobs, "Worker threads (default: logical CPUs)")->check(CLI::PositiveNumber);

  auto* convert = app.add_subcommand("convert", "Convert a source corpus into a dataset");
  convert->require_subcommand(1);
  auto* bioasq = convert->add_subcommand("bioasq", "BioASQ training JSON to dataset JSONL");
  bioasq->add_option("--input", o.input, "BioASQ JSON file")->required()->check(CLI::ExistingFile);
  bioasq->add_option("--out", o.output, "Dataset JSONL to write")->required();
  bioasq->add_option("--types", o.types, "Question types to keep")->delimiter(',');
  bioasq->add_option("--match", o.match, "Answer matching")->check(CLI::IsMember({"exact", "casefold"}));
  auto* biomrc = convert->add_subcommand("biomrc", "Cloze records JSONL to dataset JSONL");
  biomrc->add_option("--input", o.input, "Cloze JSONL file")->required()->check(CLI::ExistingFile);
  biomrc->add_option("--out", o.output, "Dataset JSONL to write")->required();
  biomrc->add_option("--match", o.match, "Answer matching")->check(CLI::IsMember({"exact", "casefold"}));
  biomrc->add_option("--sample", o.sample, "Keep a seeded uniform sample of this many triples");
  biomrc->add_option("--seed", o.seed, "Sampling seed");

  auto* split = app.add_subcommand("split", "Question-disjoint train/dev/test split");
  split->add_option("--dataset", o.dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  split->add_option("--fractions", o.fractions, "train,dev,test fractions")->delimiter(',')->expected(3);
  split->add_option("--seed", o.seed, "Shuffle seed");
  split->add_option("--out", o.out_dir, "Output directory")->required();

  auto* index = app.add_subcommand("index", "Build or extend a corpus store");
  index->add_option("--corpus", o.corpus, "Corpus JSONL (repeatable)")->required()->check(CLI::ExistingFile);
  index->add_option("--out", o.out_dir, "Store directory")->required();
  index->add_option("--abbreviations", o.abbreviations, "Sentence guard list")->check(CLI::ExistingFile);
  index->add_option("--k1", o.k1, "BM25 k1");
  index->add_option("--b", o.b, "BM25 b");

  auto* augment = app.add_subcommand("augment", "Run an augmentation plan");
  augment->add_option("--plan", o.plan, "Plan JSON")->required()->check(CLI::ExistingFile);
  augment->add_option("--dataset", o.dataset, "Original dataset JSONL")->required()->check(CLI::ExistingFile);
  augment->add_option("--out", o.out_dir, "Output directory")->required();
  augment->add_option("--seed", o.seed, "Overrides the plan seed");
  augment->add_option("--index", o.index_dir, "Corpus store directory")->check(CLI::ExistingDirectory);
  augment->add_option("--embeddings", o.embeddings, "Word vectors")->check(CLI::ExistingFile);
  augment->add_option("--embeddings-format", o.embeddings_format, "word2vec_text or word2vec_binary")
      ->check(CLI::IsMember({"word2vec_text", "word2vec_binary"}));
  augment->add_option("--cloze", o.cloze, "Cloze records JSONL")->check(CLI::ExistingFile);
  augment->add_option("--provider", o.provider, "\"stub\" or http://host:port[/prefix]");
  augment->add_option("--stub-translation", o.stub_translation, "identity or marker")
      ->check(CLI::IsMember({"identity", "marker"}));
  augment->add_option("--mask-table", o.mask_table, "Stub fill-mask table")->check(CLI::ExistingFile);
  augment->add_option("--cache-dir", o.cache_dir, "Provider response cache (else $QA_AUGMENT_CACHE)");
  augment->add_option("--stopwords", o.stopwords, "Stopword list")->check(CLI::ExistingFile);
  augment->add_option("--max-retries", o.max_retries, "Provider retries")->check(CLI::NonNegativeNumber);
  augment->add_option("--max-concurrent", o.max_concurrent, "Provider requests in flight")
      ->check(CLI::PositiveNumber);
  augment->add_option("--timeout-ms", o.timeout_ms, "Provider request timeout")->check(CLI::PositiveNumber);

  auto* evaluate = app.add_subcommand("evaluate", "Macro token-level PR-AUC");
  evaluate->add_option("--dataset", o.dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  auto* scorer = evaluate->add_option("--scorer", o.scorer, "Built-in scorer")->check(CLI::IsMember({"lexical"}));
  auto* predictions =
      evaluate->add_option("--predictions", o.predictions, "Prediction JSONL")->check(CLI::ExistingFile);
  scorer->excludes(predictions);
  evaluate->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* stats = app.add_subcommand("stats", "Triple counts by provenance");
  stats->add_option("--dataset", o.dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  stats->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    set_log_level(log_level_from_string(o.log_level));
    if (bioasq->parsed()) {
      run_convert_bioasq(o);
    } else if (biomrc->parsed()) {
      run_convert_biomrc(o);
    } else if (split->parsed()) {
      run_split(o);
    } else if (index->parsed()) {
      run_index(o);
    } else if (augment->parsed()) {
      run_augment(o);
    } else if (evaluate->parsed()) {
      run_evaluate(o, out);
    } else if (stats->parsed()) {
      run_stats(o, out);
    }
  } catch (const ArgumentError& e) {
    err << "qa-augment: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "qa-augment: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace qaaug::cli
