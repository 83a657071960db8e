#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "qaaug/bioasq.hpp"
#include "qaaug/eval.hpp"
#include "test_support.hpp"

using namespace qaaug;
using qaaug::testing::fixture_dir;
using qaaug::testing::read_file;
using qaaug::testing::TempDir;
using qaaug::testing::write_file;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return (fixture_dir() / name).string(); }

}  // namespace

TEST(Cli, StatsOnEmptyDataset) {
  TempDir dir;
  write_file(dir.path() / "empty.jsonl", "");
  const auto r = run_cli({"stats", "--dataset", (dir.path() / "empty.jsonl").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "method\ttriples\ntotal\t0\n");
}

TEST(Cli, ConvertThenStats) {
  TempDir dir;
  const auto ds = (dir.path() / "ds.jsonl").string();
  auto r = run_cli({"convert", "bioasq", "--input", fixture("bioasq_small.json"), "--out", ds});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_dataset(ds), convert_bioasq(parse_bioasq(fixture_dir() / "bioasq_small.json")));
  r = run_cli({"stats", "--dataset", ds, "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["total"], parse_dataset(ds).size());
  EXPECT_EQ(j["original"], j["total"]);
  EXPECT_EQ(j["artificial"], 0);
}

TEST(Cli, EvaluateMatchesLibrary) {
  TempDir dir;
  const auto ds_path = dir.path() / "ds.jsonl";
  const auto ds = convert_bioasq(parse_bioasq(fixture_dir() / "bioasq_small.json"));
  write_dataset(ds, ds_path);
  const auto expected = macro_pr_auc(ds, builtin_scorer("lexical"), 1);

  auto r = run_cli({"evaluate", "--dataset", ds_path.string(), "--scorer", "lexical", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["macro_pr_auc"].get<double>(), expected.macro_auc);
  EXPECT_EQ(j["triples"], ds.size());
  EXPECT_EQ(j["per_triple"].size(), ds.size());

  r = run_cli({"evaluate", "--dataset", ds_path.string(), "--scorer", "lexical"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("triples\t" + std::to_string(ds.size()) + "\nmacro_pr_auc\t", 0), 0u);
}

TEST(Cli, UsageErrorsExitTwo) {
  TempDir dir;
  write_file(dir.path() / "ds.jsonl", "");
  EXPECT_EQ(run_cli({"augment", "--plan", (dir.path() / "missing.json").string(), "--dataset",
                 (dir.path() / "ds.jsonl").string(), "--out", dir.path().string()})
                .code,
            2);
  EXPECT_EQ(run_cli({"stats", "--dataset", (dir.path() / "ds.jsonl").string(), "--colour"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"evaluate", "--dataset", (dir.path() / "ds.jsonl").string()}).code, 2);
  EXPECT_EQ(run_cli({"--version"}).code, 0);
}

TEST(Cli, InvalidInputExitsOne) {
  TempDir dir;
  write_file(dir.path() / "bad.jsonl", "{not json}\n");
  const auto r = run_cli({"stats", "--dataset", (dir.path() / "bad.jsonl").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, SplitWritesThreeFiles) {
  TempDir dir;
  const auto ds = dir.path() / "ds.jsonl";
  ASSERT_EQ(run_cli({"convert", "bioasq", "--input", fixture("bioasq_small.json"), "--out", ds.string()}).code, 0);
  const auto out = dir.path() / "split";
  const auto r = run_cli({"split", "--dataset", ds.string(), "--fractions", "0.5,0.25,0.25", "--seed", "4", "--out",
                      out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t total = 0;
  for (const char* name : {"train.jsonl", "dev.jsonl", "test.jsonl"}) {
    ASSERT_TRUE(std::filesystem::exists(out / name)) << name;
    total += parse_dataset(out / name).size();
  }
  EXPECT_EQ(total, parse_dataset(ds).size());
}

TEST(Cli, IndexAndAugmentAreDeterministic) {
  TempDir dir;
  const auto ds = dir.path() / "ds.jsonl";
  const auto index = dir.path() / "index";
  ASSERT_EQ(run_cli({"convert", "bioasq", "--input", fixture("bioasq_small.json"), "--out", ds.string()}).code, 0);
  auto r = run_cli({"index", "--corpus", fixture("corpus_small.jsonl"), "--out", index.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"documents.jsonl", "index.bin", "abbreviations.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(index / name)) << name;
  }

  auto augment = [&](const std::string& out, const std::string& jobs) {
    return run_cli({"--jobs", jobs, "augment", "--plan", fixture("plan_mixed.json"), "--dataset", ds.string(), "--out", out,
                "--index", index.string(), "--embeddings", fixture("embeddings_small.txt"), "--provider", "stub",
                "--stub-translation", "marker"});
  };
  const auto a = (dir.path() / "a").string();
  const auto b = (dir.path() / "b").string();
  r = augment(a, "1");
  ASSERT_EQ(r.code, 0) << r.err;
  r = augment(b, "2");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(std::filesystem::path(a) / "mixed.jsonl"), read_file(std::filesystem::path(b) / "mixed.jsonl"));
  EXPECT_EQ(read_file(std::filesystem::path(a) / "manifest.json"),
            read_file(std::filesystem::path(b) / "manifest.json"));
  EXPECT_GT(parse_dataset(std::filesystem::path(a) / "mixed.jsonl").size(), parse_dataset(ds).size());

  // bt without a provider is a configuration error, not a usage error
  r = run_cli({"augment", "--plan", fixture("plan_mixed.json"), "--dataset", ds.string(), "--out", a, "--index",
           index.string(), "--embeddings", fixture("embeddings_small.txt")});
  EXPECT_EQ(r.code, 1);
}
