#include "qaaug/cloze.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "qaaug/errors.hpp"
#include "qaaug/provider.hpp"
#include "qaaug/random.hpp"
#include "qaaug/segmenter.hpp"

namespace qaaug {

using json = nlohmann::json;

std::vector<ClozeRecord> parse_cloze_text(std::string_view text) {
  std::vector<ClozeRecord> records;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::string where = "cloze line " + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where + e.what(), line_no, e.byte);
    }
    if (!j.is_object()) throw ParseError(where + "not an object", line_no);
    auto str = [&](const char* name) {
      if (!j.contains(name) || !j[name].is_string()) throw ParseError(where + "missing string '" + name + "'", line_no);
      return j[name].get<std::string>();
    };
    auto strings = [&](const char* name, bool required) {
      std::vector<std::string> out;
      if (!j.contains(name)) {
        if (required) throw ParseError(where + "missing array '" + name + "'", line_no);
        return out;
      }
      if (!j[name].is_array()) throw ParseError(where + "'" + name + "' must be an array", line_no);
      for (const auto& v : j[name]) {
        if (!v.is_string()) throw ParseError(where + "'" + name + "' must hold strings", line_no);
        out.push_back(v.get<std::string>());
      }
      return out;
    };
    ClozeRecord r;
    r.record_id = str("record_id");
    r.cloze_question = str("cloze_question");
    r.passage = str("passage");
    r.answers = strings("answers", true);
    r.candidates = strings("candidates", false);
    if (r.answers.empty()) throw ParseError(where + "'answers' is empty", line_no);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ClozeRecord> parse_cloze(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open cloze file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_cloze_text(buffer.str());
}

std::vector<Triple> convert_cloze(const ClozeRecord& record, const ClozeConfig& config) {
  std::string question = record.cloze_question;
  std::size_t found = 0;
  std::size_t at = std::string::npos;
  const std::string* which = nullptr;
  for (const auto& ph : config.placeholders) {
    for (std::size_t p = question.find(ph); p != std::string::npos; p = question.find(ph, p + ph.size())) {
      ++found;
      at = p;
      which = &ph;
    }
  }
  if (found != 1) {
    throw ValidationError("cloze record '" + record.record_id + "' must contain exactly one placeholder, found " +
                          std::to_string(found));
  }
  question.replace(at, which->size(), kMaskToken);

  std::vector<Triple> out;
  for (const auto& sentence : segment_sentences(record.passage)) {
    auto spans = locate_answer(std::string_view(sentence.text), record.answers, config.match);
    if (spans.empty()) continue;
    Triple t;
    t.id = derived_id(record.record_id, Method::biomrc, out.size());
    t.question = question;
    t.snippet = sentence.text;
    t.answers = record.answers;
    t.spans = std::move(spans);
    t.provenance.method = Method::biomrc;
    t.provenance.params["group"] = record.record_id;
    t.provenance.params["record_id"] = record.record_id;
    t.provenance.params["sentence"] = std::to_string(sentence.index);
    out.push_back(std::move(t));
  }
  return out;
}

Dataset convert_cloze_dataset(const std::vector<ClozeRecord>& records, const ClozeConfig& config) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return records[a].record_id < records[b].record_id; });
  Dataset out;
  std::size_t without = 0;
  for (auto i : order) {
    auto triples = convert_cloze(records[i], config);
    if (triples.empty()) ++without;
    for (auto& t : triples) out.triples.push_back(std::move(t));
  }
  out.meta["records"] = std::to_string(records.size());
  out.meta["records_without_answer"] = std::to_string(without);
  out.meta["generated"] = std::to_string(out.size());
  return out;
}

Dataset sample_dataset(const Dataset& dataset, std::size_t n, std::uint64_t seed) {
  if (n > dataset.size()) {
    throw ArgumentError("cannot sample " + std::to_string(n) + " triples from " + std::to_string(dataset.size()));
  }
  Dataset out;
  out.meta = dataset.meta;
  Rng rng(seed);
  for (auto i : rng.sample_indices(dataset.size(), n)) out.triples.push_back(dataset.triples[i]);
  return out;
}

}  // namespace qaaug
