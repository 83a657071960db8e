#include "qaaug/bioasq.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qaaug/errors.hpp"

namespace qaaug {

using json = nlohmann::json;

namespace {

void flatten_answers(const json& node, std::vector<std::string>& out) {
  if (node.is_string()) {
    auto s = node.get<std::string>();
    if (!s.empty() && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  } else if (node.is_array()) {
    for (const auto& child : node) flatten_answers(child, out);
  }
}

std::string pubmed_id(std::string url) {
  while (!url.empty() && url.back() == '/') url.pop_back();
  auto slash = url.rfind('/');
  return slash == std::string::npos ? url : url.substr(slash + 1);
}

}  // namespace

std::vector<BioasqQuestion> parse_bioasq_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed BioASQ JSON: ") + e.what(), 0, e.byte);
  }
  const json* list = &root;
  if (root.is_object()) {
    auto it = root.find("questions");
    if (it == root.end()) throw ParseError("BioASQ JSON has no 'questions' array");
    list = &*it;
  }
  if (!list->is_array()) throw ParseError("BioASQ 'questions' must be an array");

  std::vector<BioasqQuestion> out;
  std::size_t index = 0;
  for (const auto& q : *list) {
    ++index;
    if (!q.is_object()) throw ParseError("question #" + std::to_string(index) + " is not an object");
    BioasqQuestion bq;
    bq.id = q.value("id", "q" + std::to_string(index));
    if (!q.contains("body") || !q["body"].is_string()) {
      throw ParseError("question '" + bq.id + "' has no string 'body'");
    }
    bq.body = q["body"].get<std::string>();
    bq.type = q.value("type", std::string{});
    if (auto it = q.find("exact_answer"); it != q.end()) flatten_answers(*it, bq.answers);
    if (auto it = q.find("snippets"); it != q.end() && it->is_array()) {
      for (const auto& s : *it) {
        if (!s.is_object() || !s.contains("text") || !s["text"].is_string()) {
          throw ParseError("question '" + bq.id + "' has a snippet without 'text'");
        }
        BioasqSnippet snip;
        snip.text = s["text"].get<std::string>();
        if (auto d = s.find("document"); d != s.end() && d->is_string()) snip.document = pubmed_id(d->get<std::string>());
        bq.snippets.push_back(std::move(snip));
      }
    }
    out.push_back(std::move(bq));
  }
  return out;
}

std::vector<BioasqQuestion> parse_bioasq(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open BioASQ file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_bioasq_json(buffer.str());
}

Dataset convert_bioasq(const std::vector<BioasqQuestion>& questions, const std::set<std::string>& keep_types,
                       MatchMode mode) {
  Dataset ds;
  std::size_t kept = 0;
  std::size_t snippets_total = 0;
  std::size_t dropped = 0;
  for (const auto& q : questions) {
    if (!keep_types.contains(q.type)) continue;
    ++kept;
    for (std::size_t i = 0; i < q.snippets.size(); ++i) {
      ++snippets_total;
      const auto& snip = q.snippets[i];
      auto spans = locate_answer(std::string_view(snip.text), q.answers, mode);
      if (spans.empty()) {
        ++dropped;
        continue;
      }
      Triple t;
      t.id = q.id + "_" + std::to_string(i);
      t.question = q.body;
      t.snippet = snip.text;
      t.answers = q.answers;
      t.spans = std::move(spans);
      t.source_doc = snip.document;
      t.provenance.method = Method::original;
      t.provenance.params["group"] = q.id;
      ds.triples.push_back(std::move(t));
    }
  }
  ds.meta["questions_total"] = std::to_string(questions.size());
  ds.meta["questions_kept"] = std::to_string(kept);
  ds.meta["snippets_total"] = std::to_string(snippets_total);
  ds.meta["snippets_dropped"] = std::to_string(dropped);
  ds.meta["triples"] = std::to_string(ds.triples.size());
  return ds;
}

}  // namespace qaaug
