#include "qaaug/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "qaaug/errors.hpp"
#include "qaaug/random.hpp"
#include "qaaug/text.hpp"

namespace qaaug {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 9> kMethodNames{{
    {Method::original, "original"},
    {Method::biomrc, "biomrc"},
    {Method::backtranslation, "backtranslation"},
    {Method::ir, "ir"},
    {Method::w2v_subst, "w2v_subst"},
    {Method::mlm_subst, "mlm_subst"},
    {Method::qgen, "qgen"},
    {Method::context, "context"},
    {Method::other, "other"},
}};

const json& require_field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) throw ParseError(std::string("missing field '") + name + "'");
  return *it;
}

std::string require_string(const json& obj, const char* name) {
  const auto& v = require_field(obj, name);
  if (!v.is_string()) throw ParseError(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* name) {
  const auto& v = require_field(obj, name);
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) throw ParseError(std::string("field '") + name + "' must be a string or null");
  return v.get<std::string>();
}

std::size_t as_offset(const json& v) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ParseError("span offsets must be non-negative integers");
  }
  return static_cast<std::size_t>(v.get<std::int64_t>());
}

}  // namespace

std::string_view to_string(Method method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "other";
}

Method method_from_string(std::string_view name) {
  for (const auto& [m, n] : kMethodNames) {
    if (n == name) return m;
  }
  throw ParseError("unknown provenance method '" + std::string(name) + "'");
}

std::string_view to_string(MatchMode mode) { return mode == MatchMode::exact ? "exact" : "casefold"; }

MatchMode match_mode_from_string(std::string_view name) {
  if (name == "exact") return MatchMode::exact;
  if (name == "casefold") return MatchMode::casefold;
  throw ArgumentError("unknown match mode '" + std::string(name) + "' (expected exact or casefold)");
}

std::vector<AnswerSpan> locate_answer(std::u32string_view snippet, const std::vector<std::string>& answers,
                                      MatchMode mode) {
  std::u32string haystack = mode == MatchMode::casefold ? fold_case(snippet) : std::u32string(snippet);
  std::vector<std::u32string> needles;
  for (const auto& a : answers) {
    auto wide = to_u32(a);
    if (wide.empty()) continue;
    needles.push_back(mode == MatchMode::casefold ? fold_case(std::u32string_view(wide)) : std::move(wide));
  }
  std::vector<AnswerSpan> spans;
  if (needles.empty()) return spans;

  std::size_t pos = 0;
  const std::u32string_view hay(haystack);
  while (pos < hay.size()) {
    std::size_t best = 0;
    for (const auto& needle : needles) {
      if (needle.size() > best && hay.substr(pos, needle.size()) == needle) best = needle.size();
    }
    if (best > 0) {
      spans.push_back({pos, pos + best});
      pos += best;
    } else {
      ++pos;
    }
  }
  return spans;
}

std::vector<AnswerSpan> locate_answer(std::string_view snippet, const std::vector<std::string>& answers,
                                      MatchMode mode) {
  const auto wide = to_u32(snippet);
  return locate_answer(std::u32string_view(wide), answers, mode);
}

bool span_matches_answer(std::u32string_view snippet, const AnswerSpan& span,
                         const std::vector<std::string>& answers, MatchMode mode) {
  if (span.start >= span.end || span.end > snippet.size()) return false;
  auto piece = std::u32string(snippet.substr(span.start, span.length()));
  if (mode == MatchMode::casefold) piece = fold_case(std::u32string_view(piece));
  for (const auto& a : answers) {
    auto wide = to_u32(a);
    if (mode == MatchMode::casefold) wide = fold_case(std::u32string_view(wide));
    if (wide == piece) return true;
  }
  return false;
}

void validate_triple(const Triple& triple, bool require_spans) {
  const std::string& id = triple.id;
  if (id.empty()) throw ValidationError("triple with empty id");
  if (triple.provenance.method == Method::original && triple.provenance.parent_id) {
    throw ValidationError("triple '" + id + "': original triples cannot have a parent_id");
  }
  if (require_spans && triple.spans.empty()) throw ValidationError("triple '" + id + "' has no answer spans");
  const auto snippet = to_u32(triple.snippet);
  for (const auto& span : triple.spans) {
    if (!(span.start < span.end && span.end <= snippet.size())) {
      throw ValidationError("triple '" + id + "': span [" + std::to_string(span.start) + ", " +
                            std::to_string(span.end) + ") outside snippet of length " +
                            std::to_string(snippet.size()));
    }
    if (!span_matches_answer(snippet, span, triple.answers, MatchMode::casefold)) {
      throw ValidationError("triple '" + id + "': span [" + std::to_string(span.start) + ", " +
                            std::to_string(span.end) + ") does not match any answer string");
    }
  }
}

void validate_dataset(const Dataset& dataset) {
  std::unordered_set<std::string> ids;
  for (const auto& t : dataset.triples) {
    validate_triple(t);
    if (!ids.insert(t.id).second) throw ValidationError("duplicate triple id '" + t.id + "'");
  }
}

std::string to_json_line(const Triple& triple) {
  ordered_json j;
  j["id"] = triple.id;
  j["question"] = triple.question;
  j["snippet"] = triple.snippet;
  j["answers"] = triple.answers;
  ordered_json spans = ordered_json::array();
  for (const auto& s : triple.spans) spans.push_back({s.start, s.end});
  j["spans"] = std::move(spans);
  j["source_doc"] = triple.source_doc ? ordered_json(*triple.source_doc) : ordered_json(nullptr);
  ordered_json prov;
  prov["method"] = std::string(to_string(triple.provenance.method));
  prov["parent_id"] =
      triple.provenance.parent_id ? ordered_json(*triple.provenance.parent_id) : ordered_json(nullptr);
  prov["params"] = ordered_json::object();
  for (const auto& [k, v] : triple.provenance.params) prov["params"][k] = v;
  j["provenance"] = std::move(prov);
  try {
    return j.dump();
  } catch (const json::type_error& e) {
    throw ValidationError("triple '" + triple.id + "' contains invalid UTF-8: " + e.what());
  }
}

Triple triple_from_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0, e.byte);
  }
  if (!j.is_object()) throw ParseError("record must be a JSON object");

  Triple t;
  t.id = require_string(j, "id");
  t.question = require_string(j, "question");
  t.snippet = require_string(j, "snippet");
  const auto& answers = require_field(j, "answers");
  if (!answers.is_array()) throw ParseError("field 'answers' must be an array");
  for (const auto& a : answers) {
    if (!a.is_string()) throw ParseError("answers must be strings");
    t.answers.push_back(a.get<std::string>());
  }
  const auto& spans = require_field(j, "spans");
  if (!spans.is_array()) throw ParseError("field 'spans' must be an array");
  for (const auto& s : spans) {
    if (!s.is_array() || s.size() != 2) throw ParseError("each span must be a [start, end] pair");
    t.spans.push_back({as_offset(s[0]), as_offset(s[1])});
  }
  t.source_doc = optional_string(j, "source_doc");
  const auto& prov = require_field(j, "provenance");
  if (!prov.is_object()) throw ParseError("field 'provenance' must be an object");
  t.provenance.method = method_from_string(require_string(prov, "method"));
  t.provenance.parent_id = optional_string(prov, "parent_id");
  const auto& params = require_field(prov, "params");
  if (!params.is_object()) throw ParseError("provenance.params must be an object");
  for (const auto& [k, v] : params.items()) {
    if (!v.is_string()) throw ParseError("provenance.params values must be strings");
    t.provenance.params[k] = v.get<std::string>();
  }
  return t;
}

std::string serialize_dataset(const Dataset& dataset) {
  std::string out;
  for (const auto& t : dataset.triples) {
    out += to_json_line(t);
    out.push_back('\n');
  }
  return out;
}

Dataset parse_dataset_text(std::string_view text) {
  Dataset ds;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    Triple t;
    try {
      t = triple_from_json(line);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no, e.offset());
    }
    try {
      validate_triple(t);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(t.id).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate triple id '" + t.id + "'");
    }
    ds.triples.push_back(std::move(t));
  }
  return ds;
}

Dataset parse_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset_text(buffer.str());
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  const std::string text = serialize_dataset(dataset);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string question_group(const Triple& triple) {
  auto it = triple.provenance.params.find("group");
  if (it != triple.provenance.params.end()) return it->second;
  return triple.question;
}

DatasetSplit split_dataset(const Dataset& dataset, std::array<double, 3> fractions, std::uint64_t seed) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw ArgumentError("split fractions must be positive");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ArgumentError("split fractions must sum to 1");

  std::vector<std::string> groups;
  std::unordered_map<std::string, std::size_t> group_index;
  for (const auto& t : dataset.triples) {
    auto key = question_group(t);
    if (group_index.emplace(key, groups.size()).second) groups.push_back(std::move(key));
  }
  const std::size_t n = groups.size();
  if (n < 3) throw ArgumentError("need at least 3 question groups to split, got " + std::to_string(n));

  // Largest-remainder apportionment over groups, then at least one per split.
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double exact = fractions[k] * static_cast<double>(n);
    counts[k] = static_cast<std::size_t>(std::floor(exact));
    remainders[k] = exact - std::floor(exact);
    assigned += counts[k];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t i = 0; assigned < n; i = (i + 1) % 3, ++assigned) ++counts[order[i]];
  for (std::size_t k = 0; k < 3; ++k) {
    if (counts[k] == 0) {
      auto donor = std::max_element(counts.begin(), counts.end());
      --*donor;
      counts[k] = 1;
    }
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(perm);
  std::vector<int> bucket_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    bucket_of[perm[i]] = i < counts[0] ? 0 : (i < counts[0] + counts[1] ? 1 : 2);
  }

  DatasetSplit split;
  std::array<Dataset*, 3> out{&split.train, &split.dev, &split.test};
  for (const auto& t : dataset.triples) {
    out[bucket_of[group_index.at(question_group(t))]]->triples.push_back(t);
  }
  return split;
}

std::string derived_id(std::string_view parent_id, Method method, std::size_t ordinal) {
  std::string id(parent_id);
  id += '/';
  id += to_string(method);
  id += '/';
  id += std::to_string(ordinal);
  return id;
}

Triple derive_triple(const Triple& parent, Method method, std::size_t ordinal) {
  Triple child = parent;
  child.id = derived_id(parent.id, method, ordinal);
  child.provenance = Provenance{};
  child.provenance.method = method;
  child.provenance.parent_id = parent.id;
  child.provenance.params["group"] = question_group(parent);
  return child;
}

}  // namespace qaaug
