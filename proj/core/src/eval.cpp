#include "qaaug/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qaaug/errors.hpp"
#include "qaaug/parallel.hpp"
#include "qaaug/text.hpp"

namespace qaaug {

using json = nlohmann::json;

namespace {

std::vector<std::size_t> selected(const std::vector<double>& probs, double t) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0 && probs[i] >= t) out.push_back(i);
  }
  return out;
}

std::size_t intersection_size(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

std::vector<EvalToken> tokenize_for_eval(std::string_view snippet) {
  const auto wide = to_u32(snippet);
  std::vector<EvalToken> tokens;
  std::size_t i = 0;
  while (i < wide.size()) {
    if (is_space(wide[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (is_alnum(wide[i])) {
      while (j < wide.size() && is_alnum(wide[j])) ++j;
    }
    tokens.push_back({to_utf8(std::u32string_view(wide).substr(i, j - i)), i, j});
    i = j;
  }
  return tokens;
}

void validate(const TokenProbabilities& probs) {
  if (probs.begin.size() != probs.tokens.size() || probs.end.size() != probs.tokens.size()) {
    throw ArgumentError("begin/end probabilities must have one value per token");
  }
  std::size_t last_end = 0;
  for (const auto& t : probs.tokens) {
    if (t.end <= t.start || t.start < last_end) throw ArgumentError("token offsets must be ordered and non-overlapping");
    last_end = t.end;
  }
  auto in_range = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!std::all_of(probs.begin.begin(), probs.begin.end(), in_range) ||
      !std::all_of(probs.end.begin(), probs.end.end(), in_range)) {
    throw ArgumentError("probabilities must lie in [0, 1]");
  }
}

std::vector<std::size_t> decode_spans(const TokenProbabilities& probs, double t) {
  const std::size_t n = probs.tokens.size();
  // partner[b]: nearest j >= b with a positive end probability.
  std::vector<std::size_t> partner(n + 1, n);
  for (std::size_t j = n; j-- > 0;) partner[j] = probs.end[j] > 0.0 ? j : partner[j + 1];
  std::vector<char> marked(n, 0);
  for (auto b : selected(probs.begin, t)) {
    const std::size_t e = partner[b];
    if (e == n || probs.end[e] < t) continue;
    for (std::size_t k = b; k <= e; ++k) marked[k] = 1;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (marked[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> gold_tokens(const std::vector<EvalToken>& tokens, const std::vector<AnswerSpan>& spans) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (const auto& s : spans) {
      if (tokens[i].start < s.end && s.start < tokens[i].end) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

double trapezoid_auc(const std::vector<PrPoint>& points) {
  double auc = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    auc += (points[i].recall - points[i - 1].recall) * (points[i].precision + points[i - 1].precision) / 2.0;
  }
  return auc;
}

PRCurve pr_curve(const TokenProbabilities& probs, const std::vector<std::size_t>& gold,
                 const std::optional<std::vector<double>>& thresholds) {
  validate(probs);
  if (gold.empty()) throw ArgumentError("PR curve needs at least one gold token");
  std::vector<std::size_t> gold_sorted = gold;
  std::sort(gold_sorted.begin(), gold_sorted.end());
  gold_sorted.erase(std::unique(gold_sorted.begin(), gold_sorted.end()), gold_sorted.end());

  std::vector<double> sweep;
  if (thresholds) {
    sweep = *thresholds;
  } else {
    sweep.insert(sweep.end(), probs.begin.begin(), probs.begin.end());
    sweep.insert(sweep.end(), probs.end.begin(), probs.end.end());
    sweep.push_back(0.0);
    sweep.push_back(std::nextafter(1.0, 2.0));
  }
  std::sort(sweep.begin(), sweep.end());
  sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());

  PRCurve curve;
  for (double t : sweep) {
    const auto predicted = decode_spans(probs, t);
    const double hit = static_cast<double>(intersection_size(predicted, gold_sorted));
    const double precision = predicted.empty() ? 1.0 : hit / static_cast<double>(predicted.size());
    const double recall = hit / static_cast<double>(gold_sorted.size());
    curve.points.push_back({recall, precision});
  }
  // Equal recall: higher precision first, which is the order of a
  // descending threshold sweep.
  std::sort(curve.points.begin(), curve.points.end(), [](const PrPoint& a, const PrPoint& b) {
    return a.recall != b.recall ? a.recall < b.recall : a.precision > b.precision;
  });
  curve.points.erase(std::unique(curve.points.begin(), curve.points.end()), curve.points.end());
  curve.auc = trapezoid_auc(curve.points);
  return curve;
}

MacroResult macro_pr_auc(const Dataset& dataset, const Scorer& scorer, unsigned jobs) {
  if (dataset.empty()) throw ArgumentError("cannot evaluate an empty dataset");
  MacroResult result;
  result.per_triple.resize(dataset.size());
  parallel_for(dataset.size(), jobs, [&](std::size_t i) {
    const auto& t = dataset.triples[i];
    const auto probs = scorer(t);
    const auto gold = gold_tokens(probs.tokens, t.spans);
    if (gold.empty()) throw ArgumentError("triple '" + t.id + "' has no gold tokens");
    result.per_triple[i] = {t.id, pr_curve(probs, gold).auc};
  });
  double sum = 0.0;
  for (const auto& [id, auc] : result.per_triple) sum += auc;
  result.macro_auc = sum / static_cast<double>(dataset.size());
  return result;
}

TokenProbabilities lexical_scorer(const Triple& triple) {
  TokenProbabilities probs;
  probs.tokens = tokenize_for_eval(triple.snippet);
  std::set<std::string> question;
  for (const auto& tok : tokenize_for_eval(triple.question)) {
    if (is_alnum(to_u32(tok.text).front())) question.insert(fold_case(std::string_view(tok.text)));
  }
  std::vector<std::string> lowered;
  lowered.reserve(probs.tokens.size());
  for (const auto& tok : probs.tokens) lowered.push_back(fold_case(std::string_view(tok.text)));

  const std::size_t n = probs.tokens.size();
  probs.begin.resize(n);
  probs.end.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> window;
    for (std::size_t k = (i == 0 ? 0 : i - 1); k <= std::min(n - 1, i + 1); ++k) window.insert(lowered[k]);
    std::size_t shared = 0;
    for (const auto& w : window) shared += question.contains(w) ? 1 : 0;
    const std::size_t united = window.size() + question.size() - shared;
    const double score = united == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(united);
    probs.begin[i] = probs.end[i] = std::clamp(score, 0.0, 1.0);
  }
  return probs;
}

std::unordered_map<std::string, TokenProbabilities> parse_predictions_text(std::string_view text) {
  std::unordered_map<std::string, TokenProbabilities> out;
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
    const std::string where = "prediction line " + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where + e.what(), line_no, e.byte);
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("tokens") ||
        !j["tokens"].is_array() || !j.contains("begin") || !j["begin"].is_array() || !j.contains("end") ||
        !j["end"].is_array()) {
      throw ParseError(where + "expected id, tokens, begin and end", line_no);
    }
    TokenProbabilities probs;
    try {
      for (const auto& tok : j["tokens"]) {
        if (!tok.is_array() || tok.size() != 2) throw ParseError(where + "tokens must be [start, end] pairs", line_no);
        probs.tokens.push_back({"", tok[0].get<std::size_t>(), tok[1].get<std::size_t>()});
      }
      probs.begin = j["begin"].get<std::vector<double>>();
      probs.end = j["end"].get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw ParseError(where + e.what(), line_no);
    }
    try {
      validate(probs);
    } catch (const ArgumentError& e) {
      throw ParseError(where + e.what(), line_no);
    }
    const auto id = j["id"].get<std::string>();
    if (!out.emplace(id, std::move(probs)).second) throw ParseError(where + "duplicate id '" + id + "'", line_no);
  }
  return out;
}

std::unordered_map<std::string, TokenProbabilities> parse_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open predictions '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_predictions_text(buffer.str());
}

MacroResult evaluate_predictions(const Dataset& dataset,
                                 const std::unordered_map<std::string, TokenProbabilities>& predictions) {
  for (const auto& t : dataset.triples) {
    if (!predictions.contains(t.id)) throw ValidationError("no prediction for triple '" + t.id + "'");
  }
  return macro_pr_auc(dataset, [&](const Triple& t) {
    auto probs = predictions.at(t.id);
    const auto wide = to_u32(t.snippet);
    for (auto& tok : probs.tokens) {
      if (tok.end > wide.size()) throw ValidationError("prediction for '" + t.id + "' has a token past the snippet");
      tok.text = to_utf8(std::u32string_view(wide).substr(tok.start, tok.end - tok.start));
    }
    return probs;
  });
}

Scorer builtin_scorer(std::string_view name) {
  if (name == "lexical") return lexical_scorer;
  throw ArgumentError("unknown scorer '" + std::string(name) + "' (available: lexical)");
}

}  // namespace qaaug
