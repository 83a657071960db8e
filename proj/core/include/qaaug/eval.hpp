#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qaaug/dataset.hpp"

namespace qaaug {

inline constexpr int kEvalTokenizerVersion = 1;

struct EvalToken {
  std::string text;
  std::size_t start = 0;  ///< code points
  std::size_t end = 0;

  friend bool operator==(const EvalToken&, const EvalToken&) = default;
};

/// Alphanumeric runs are tokens; every other non-space character is a
/// token of its own.
std::vector<EvalToken> tokenize_for_eval(std::string_view snippet);

/// Per-token begin/end probabilities for one snippet.
struct TokenProbabilities {
  std::vector<EvalToken> tokens;
  std::vector<double> begin;
  std::vector<double> end;
};

/// Throws ArgumentError on length mismatch, out-of-order tokens or
/// probabilities outside [0, 1].
void validate(const TokenProbabilities& probs);

/// Tokens selected at threshold t, ascending. Token b opens a span when
/// 0 < begin[b] >= t. Its partner is the nearest j >= b with end[j] > 0;
/// the span [b, j] is selected when end[j] >= t, otherwise the begin
/// contributes nothing. Partners do not depend on t, so raising t never
/// grows the selection.
std::vector<std::size_t> decode_spans(const TokenProbabilities& probs, double t);

/// Tokens whose character range overlaps any gold span.
std::vector<std::size_t> gold_tokens(const std::vector<EvalToken>& tokens, const std::vector<AnswerSpan>& spans);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;

  friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

struct PRCurve {
  std::vector<PrPoint> points;  ///< recall ascending; ties by precision descending
  double auc = 0.0;
};

/// Trapezoidal area over recall.
double trapezoid_auc(const std::vector<PrPoint>& points);

/// Token-level precision/recall over a threshold sweep. Default sweep: the
/// distinct begin/end values plus 0 and a value just above 1. Precision of
/// an empty prediction is 1. Throws ArgumentError when `gold` is empty.
PRCurve pr_curve(const TokenProbabilities& probs, const std::vector<std::size_t>& gold,
                 const std::optional<std::vector<double>>& thresholds = std::nullopt);

using Scorer = std::function<TokenProbabilities(const Triple&)>;

struct MacroResult {
  double macro_auc = 0.0;
  std::vector<std::pair<std::string, double>> per_triple;
};

/// Mean of per-triple PR-AUC. Throws ArgumentError on an empty dataset.
MacroResult macro_pr_auc(const Dataset& dataset, const Scorer& scorer, unsigned jobs = 1);

/// Reference scorer: begin = end = Jaccard overlap between the lowercased
/// 3-token window around each snippet token and the question's word set.
TokenProbabilities lexical_scorer(const Triple& triple);

/// Prediction rows: {"id", "tokens": [[start, end], ...], "begin": [...],
/// "end": [...]}. Token text is filled from the snippet at evaluation.
std::unordered_map<std::string, TokenProbabilities> parse_predictions_text(std::string_view text);
std::unordered_map<std::string, TokenProbabilities> parse_predictions(const std::filesystem::path& path);

/// Scores `dataset` with external predictions. Every triple needs a row.
MacroResult evaluate_predictions(const Dataset& dataset,
                                 const std::unordered_map<std::string, TokenProbabilities>& predictions);

/// Looks up a built-in scorer ("lexical").
Scorer builtin_scorer(std::string_view name);

}  // namespace qaaug
