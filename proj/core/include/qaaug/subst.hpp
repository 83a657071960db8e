#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "qaaug/dataset.hpp"
#include "qaaug/embeddings.hpp"
#include "qaaug/provider.hpp"

namespace qaaug {

enum class SubstMode { w2v, mlm };

/// The shipped English stopword list (data/stopwords.txt).
std::set<std::string> default_stopwords();
std::set<std::string> load_stopwords(const std::filesystem::path& path);

struct SubstConfig {
  SubstMode mode = SubstMode::w2v;
  /// Max candidates per token.
  std::size_t K = 10;
  /// Cosine floor (w2v mode).
  double C = 0.95;
  /// Probability floor (mlm mode).
  double P = 0.95;
  /// When set, variants may change at most this many tokens.
  std::optional<std::size_t> max_tokens_changed;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  /// Compared after case folding.
  std::set<std::string> stopwords = default_stopwords();
  /// Fraction of triples allowed to fail at the provider before the whole
  /// run fails.
  double max_failure_ratio = 0.5;
  unsigned jobs = 1;
};

/// Throws ConfigError on out-of-range settings.
void validate(const SubstConfig& config);

struct Candidate {
  std::string word;
  double score = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// One substitutable snippet token and its replacement options.
struct PositionCandidates {
  std::size_t start = 0;  ///< code points into the snippet
  std::size_t end = 0;
  std::string original;
  std::vector<Candidate> options;  ///< sorted by score descending
};

using CandidateSet = std::vector<PositionCandidates>;

/// Word tokens of the snippet that may be replaced: not stopwords and not
/// overlapping any gold span. Options are left empty.
CandidateSet substitutable_positions(const Triple& triple, const std::set<std::string>& stopwords);

/// Supplies per-position replacement options.
class CandidateSource {
 public:
  virtual ~CandidateSource() = default;
  virtual Method method() const = 0;
  virtual CandidateSet candidates(const Triple& triple, const SubstConfig& config) = 0;
};

/// Embedding neighbors with cos >= C. Lookup tries the token as written,
/// then its case-folded form. Thread-safe.
class EmbeddingCandidates : public CandidateSource {
 public:
  explicit EmbeddingCandidates(std::shared_ptr<const EmbeddingTable> table);
  Method method() const override { return Method::w2v_subst; }
  CandidateSet candidates(const Triple& triple, const SubstConfig& config) override;

 private:
  std::vector<Candidate> lookup(const std::string& token, const SubstConfig& config);

  std::shared_ptr<const EmbeddingTable> table_;
  std::mutex mutex_;
  std::unordered_map<std::string, std::vector<Candidate>> cache_;
};

/// Masks one position per provider call and keeps single whole-word
/// suggestions with probability >= P.
class MaskedLmCandidates : public CandidateSource {
 public:
  explicit MaskedLmCandidates(std::shared_ptr<Gateway> gateway);
  Method method() const override { return Method::mlm_subst; }
  CandidateSet candidates(const Triple& triple, const SubstConfig& config) override;

 private:
  std::shared_ptr<Gateway> gateway_;
};

struct SpaceSize {
  std::uint64_t value = 0;
  bool saturated = false;
};

/// prod(k_i + 1) - 1 over positions. Saturates at UINT64_MAX and flags it.
SpaceSize substitution_space_size(const CandidateSet& candidates);

/// Applies a choice vector (0 keeps the token, d picks options[d-1]) and
/// recomputes spans. Returns nullopt when the answer-span check fails.
std::optional<Triple> apply_substitution(const Triple& triple, const CandidateSet& candidates,
                                         const std::vector<std::size_t>& choice);

/// Up to `n_samples` distinct variants drawn uniformly without replacement
/// from the non-identity substitution space, ordered by their index in the
/// space. Seeded by (config.seed, triple.id).
std::vector<Triple> generate_substitutions(const Triple& triple, const CandidateSet& candidates,
                                           const SubstConfig& config, std::size_t n_samples, Method method);

/// Candidate lookup plus generation with config.n_samples.
std::vector<Triple> generate_substitutions(const Triple& triple, const SubstConfig& config, CandidateSource& source);

/// Per-triple quotas proportional to space size (remainder round-robin by
/// triple id). Output holds min(n_samples, total space) triples ordered by
/// (parent id, variant index). meta: space_total, skipped, generated.
Dataset augment_substitution(const Dataset& dataset, const SubstConfig& config, CandidateSource& source);

/// Quota allocation used by augment_substitution; exposed for tests.
/// `ids` breaks remainder ties.
std::vector<std::uint64_t> allocate_quotas(const std::vector<std::uint64_t>& sizes,
                                           const std::vector<std::string>& ids, std::uint64_t n_samples);

}  // namespace qaaug
