#include "qaaug/subst.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "builtin_data.hpp"
#include "qaaug/errors.hpp"
#include "qaaug/parallel.hpp"
#include "qaaug/random.hpp"
#include "qaaug/segmenter.hpp"
#include "qaaug/text.hpp"

namespace qaaug {

namespace {

constexpr std::uint64_t kEnumerationLimit = std::uint64_t{1} << 20;

std::set<std::string> folded_set(const std::vector<std::string>& words) {
  std::set<std::string> out;
  for (const auto& w : words) out.insert(fold_case(std::string_view(w)));
  return out;
}

bool is_single_word(const std::string& word) {
  if (word.empty() || word.rfind("##", 0) == 0) return false;
  const auto wide = to_u32(word);
  const auto tokens = word_tokens(wide);
  return tokens.size() == 1 && tokens[0].start == 0 && tokens[0].end == wide.size();
}

std::size_t changed_count(const std::vector<std::size_t>& choice) {
  return static_cast<std::size_t>(std::count_if(choice.begin(), choice.end(), [](std::size_t d) { return d != 0; }));
}

}  // namespace

std::set<std::string> default_stopwords() {
  static const std::set<std::string> words = folded_set(parse_word_list(detail::builtin_stopwords()));
  return words;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open stopword list '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return folded_set(parse_word_list(buffer.str()));
}

void validate(const SubstConfig& config) {
  if (config.K < 1) throw ConfigError("K must be at least 1");
  if (!(config.C > 0.0 && config.C <= 1.0)) throw ConfigError("C must be in (0, 1]");
  if (!(config.P > 0.0 && config.P <= 1.0)) throw ConfigError("P must be in (0, 1]");
  if (config.max_tokens_changed && *config.max_tokens_changed == 0) {
    throw ConfigError("max_tokens_changed must be positive when set");
  }
  if (!(config.max_failure_ratio >= 0.0 && config.max_failure_ratio <= 1.0)) {
    throw ConfigError("max_failure_ratio must be in [0, 1]");
  }
}

CandidateSet substitutable_positions(const Triple& triple, const std::set<std::string>& stopwords) {
  CandidateSet out;
  const auto snippet = to_u32(triple.snippet);
  for (auto& tok : word_tokens(snippet)) {
    const bool in_answer = std::any_of(triple.spans.begin(), triple.spans.end(), [&](const AnswerSpan& s) {
      return tok.start < s.end && s.start < tok.end;
    });
    if (in_answer) continue;
    const auto utf8 = to_utf8(tok.text);
    if (stopwords.contains(fold_case(std::string_view(utf8)))) continue;
    out.push_back({tok.start, tok.end, utf8, {}});
  }
  return out;
}

EmbeddingCandidates::EmbeddingCandidates(std::shared_ptr<const EmbeddingTable> table) : table_(std::move(table)) {
  if (!table_) throw ArgumentError("embedding candidates need a table");
}

std::vector<Candidate> EmbeddingCandidates::lookup(const std::string& token, const SubstConfig& config) {
  const std::string key = token + '\x1f' + std::to_string(config.K) + '\x1f' + format_number(config.C);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::vector<Candidate> out;
  std::string vocab_word = token;
  if (!table_->find(vocab_word)) vocab_word = fold_case(std::string_view(token));
  if (table_->find(vocab_word)) {
    const auto folded = fold_case(std::string_view(token));
    for (auto& [word, cosine] : neighbors(vocab_word, *table_, table_->size(), config.C)) {
      if (fold_case(std::string_view(word)) == folded) continue;
      out.push_back({word, cosine});
      if (out.size() == config.K) break;
    }
  }
  std::lock_guard lock(mutex_);
  cache_.emplace(key, out);
  return out;
}

CandidateSet EmbeddingCandidates::candidates(const Triple& triple, const SubstConfig& config) {
  auto positions = substitutable_positions(triple, config.stopwords);
  for (auto& pos : positions) pos.options = lookup(pos.original, config);
  return positions;
}

MaskedLmCandidates::MaskedLmCandidates(std::shared_ptr<Gateway> gateway) : gateway_(std::move(gateway)) {
  if (!gateway_) throw ArgumentError("masked-LM candidates need a gateway");
}

CandidateSet MaskedLmCandidates::candidates(const Triple& triple, const SubstConfig& config) {
  auto positions = substitutable_positions(triple, config.stopwords);
  const auto snippet = to_u32(triple.snippet);
  const std::u32string_view view(snippet);
  for (auto& pos : positions) {
    std::string masked = to_utf8(view.substr(0, pos.start));
    masked += kMaskToken;
    masked += to_utf8(view.substr(pos.end));
    const auto folded = fold_case(std::string_view(pos.original));
    std::set<std::string> seen;
    for (const auto& s : gateway_->fill_mask(masked)) {
      if (s.probability < config.P) break;  // sorted descending
      if (!is_single_word(s.word)) continue;
      if (fold_case(std::string_view(s.word)) == folded) continue;
      if (!seen.insert(s.word).second) continue;
      pos.options.push_back({s.word, s.probability});
      if (pos.options.size() == config.K) break;
    }
  }
  return positions;
}

SpaceSize substitution_space_size(const CandidateSet& candidates) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t product = 1;
  for (const auto& pos : candidates) {
    const std::uint64_t radix = pos.options.size() + 1;
    if (product > kMax / radix) return {kMax, true};
    product *= radix;
  }
  return {product - 1, false};
}

std::optional<Triple> apply_substitution(const Triple& triple, const CandidateSet& candidates,
                                         const std::vector<std::size_t>& choice) {
  const auto original = to_u32(triple.snippet);
  const std::u32string_view view(original);
  std::u32string out;
  out.reserve(original.size() + 16);
  std::size_t cursor = 0;
  // (original end, cumulative length delta after this position)
  std::vector<std::pair<std::size_t, std::ptrdiff_t>> deltas;
  std::ptrdiff_t delta = 0;
  for (std::size_t p = 0; p < candidates.size(); ++p) {
    const std::size_t d = p < choice.size() ? choice[p] : 0;
    if (d == 0) continue;
    const auto& pos = candidates[p];
    if (d > pos.options.size() || pos.start < cursor) return std::nullopt;
    out.append(view.substr(cursor, pos.start - cursor));
    const auto replacement = to_u32(pos.options[d - 1].word);
    out.append(replacement);
    cursor = pos.end;
    delta += static_cast<std::ptrdiff_t>(replacement.size()) - static_cast<std::ptrdiff_t>(pos.end - pos.start);
    deltas.emplace_back(pos.end, delta);
  }
  out.append(view.substr(cursor));

  Triple variant = triple;
  variant.snippet = to_utf8(out);
  for (auto& span : variant.spans) {
    std::ptrdiff_t shift = 0;
    for (const auto& [end, cumulative] : deltas) {
      if (end <= span.start) shift = cumulative;
    }
    const AnswerSpan old = span;
    span.start = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(old.start) + shift);
    span.end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(old.end) + shift);
    if (span.end > out.size() ||
        std::u32string_view(out).substr(span.start, span.length()) != view.substr(old.start, old.length())) {
      return std::nullopt;
    }
  }
  return variant;
}

std::vector<Triple> generate_substitutions(const Triple& triple, const CandidateSet& candidates,
                                           const SubstConfig& config, std::size_t n_samples, Method method) {
  std::vector<Triple> out;
  const auto space = substitution_space_size(candidates);
  const std::uint64_t target = std::min<std::uint64_t>(n_samples, space.value);
  if (target == 0) return out;

  std::vector<std::size_t> active;
  for (std::size_t p = 0; p < candidates.size(); ++p) {
    if (!candidates[p].options.empty()) active.push_back(p);
  }
  const std::size_t limit = config.max_tokens_changed.value_or(std::numeric_limits<std::size_t>::max());

  // Index in the space, first active position most significant.
  auto decode = [&](std::uint64_t x) {
    std::vector<std::size_t> choice(candidates.size(), 0);
    for (std::size_t j = active.size(); j-- > 0;) {
      const std::uint64_t radix = candidates[active[j]].options.size() + 1;
      choice[active[j]] = static_cast<std::size_t>(x % radix);
      x /= radix;
    }
    return choice;
  };

  Rng rng(hash_seed(config.seed, triple.id));
  std::vector<std::vector<std::size_t>> choices;
  if (!space.saturated && space.value <= kEnumerationLimit) {
    if (!config.max_tokens_changed) {
      for (auto idx : rng.sample_indices(static_cast<std::size_t>(space.value), static_cast<std::size_t>(target))) {
        choices.push_back(decode(idx + 1));
      }
    } else {
      std::vector<std::uint64_t> allowed;
      for (std::uint64_t x = 1; x <= space.value; ++x) {
        if (changed_count(decode(x)) <= limit) allowed.push_back(x);
      }
      const auto take = std::min<std::size_t>(static_cast<std::size_t>(target), allowed.size());
      for (auto idx : rng.sample_indices(allowed.size(), take)) choices.push_back(decode(allowed[idx]));
    }
  } else {
    // Too large to enumerate: independent per-position draws, rejecting the
    // identity, over-limit draws and repeats.
    std::set<std::vector<std::size_t>> seen;
    const std::uint64_t max_attempts = 64 * target + 1024;
    for (std::uint64_t attempt = 0; attempt < max_attempts && seen.size() < target; ++attempt) {
      std::vector<std::size_t> choice(candidates.size(), 0);
      for (auto p : active) choice[p] = static_cast<std::size_t>(rng.below(candidates[p].options.size() + 1));
      const auto changed = changed_count(choice);
      if (changed == 0 || changed > limit) continue;
      seen.insert(std::move(choice));
    }
    // Lexicographic order on choice vectors equals order by space index.
    choices.assign(seen.begin(), seen.end());
  }

  for (const auto& choice : choices) {
    auto variant = apply_substitution(triple, candidates, choice);
    if (!variant) continue;
    Triple child = derive_triple(triple, method, out.size());
    child.snippet = std::move(variant->snippet);
    child.spans = std::move(variant->spans);
    auto& params = child.provenance.params;
    params["K"] = std::to_string(config.K);
    if (method == Method::mlm_subst) {
      params["P"] = format_number(config.P);
    } else {
      params["C"] = format_number(config.C);
    }
    params["changed"] = std::to_string(changed_count(choice));
    params["seed"] = std::to_string(config.seed);
    out.push_back(std::move(child));
  }
  return out;
}

std::vector<Triple> generate_substitutions(const Triple& triple, const SubstConfig& config, CandidateSource& source) {
  validate(config);
  const auto candidates = source.candidates(triple, config);
  return generate_substitutions(triple, candidates, config, config.n_samples, source.method());
}

std::vector<std::uint64_t> allocate_quotas(const std::vector<std::uint64_t>& sizes,
                                           const std::vector<std::string>& ids, std::uint64_t n_samples) {
  __extension__ using u128 = unsigned __int128;
  std::vector<std::uint64_t> quotas(sizes.size(), 0);
  u128 total = 0;
  for (auto s : sizes) total += s;
  if (total == 0) return quotas;
  const u128 target = std::min<u128>(n_samples, total);
  u128 assigned = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    quotas[i] = static_cast<std::uint64_t>(target * sizes[i] / total);
    assigned += quotas[i];
  }
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  u128 remaining = target - assigned;
  while (remaining > 0) {
    bool progressed = false;
    for (auto i : order) {
      if (remaining == 0) break;
      if (quotas[i] < sizes[i]) {
        ++quotas[i];
        --remaining;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  return quotas;
}

Dataset augment_substitution(const Dataset& dataset, const SubstConfig& config, CandidateSource& source) {
  validate(config);
  const auto& triples = dataset.triples;
  const std::size_t n = triples.size();
  std::vector<CandidateSet> candidates(n);
  std::vector<char> failed(n, 0);
  parallel_for(n, config.jobs, [&](std::size_t i) {
    try {
      candidates[i] = source.candidates(triples[i], config);
    } catch (const ProviderError&) {
      failed[i] = 1;
    }
  });
  const auto skipped = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  if (n > 0 && static_cast<double>(skipped) / static_cast<double>(n) > config.max_failure_ratio) {
    throw ProviderError("substitution: " + std::to_string(skipped) + " of " + std::to_string(n) +
                        " triples failed at the provider");
  }

  std::vector<std::uint64_t> sizes(n, 0);
  std::vector<std::string> ids(n);
  std::uint64_t space_total = 0;
  bool saturated = false;
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = triples[i].id;
    if (failed[i]) continue;
    const auto size = substitution_space_size(candidates[i]);
    sizes[i] = size.value;
    saturated = saturated || size.saturated || space_total > std::numeric_limits<std::uint64_t>::max() - size.value;
    space_total = saturated ? std::numeric_limits<std::uint64_t>::max() : space_total + size.value;
  }
  const auto quotas = allocate_quotas(sizes, ids, config.n_samples);

  std::vector<std::vector<Triple>> variants(n);
  parallel_for(n, config.jobs, [&](std::size_t i) {
    if (quotas[i] == 0) return;
    variants[i] = generate_substitutions(triples[i], candidates[i], config, static_cast<std::size_t>(quotas[i]),
                                         source.method());
  });

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  Dataset out;
  for (auto i : order) {
    for (auto& t : variants[i]) out.triples.push_back(std::move(t));
  }
  out.meta["space_total"] = std::to_string(space_total);
  out.meta["space_saturated"] = saturated ? "true" : "false";
  out.meta["skipped"] = std::to_string(skipped);
  out.meta["generated"] = std::to_string(out.size());
  return out;
}

}  // namespace qaaug
