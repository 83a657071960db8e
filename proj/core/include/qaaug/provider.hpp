#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qaaug/dataset.hpp"

namespace qaaug {

inline constexpr std::string_view kMaskToken = "[MASK]";

struct MaskSuggestion {
  std::string word;
  double probability = 0.0;

  friend bool operator==(const MaskSuggestion&, const MaskSuggestion&) = default;
};

struct GeneratedQA {
  std::string question;
  std::string answer;
  AnswerSpan span;

  friend bool operator==(const GeneratedQA&, const GeneratedQA&) = default;
};

enum class StubTranslation { identity, marker };

struct ProviderConfig {
  /// Base URL ("http://host:port[/prefix]") or "stub".
  std::string endpoint = "stub";
  std::chrono::milliseconds timeout{30000};
  /// Retries after the first failed attempt.
  int max_retries = 3;
  int max_concurrent = 4;
  std::optional<std::filesystem::path> cache_dir;
  /// First retry delay; doubles on every further retry.
  std::chrono::milliseconds backoff{200};
  std::optional<std::string> bearer_token;

  StubTranslation stub_translation = StubTranslation::identity;
  std::optional<std::filesystem::path> mask_table;
};

/// A backend for the three text services. Implementations must be safe to
/// call from several threads.
class TextProvider {
 public:
  virtual ~TextProvider() = default;

  virtual std::string translate(const std::string& text, const std::string& source, const std::string& target) = 0;
  virtual std::vector<MaskSuggestion> fill_mask(const std::string& text) = 0;
  virtual std::vector<GeneratedQA> generate_questions(const std::string& snippet, std::size_t max_items) = 0;

  virtual std::size_t remote_calls() const { return 0; }
  virtual std::size_t cache_hits() const { return 0; }
};

/// Masked text (or its SHA-256 hex) -> suggestions.
using MaskTable = std::unordered_map<std::string, std::vector<MaskSuggestion>>;

/// JSON object mapping a key to [{"word": ..., "probability": ...}, ...].
MaskTable load_mask_table(const std::filesystem::path& path);
MaskTable parse_mask_table(std::string_view json_text);

/// Marker translation: appends a " [src>tgt]" tag. strip_markers() removes
/// every such tag, so a round trip is recoverable but never a no-op.
std::string marker_translate(const std::string& text, const std::string& source, const std::string& target);
std::string strip_markers(const std::string& text);

/// Deterministic in-process services.
///  - translate: identity, or marker tagging.
///  - fill_mask: lookup in a fixed table; unknown contexts give [].
///  - generate_questions: per sentence, ("What is mentioned?", first run
///    of capitalized tokens).
class StubProvider : public TextProvider {
 public:
  explicit StubProvider(StubTranslation translation = StubTranslation::identity, MaskTable masks = {});

  std::string translate(const std::string& text, const std::string& source, const std::string& target) override;
  std::vector<MaskSuggestion> fill_mask(const std::string& text) override;
  std::vector<GeneratedQA> generate_questions(const std::string& snippet, std::size_t max_items) override;

 private:
  StubTranslation translation_;
  MaskTable masks_;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One JSON POST. Throws TransportError on any failure.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string post(const std::string& path, const std::string& body) = 0;
};

/// HTTP/1.1 transport (plain http only).
std::unique_ptr<Transport> make_http_transport(const ProviderConfig& config);

/// Remote services over the JSON wire protocol (/translate, /fill_mask,
/// /generate_questions) with:
///  - a content-addressed response cache (memory, plus disk if cache_dir),
///  - single-flight coalescing of identical concurrent requests,
///  - at most max_concurrent requests in flight,
///  - 1 + max_retries attempts with exponential backoff.
class RemoteProvider : public TextProvider {
 public:
  RemoteProvider(ProviderConfig config, std::shared_ptr<Transport> transport);

  std::string translate(const std::string& text, const std::string& source, const std::string& target) override;
  std::vector<MaskSuggestion> fill_mask(const std::string& text) override;
  std::vector<GeneratedQA> generate_questions(const std::string& snippet, std::size_t max_items) override;

  std::size_t remote_calls() const override { return remote_calls_.load(); }
  std::size_t cache_hits() const override { return cache_hits_.load(); }

 private:
  std::string call(const std::string& service, const std::string& body);
  std::string fetch(const std::string& service, const std::string& body);
  std::optional<std::filesystem::path> cache_path(const std::string& service, const std::string& key) const;

  ProviderConfig config_;
  std::shared_ptr<Transport> transport_;

  std::mutex mutex_;
  std::unordered_map<std::string, std::string> memory_cache_;
  std::unordered_map<std::string, std::shared_future<std::string>> in_flight_;

  std::mutex slot_mutex_;
  std::condition_variable slot_cv_;
  int active_ = 0;

  std::atomic<std::size_t> remote_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

struct GatewayStats {
  std::size_t translate_requests = 0;
  std::size_t fill_mask_requests = 0;
  std::size_t qg_requests = 0;
  std::size_t remote_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t dropped_items = 0;
  std::size_t errors = 0;
};

/// Front door used by the augmenters: argument checks, response
/// normalization and validation, and counters on top of a TextProvider.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<TextProvider> provider);

  /// Language codes must be ISO 639-1 (two lowercase letters).
  std::string translate(const std::string& text, const std::string& source, const std::string& target);

  /// `text` must contain exactly one [MASK]. Suggestions come back sorted by
  /// probability descending; out-of-range probabilities are dropped.
  std::vector<MaskSuggestion> fill_mask(const std::string& text);

  /// Items whose span does not select their answer in `snippet` are dropped
  /// and counted in dropped_items.
  std::vector<GeneratedQA> generate_questions(const std::string& snippet, std::size_t max_items);

  GatewayStats stats() const;

 private:
  std::shared_ptr<TextProvider> provider_;
  std::atomic<std::size_t> translate_requests_{0};
  std::atomic<std::size_t> fill_mask_requests_{0};
  std::atomic<std::size_t> qg_requests_{0};
  std::atomic<std::size_t> dropped_{0};
  std::atomic<std::size_t> errors_{0};
};

/// "stub" builds a StubProvider; anything else a RemoteProvider over HTTP.
std::shared_ptr<Gateway> make_gateway(const ProviderConfig& config);

}  // namespace qaaug
