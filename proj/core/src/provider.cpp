#include "qaaug/provider.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qaaug/errors.hpp"
#include "qaaug/random.hpp"
#include "qaaug/segmenter.hpp"
#include "qaaug/text.hpp"

namespace qaaug {

using json = nlohmann::json;

namespace {

bool is_language_code(const std::string& code) {
  return code.size() == 2 && std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + 1)) ++count;
  return count;
}

}  // namespace

MaskTable parse_mask_table(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed mask table: ") + e.what(), 0, e.byte);
  }
  if (!root.is_object()) throw ParseError("mask table must be a JSON object");
  MaskTable table;
  for (const auto& [key, list] : root.items()) {
    if (!list.is_array()) throw ParseError("mask table entry '" + key + "' must be an array");
    auto& out = table[key];
    for (const auto& item : list) {
      if (!item.is_object() || !item.contains("word") || !item.contains("probability") ||
          !item["word"].is_string() || !item["probability"].is_number()) {
        throw ParseError("mask table entry '" + key + "' has a malformed suggestion");
      }
      out.push_back({item["word"].get<std::string>(), item["probability"].get<double>()});
    }
  }
  return table;
}

MaskTable load_mask_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mask table '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_mask_table(buffer.str());
}

std::string marker_translate(const std::string& text, const std::string& source, const std::string& target) {
  return text + " [" + source + ">" + target + "]";
}

std::string strip_markers(const std::string& text) {
  // Tag shape: " [xx>yy]"
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (i + 8 <= text.size() && text[i] == ' ' && text[i + 1] == '[' && text[i + 4] == '>' && text[i + 7] == ']' &&
        std::islower(static_cast<unsigned char>(text[i + 2])) && std::islower(static_cast<unsigned char>(text[i + 3])) &&
        std::islower(static_cast<unsigned char>(text[i + 5])) && std::islower(static_cast<unsigned char>(text[i + 6]))) {
      i += 8;
      continue;
    }
    out.push_back(text[i++]);
  }
  return out;
}

StubProvider::StubProvider(StubTranslation translation, MaskTable masks)
    : translation_(translation), masks_(std::move(masks)) {}

std::string StubProvider::translate(const std::string& text, const std::string& source, const std::string& target) {
  if (translation_ == StubTranslation::identity) return text;
  return marker_translate(text, source, target);
}

std::vector<MaskSuggestion> StubProvider::fill_mask(const std::string& text) {
  auto it = masks_.find(text);
  if (it == masks_.end()) it = masks_.find(sha256_hex(text));
  if (it == masks_.end()) return {};
  return it->second;
}

std::vector<GeneratedQA> StubProvider::generate_questions(const std::string& snippet, std::size_t max_items) {
  std::vector<GeneratedQA> out;
  const auto wide = to_u32(snippet);
  for (const auto& sentence : segment_sentences(snippet)) {
    if (out.size() >= max_items) break;
    const auto tokens = word_tokens(std::u32string_view(wide).substr(sentence.start, sentence.end - sentence.start));
    std::size_t first = 0;
    while (first < tokens.size() && !is_upper(tokens[first].text.front())) ++first;
    if (first == tokens.size()) continue;
    std::size_t last = first;
    while (last + 1 < tokens.size() && is_upper(tokens[last + 1].text.front())) {
      // Only whitespace may separate tokens of one run.
      bool spaces_only = true;
      for (std::size_t k = tokens[last].end; k < tokens[last + 1].start; ++k) {
        if (!is_space(wide[sentence.start + k])) spaces_only = false;
      }
      if (!spaces_only) break;
      ++last;
    }
    AnswerSpan span{sentence.start + tokens[first].start, sentence.start + tokens[last].end};
    out.push_back({"What is mentioned?", to_utf8(std::u32string_view(wide).substr(span.start, span.length())), span});
  }
  return out;
}

Gateway::Gateway(std::shared_ptr<TextProvider> provider) : provider_(std::move(provider)) {
  if (!provider_) throw ArgumentError("gateway needs a provider");
}

std::string Gateway::translate(const std::string& text, const std::string& source, const std::string& target) {
  if (!is_language_code(source) || !is_language_code(target)) {
    throw ArgumentError("language codes must be ISO 639-1, got '" + source + "' -> '" + target + "'");
  }
  ++translate_requests_;
  try {
    return provider_->translate(text, source, target);
  } catch (const ProviderError&) {
    ++errors_;
    throw;
  }
}

std::vector<MaskSuggestion> Gateway::fill_mask(const std::string& text) {
  const auto masks = count_occurrences(text, kMaskToken);
  if (masks != 1) {
    throw ArgumentError("fill_mask needs exactly one " + std::string(kMaskToken) + ", got " + std::to_string(masks));
  }
  ++fill_mask_requests_;
  std::vector<MaskSuggestion> suggestions;
  try {
    suggestions = provider_->fill_mask(text);
  } catch (const ProviderError&) {
    ++errors_;
    throw;
  }
  std::erase_if(suggestions, [](const MaskSuggestion& s) {
    return !(s.probability >= 0.0 && s.probability <= 1.0) || s.word.empty();
  });
  std::stable_sort(suggestions.begin(), suggestions.end(),
                   [](const auto& a, const auto& b) { return a.probability > b.probability; });
  return suggestions;
}

std::vector<GeneratedQA> Gateway::generate_questions(const std::string& snippet, std::size_t max_items) {
  if (snippet.empty()) throw ArgumentError("generate_questions needs a non-empty snippet");
  if (max_items == 0) throw ArgumentError("max_items must be positive");
  ++qg_requests_;
  std::vector<GeneratedQA> items;
  try {
    items = provider_->generate_questions(snippet, max_items);
  } catch (const ProviderError&) {
    ++errors_;
    throw;
  }
  const auto wide = to_u32(snippet);
  std::vector<GeneratedQA> valid;
  for (auto& item : items) {
    const auto& s = item.span;
    const bool ok = s.start < s.end && s.end <= wide.size() && !item.question.empty() &&
                    to_utf8(std::u32string_view(wide).substr(s.start, s.length())) == item.answer;
    if (ok) {
      valid.push_back(std::move(item));
    } else {
      ++dropped_;
    }
  }
  if (valid.size() > max_items) valid.resize(max_items);
  return valid;
}

GatewayStats Gateway::stats() const {
  GatewayStats s;
  s.translate_requests = translate_requests_.load();
  s.fill_mask_requests = fill_mask_requests_.load();
  s.qg_requests = qg_requests_.load();
  s.remote_calls = provider_->remote_calls();
  s.cache_hits = provider_->cache_hits();
  s.dropped_items = dropped_.load();
  s.errors = errors_.load();
  return s;
}

std::shared_ptr<Gateway> make_gateway(const ProviderConfig& config) {
  if (config.endpoint == "stub") {
    MaskTable masks;
    if (config.mask_table) masks = load_mask_table(*config.mask_table);
    return std::make_shared<Gateway>(std::make_shared<StubProvider>(config.stub_translation, std::move(masks)));
  }
  return std::make_shared<Gateway>(
      std::make_shared<RemoteProvider>(config, std::shared_ptr<Transport>(make_http_transport(config))));
}

}  // namespace qaaug
