#include "qaaug/segmenter.hpp"

#include <fstream>
#include <sstream>

#include "builtin_data.hpp"
#include "qaaug/errors.hpp"
#include "qaaug/text.hpp"

namespace qaaug {

namespace {

bool is_terminal(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?'; }

bool is_closer(char32_t cp) {
  switch (cp) {
    case U')': case U']': case U'"': case U'\'':
    case 0x201D: case 0x2019: case 0xBB:
      return true;
    default:
      return false;
  }
}

bool is_opener(char32_t cp) { return cp == U'(' || cp == U'[' || cp == U'"' || cp == 0x201C; }

}  // namespace

std::vector<std::string> parse_word_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(line);
  }
  return out;
}

SentenceSegmenter::SentenceSegmenter() : SentenceSegmenter(parse_word_list(detail::builtin_abbreviations())) {}

SentenceSegmenter::SentenceSegmenter(std::vector<std::string> abbreviations)
    : abbreviations_(std::move(abbreviations)) {
  for (const auto& a : abbreviations_) wide_abbreviations_.push_back(to_u32(a));
}

SentenceSegmenter SentenceSegmenter::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open abbreviation list '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return SentenceSegmenter(parse_word_list(buffer.str()));
}

bool SentenceSegmenter::guarded(std::u32string_view text, std::size_t period) const {
  const auto upto = text.substr(0, period + 1);
  for (const auto& abbr : wide_abbreviations_) {
    if (abbr.empty() || abbr.size() > upto.size()) continue;
    if (upto.substr(upto.size() - abbr.size()) != abbr) continue;
    const std::size_t begin = upto.size() - abbr.size();
    if (begin == 0 || is_space(text[begin - 1]) || is_opener(text[begin - 1])) return true;
  }
  return false;
}

std::vector<Sentence> SentenceSegmenter::segment(std::string_view text, std::string_view doc_id) const {
  const auto wide = to_u32(text);
  const std::u32string_view w(wide);
  std::vector<Sentence> out;

  auto emit = [&](std::size_t from, std::size_t to) {
    while (from < to && is_space(w[from])) ++from;
    while (to > from && is_space(w[to - 1])) --to;
    if (from == to) return;
    Sentence s;
    s.doc_id = std::string(doc_id);
    s.index = out.size();
    s.text = to_utf8(w.substr(from, to - from));
    s.start = from;
    s.end = to;
    out.push_back(std::move(s));
  };

  std::size_t sentence_start = 0;
  std::size_t i = 0;
  while (i < w.size()) {
    if (!is_terminal(w[i])) {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < w.size() && is_terminal(w[end])) ++end;
    const std::size_t last_terminal = end - 1;
    while (end < w.size() && is_closer(w[end])) ++end;
    std::size_t next = end;
    while (next < w.size() && is_space(w[next])) ++next;
    std::size_t first = next;
    while (first < w.size() && is_opener(w[first])) ++first;
    const bool boundary = next > end && first < w.size() && (is_upper(w[first]) || is_digit(w[first])) &&
                          !(w[last_terminal] == U'.' && guarded(w, last_terminal));
    if (boundary) {
      emit(sentence_start, end);
      sentence_start = next;
      i = next;
    } else {
      i = end;
    }
  }
  emit(sentence_start, w.size());
  return out;
}

std::vector<Sentence> segment_sentences(std::string_view text) {
  static const SentenceSegmenter segmenter;
  return segmenter.segment(text);
}

}  // namespace qaaug
