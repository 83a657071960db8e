#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Text is stored as UTF-8. Every offset exposed by the toolkit counts
// Unicode scalar values (code points), never bytes.

namespace qaaug {

std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view text);
std::string to_utf8(char32_t cp);

/// Number of code points in a UTF-8 string.
std::size_t cp_length(std::string_view utf8);

/// Code-point substring [start, end) of a UTF-8 string.
std::string cp_substr(std::string_view utf8, std::size_t start, std::size_t end);

/// Simple (one-to-one) case folding; the result has the same length.
char32_t fold_case(char32_t cp);
std::u32string fold_case(std::u32string_view text);
std::string fold_case(std::string_view utf8);

bool is_space(char32_t cp);
bool is_alnum(char32_t cp);
bool is_upper(char32_t cp);
bool is_digit(char32_t cp);

/// Trim, then collapse internal whitespace runs to one ASCII space.
std::string collapse_whitespace(std::string_view utf8);

/// Shortest decimal form that round-trips ("0.95", "10").
std::string format_number(double value);

/// Token with code-point offsets into the text it was cut from.
struct TextToken {
  std::u32string text;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const TextToken&, const TextToken&) = default;
};

/// Alphanumeric runs, lowercased. Used for retrieval indexing.
std::vector<std::u32string> index_terms(std::u32string_view text);

/// Alphanumeric runs joined by internal hyphens ("IL-6", "anti-TNF").
std::vector<TextToken> word_tokens(std::u32string_view text);

}  // namespace qaaug
