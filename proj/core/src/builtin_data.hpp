#pragma once

#include <string_view>

namespace qaaug::detail {

std::string_view builtin_abbreviations();
std::string_view builtin_stopwords();

}  // namespace qaaug::detail
