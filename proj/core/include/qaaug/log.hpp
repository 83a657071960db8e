#pragma once

#include <string_view>

namespace qaaug {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

/// Process-wide threshold; messages below it are dropped. Default: warn.
void set_log_level(LogLevel level);
LogLevel log_level();
LogLevel log_level_from_string(std::string_view name);

/// Writes one line to standard error. Thread-safe.
void log(LogLevel level, std::string_view message);

}  // namespace qaaug
