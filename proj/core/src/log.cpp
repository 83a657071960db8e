#include "qaaug/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <string>

#include "qaaug/errors.hpp"

namespace qaaug {

namespace {

std::atomic<LogLevel> g_level{LogLevel::warn};
std::mutex g_mutex;

const char* level_name(LogLevel level) {
  switch (level) {
    case LogLevel::debug: return "debug";
    case LogLevel::info: return "info";
    case LogLevel::warn: return "warn";
    case LogLevel::error: return "error";
    case LogLevel::off: return "off";
  }
  return "?";
}

}  // namespace

void set_log_level(LogLevel level) { g_level = level; }
LogLevel log_level() { return g_level.load(); }

LogLevel log_level_from_string(std::string_view name) {
  for (auto level : {LogLevel::debug, LogLevel::info, LogLevel::warn, LogLevel::error, LogLevel::off}) {
    if (name == level_name(level)) return level;
  }
  throw ArgumentError("unknown log level '" + std::string(name) + "'");
}

void log(LogLevel level, std::string_view message) {
  if (level < g_level.load() || level == LogLevel::off) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "[qaaug] " << level_name(level) << ": " << message << '\n';
}

}  // namespace qaaug
