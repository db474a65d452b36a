#pragma once

#include <sstream>
#include <string>

namespace textworld {

enum class LogLevel { debug = 0, info = 1, warning = 2, error = 3, off = 4 };

void set_log_level(LogLevel level);
LogLevel log_level();
void log_message(LogLevel level, const std::string& message);

template <typename... Args>
void log(LogLevel level, const Args&... args) {
  if (level < log_level()) return;
  std::ostringstream out;
  (out << ... << args);
  log_message(level, out.str());
}

template <typename... Args>
void log_info(const Args&... args) {
  log(LogLevel::info, args...);
}
template <typename... Args>
void log_warning(const Args&... args) {
  log(LogLevel::warning, args...);
}

}  // namespace textworld
