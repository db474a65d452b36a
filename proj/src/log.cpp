#include "textworld/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace textworld {

namespace {
std::atomic<LogLevel> g_level{LogLevel::warning};
std::mutex g_mutex;
}  // namespace

void set_log_level(LogLevel level) { g_level = level; }
LogLevel log_level() { return g_level; }

void log_message(LogLevel level, const std::string& message) {
  static const char* names[] = {"debug", "info", "warning", "error"};
  std::lock_guard lock(g_mutex);
  std::cerr << "[textworld " << names[static_cast<int>(level)] << "] " << message << "\n";
}

}  // namespace textworld
