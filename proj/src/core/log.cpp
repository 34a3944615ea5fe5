#include "panosr/core/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace panosr {

namespace {
std::atomic<LogLevel> g_level{LogLevel::warn};
std::mutex g_mu;
const char* tag(LogLevel l) {
  switch (l) {
    case LogLevel::debug: return "debug";
    case LogLevel::info: return "info";
    case LogLevel::warn: return "warn";
    default: return "error";
  }
}
}  // namespace

void set_log_level(LogLevel level) { g_level.store(level); }
LogLevel log_level() { return g_level.load(); }

void log(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) < static_cast<int>(g_level.load())) return;
  std::lock_guard<std::mutex> lock(g_mu);
  std::cerr << "[panosr:" << tag(level) << "] " << msg << "\n";
}

}  // namespace panosr
