#pragma once
/* Tiny stderr logger gated by the FSFORGE_LOG environment variable
 * (off|error|warn|info|debug, default off).  Reports never depend on log
 * output, so logging cannot break determinism. */

#include <cstdlib>
#include <iostream>
#include <string>

namespace fsforge {

enum class LogLevel { off = 0, error = 1, warn = 2, info = 3, debug = 4 };

inline LogLevel log_level() {
  static const LogLevel lvl = [] {
    const char* e = std::getenv("FSFORGE_LOG");
    if (!e) return LogLevel::off;
    std::string s(e);
    if (s == "error") return LogLevel::error;
    if (s == "warn") return LogLevel::warn;
    if (s == "info") return LogLevel::info;
    if (s == "debug") return LogLevel::debug;
    return LogLevel::off;
  }();
  return lvl;
}

inline void log_msg(LogLevel lvl, const std::string& msg) {
  if (static_cast<int>(lvl) > static_cast<int>(log_level())) return;
  const char* tag = lvl == LogLevel::error  ? "error"
                    : lvl == LogLevel::warn ? "warn"
                    : lvl == LogLevel::info ? "info"
                                            : "debug";
  std::cerr << "[fsforge] " << tag << ": " << msg << "\n";
}

}  // namespace fsforge
