#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace ecodec::log {

enum class Level { off = 0, info = 1, debug = 2 };

/// Verbosity from ECODEC_LOG (off | info | debug); unset means info.
inline Level level() {
  static const Level lvl = [] {
    const char* v = std::getenv("ECODEC_LOG");
    if (!v) return Level::info;
    const std::string_view s(v);
    if (s == "off") return Level::off;
    if (s == "debug") return Level::debug;
    return Level::info;
  }();
  return lvl;
}

inline void info(std::string_view msg) {
  if (level() >= Level::info) std::cerr << "[ecodec] " << msg << '\n';
}

inline void debug(std::string_view msg) {
  if (level() >= Level::debug) std::cerr << "[ecodec:debug] " << msg << '\n';
}

}  // namespace ecodec::log
