#pragma once

#include <iostream>
#include <string>

namespace tweetslot::log {

// Diagnostics go to stderr; artifacts never do.
inline bool& enabled() {
  static bool on = false;
  return on;
}

inline void info(const std::string& msg) {
  if (enabled()) std::clog << "[tweetslot] " << msg << '\n';
}

}  // namespace tweetslot::log
