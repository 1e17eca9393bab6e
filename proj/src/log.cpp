#include "ctmhd/log.hpp"

#include <iostream>
#include <mutex>
#include <set>

namespace ctmhd {

namespace {
LogLevel g_level = LogLevel::Warn;
std::mutex g_mutex;
std::set<std::string> g_seen;
}  // namespace

void set_log_level(LogLevel level) { g_level = level; }
LogLevel log_level() { return g_level; }

void log_warn(const std::string& msg) {
  if (g_level < LogLevel::Warn) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "warning: " << msg << '\n';
}

void log_info(const std::string& msg) {
  if (g_level < LogLevel::Info) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << msg << '\n';
}

void log_warn_once(const std::string& key, const std::string& msg) {
  {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (!g_seen.insert(key).second) return;
  }
  log_warn(msg);
}

}  // namespace ctmhd
