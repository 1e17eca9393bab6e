#pragma once

#include <string>

namespace ctmhd {

enum class LogLevel { Quiet = 0, Warn = 1, Info = 2 };

void set_log_level(LogLevel level);
LogLevel log_level();

void log_warn(const std::string& msg);
void log_info(const std::string& msg);
/// Emits `msg` the first time `key` is seen in this process.
void log_warn_once(const std::string& key, const std::string& msg);

}  // namespace ctmhd
