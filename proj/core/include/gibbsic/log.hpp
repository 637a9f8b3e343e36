#pragma once

#include <string_view>

namespace gibbsic {

enum class LogLevel { Debug = 0, Info = 1, Warning = 2, Error = 3, Off = 4 };

/// Process-wide threshold; messages below it are dropped. Default: Warning.
void set_log_level(LogLevel level) noexcept;
LogLevel log_level() noexcept;

/// Thread-safe line-oriented logging to stderr.
void log_message(LogLevel level, std::string_view msg);
inline void log_warning(std::string_view msg) { log_message(LogLevel::Warning, msg); }
inline void log_info(std::string_view msg) { log_message(LogLevel::Info, msg); }

}  // namespace gibbsic
