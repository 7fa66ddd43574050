#pragma once

#include <string>
#include <string_view>

namespace vulngraph::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3 };

/// Minimum level that reaches stderr. Defaults to info.
void set_level(Level level);
Level level();

/// Structured one-line log record: "[warn] [pipeline] message sample=ab12".
/// sample_id is optional context for corpus-scale tracing.
void write(Level level, std::string_view module, std::string_view message,
           std::string_view sample_id = {});

inline void debug(std::string_view module, std::string_view msg,
                  std::string_view sample_id = {}) {
  write(Level::debug, module, msg, sample_id);
}
inline void info(std::string_view module, std::string_view msg,
                 std::string_view sample_id = {}) {
  write(Level::info, module, msg, sample_id);
}
inline void warn(std::string_view module, std::string_view msg,
                 std::string_view sample_id = {}) {
  write(Level::warn, module, msg, sample_id);
}
inline void error(std::string_view module, std::string_view msg,
                  std::string_view sample_id = {}) {
  write(Level::error, module, msg, sample_id);
}

}  // namespace vulngraph::log
