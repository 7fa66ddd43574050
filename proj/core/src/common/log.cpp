#include "vulngraph/common/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace vulngraph::log {

namespace {
std::atomic<Level> g_level{Level::info};
std::mutex g_mutex;

const char* level_name(Level l) {
  switch (l) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
  }
  return "?";
}
}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void write(Level level, std::string_view module, std::string_view message,
           std::string_view sample_id) {
  if (level < g_level.load()) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  if (sample_id.empty()) {
    std::fprintf(stderr, "[%s] [%.*s] %.*s\n", level_name(level),
                 static_cast<int>(module.size()), module.data(),
                 static_cast<int>(message.size()), message.data());
  } else {
    std::fprintf(stderr, "[%s] [%.*s] %.*s sample=%.*s\n", level_name(level),
                 static_cast<int>(module.size()), module.data(),
                 static_cast<int>(message.size()), message.data(),
                 static_cast<int>(sample_id.size()), sample_id.data());
  }
}

}  // namespace vulngraph::log
