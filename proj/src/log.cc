#include "raterid/log.h"

#include <atomic>
#include <iostream>
#include <mutex>

namespace raterid::log {
namespace {

std::atomic<Level> g_level{Level::kWarning};
std::mutex g_mutex;

const char* tag(Level level) {
  switch (level) {
    case Level::kDebug: return "debug";
    case Level::kInfo: return "info";
    case Level::kWarning: return "warning";
    case Level::kError: return "error";
    case Level::kOff: break;
  }
  return "";
}

}  // namespace

void set_level(Level level) { g_level.store(level); }

Level level() { return g_level.load(); }

void write(Level lvl, std::string_view message) {
  if (lvl < g_level.load() || lvl == Level::kOff) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::clog << "raterid " << tag(lvl) << ": " << message << '\n';
}

}  // namespace raterid::log
