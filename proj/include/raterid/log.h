#pragma once

#include <string_view>

// Minimal leveled logging to stderr. Library code reports recoverable
// fallbacks (undefined conditionals, unknown movies) at warning level.
namespace raterid::log {

enum class Level { kDebug = 0, kInfo = 1, kWarning = 2, kError = 3, kOff = 4 };

void set_level(Level level);
Level level();
void write(Level level, std::string_view message);

inline void debug(std::string_view message) { write(Level::kDebug, message); }
inline void info(std::string_view message) { write(Level::kInfo, message); }
inline void warn(std::string_view message) { write(Level::kWarning, message); }

}  // namespace raterid::log
