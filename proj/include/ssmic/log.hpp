#pragma once

#include <string_view>

namespace ssmic::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3, Quiet = 4 };

void set_level(Level level);
Level level();

// All output goes to stderr, one line per call, serialized across threads.
void debug(std::string_view message);
void info(std::string_view message);
void warn(std::string_view message);
void error(std::string_view message);

}  // namespace ssmic::log
