#pragma once

#include <string>

// Diagnostics on standard error, gated by the RDD_LOG environment variable
// (error | warn | info | debug; default warn). Unknown values fall back to
// the default.

namespace rdd::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

Level threshold();

void error(const std::string& message);
void warn(const std::string& message);
void info(const std::string& message);
void debug(const std::string& message);

}  // namespace rdd::log
