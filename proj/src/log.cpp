#include "rdd/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace rdd::log {

namespace {

Level parse_env() {
    const char* env = std::getenv("RDD_LOG");
    if (env == nullptr) return Level::warn;
    if (std::strcmp(env, "error") == 0) return Level::error;
    if (std::strcmp(env, "warn") == 0) return Level::warn;
    if (std::strcmp(env, "info") == 0) return Level::info;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    return Level::warn;
}

void emit(Level level, const char* tag, const std::string& message) {
    if (level <= threshold())
        std::fprintf(stderr, "[rdd %s] %s\n", tag, message.c_str());
}

}  // namespace

Level threshold() {
    static const Level level = parse_env();
    return level;
}

void error(const std::string& message) { emit(Level::error, "error", message); }
void warn(const std::string& message) { emit(Level::warn, "warn", message); }
void info(const std::string& message) { emit(Level::info, "info", message); }
void debug(const std::string& message) { emit(Level::debug, "debug", message); }

}  // namespace rdd::log
