#include "ssmic/log.hpp"
#include "ssmic/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace ssmic {

namespace log {

namespace {

std::atomic<Level> current{Level::Info};
std::mutex sink;

void emit(Level at, const char* tag, std::string_view message) {
    if (at < current.load()) return;
    std::lock_guard lock(sink);
    std::cerr << "[ssmic " << tag << "] " << message << '\n';
}

}  // namespace

void set_level(Level level) { current = level; }
Level level() { return current.load(); }

void debug(std::string_view message) { emit(Level::Debug, "debug", message); }
void info(std::string_view message) { emit(Level::Info, "info", message); }
void warn(std::string_view message) { emit(Level::Warn, "warn", message); }
void error(std::string_view message) { emit(Level::Error, "error", message); }

}  // namespace log

std::size_t default_jobs() {
    if (const char* env = std::getenv("SSMIC_JOBS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace ssmic
