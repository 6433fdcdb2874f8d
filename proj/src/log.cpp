#include "cfml/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace cfml {

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("CFML_LOG");
        if (!env) return LogLevel::Warn;
        std::string v(env);
        if (v == "error") return LogLevel::Error;
        if (v == "warn") return LogLevel::Warn;
        if (v == "info") return LogLevel::Info;
        if (v == "debug") return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

void log(LogLevel level, const std::string& msg) {
    if (level > log_level()) return;
    static std::mutex mu;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "[cfml] " << names[int(level)] << ": " << msg << "\n";
}

} // namespace cfml
