#include "dualcause/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace dualcause::log {

Level threshold() {
    static const Level level = [] {
        const char* env = std::getenv("DUALCAUSE_LOG");
        const std::string v = env ? env : "";
        if (v == "error") return Level::Error;
        if (v == "info") return Level::Info;
        if (v == "debug") return Level::Debug;
        return Level::Warn;
    }();
    return level;
}

void write(Level level, std::string_view message) {
    if (static_cast<int>(level) > static_cast<int>(threshold())) {
        return;
    }
    static std::mutex mu;
    static constexpr const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard lock(mu);
    std::cerr << "[dualcause " << names[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace dualcause::log
