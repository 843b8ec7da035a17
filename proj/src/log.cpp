#include "ginidyn/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>

namespace ginidyn {

std::shared_ptr<spdlog::logger> logger() {
    static const auto instance = [] {
        auto log = std::make_shared<spdlog::logger>("ginidyn", std::make_shared<spdlog::sinks::stderr_sink_mt>());
        log->set_pattern("[%l] %v");
        auto level = spdlog::level::warn;
        if (const char* env = std::getenv("GINIDYN_LOG")) {
            level = spdlog::level::from_str(env);
        }
        log->set_level(level);
        return log;
    }();
    return instance;
}

}  // namespace ginidyn
