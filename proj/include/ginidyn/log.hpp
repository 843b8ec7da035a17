#pragma once

#include <spdlog/logger.h>

#include <memory>

namespace ginidyn {

/// Shared stderr logger. Level comes from GINIDYN_LOG
/// (trace|debug|info|warn|error|off), default warn.
std::shared_ptr<spdlog::logger> logger();

}  // namespace ginidyn
