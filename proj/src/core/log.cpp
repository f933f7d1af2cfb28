#include "adrev/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <atomic>

namespace adrev {

namespace {

std::atomic<bool> g_enabled{true};

spdlog::logger& logger() {
  static auto instance = [] {
    auto l = spdlog::stderr_color_mt("adrev");
    l->set_pattern("[%l] %v");
    return l;
  }();
  return *instance;
}

}  // namespace

void warn(std::string_view message) {
  if (g_enabled) logger().warn("{}", message);
}

void set_warnings_enabled(bool enabled) { g_enabled = enabled; }

}  // namespace adrev
