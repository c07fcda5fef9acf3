#include "prmnav/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace prmnav::log {
namespace {

std::atomic<Level> g_level{Level::warn};
std::mutex g_mu;

std::string_view tag(Level l) {
  switch (l) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    case Level::off: return "";
  }
  return "";
}

}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void write(Level l, std::string_view msg) {
  if (l < g_level.load() || l == Level::off) return;
  std::lock_guard<std::mutex> lock(g_mu);
  std::clog << "[prmnav " << tag(l) << "] " << msg << '\n';
}

}  // namespace prmnav::log
