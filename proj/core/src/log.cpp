#include "alselect/log.hpp"

#include <iostream>
#include <mutex>

namespace alselect {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink() {
  static WarningSink s = [](const std::string& message) {
    std::cerr << "warning: " << message << '\n';
  };
  return s;
}

}  // namespace

void set_warning_sink(WarningSink new_sink) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(new_sink);
}

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(message);
}

}  // namespace alselect
