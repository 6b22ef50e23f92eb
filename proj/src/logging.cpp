#include "lyra/logging.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lyra/error.hpp"

namespace lyra {

Verbosity parse_verbosity(std::string_view text) {
  if (text == "quiet") return Verbosity::quiet;
  if (text == "normal") return Verbosity::normal;
  if (text == "debug") return Verbosity::debug;
  throw ValidationError("verbosity must be quiet, normal or debug (got '" + std::string(text) + "')");
}

void set_verbosity(Verbosity level) {
  static const auto logger = [] {
    auto l = spdlog::stderr_color_mt("lyra");
    l->set_pattern("[%l] %v");
    spdlog::set_default_logger(l);
    return l;
  }();
  switch (level) {
    case Verbosity::quiet: logger->set_level(spdlog::level::err); break;
    case Verbosity::normal: logger->set_level(spdlog::level::info); break;
    case Verbosity::debug: logger->set_level(spdlog::level::debug); break;
  }
}

std::string redact(std::string text, std::string_view secret) {
  if (secret.empty()) return text;
  std::size_t pos = 0;
  while ((pos = text.find(secret, pos)) != std::string::npos) {
    text.replace(pos, secret.size(), "***");
    pos += 3;
  }
  return text;
}

}  // namespace lyra
