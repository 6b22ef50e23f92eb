#pragma once

#include <string>
#include <string_view>

namespace lyra {

enum class Verbosity { quiet, normal, debug };

/// Parses "quiet" | "normal" | "debug"; throws ValidationError otherwise.
Verbosity parse_verbosity(std::string_view text);

/// Configures the default spdlog logger (stderr).
void set_verbosity(Verbosity level);

/// Replaces every occurrence of `secret` in `text` with "***".
std::string redact(std::string text, std::string_view secret);

}  // namespace lyra
