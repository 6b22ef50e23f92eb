#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lyra {

/// Whole-file read; throws IoError naming the path.
std::string read_file(const std::filesystem::path& path);

/// Writes atomically-enough for a desk tool: parent directories are created,
/// then the file is truncated and written. Throws IoError naming the path.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Splits on '\n' and drops one trailing '\r' per line. A trailing newline
/// does not produce an extra empty line.
std::vector<std::string_view> split_lines(std::string_view content);

/// Line-aligned plain text, one segment per line.
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace lyra
