#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 helpers. Classification covers Latin scripts and the
// general punctuation blocks, which is all the corpus text needs.
namespace lyra::utf8 {

/// Decodes UTF-8. Invalid bytes decode to U+FFFD one byte at a time.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

bool is_space(char32_t cp) noexcept;
bool is_digit(char32_t cp) noexcept;
bool is_punct(char32_t cp) noexcept;
bool is_combining(char32_t cp) noexcept;
/// Anything that is not whitespace, punctuation, a digit or a control char.
bool is_letter(char32_t cp) noexcept;

char32_t to_lower(char32_t cp) noexcept;
char32_t to_upper(char32_t cp) noexcept;

std::string lowercase(std::string_view text);

/// Trims Unicode whitespace from both ends.
std::string_view trim(std::string_view text);

}  // namespace lyra::utf8
