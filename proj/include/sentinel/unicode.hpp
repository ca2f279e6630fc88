#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace sentinel::text {

/// Unicode NFC of a UTF-8 string. Invalid sequences become U+FFFD.
std::string nfc(std::string_view utf8);

/// Full Unicode lowercase mapping (locale-independent).
std::string lowercase(std::string_view utf8);

/// NFC, lowercase, whitespace runs collapsed to one space, trimmed.
std::string normalize_text(std::string_view s);

std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view s);

std::size_t codepoint_count(std::string_view utf8);

/// Letters and digits of any script.
bool is_word_char(char32_t c);
bool is_space(char32_t c);

}  // namespace sentinel::text
