#pragma once

#include <string>
#include <string_view>

namespace kex::utf8 {

/// Decodes UTF-8, replacing each invalid byte with U+FFFD.
std::u32string decode_lossy(std::string_view s, bool* had_errors = nullptr);

void append(std::string& out, char32_t cp);
std::string encode(std::u32string_view s);

/// True if `s` is well-formed UTF-8.
bool valid(std::string_view s);

/// Well-formed copy of `s`; invalid bytes become U+FFFD.
std::string sanitize(std::string_view s, bool* had_errors = nullptr);

bool is_space(char32_t cp);
bool is_word_char(char32_t cp);
bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_upper(char32_t cp);

}  // namespace kex::utf8
