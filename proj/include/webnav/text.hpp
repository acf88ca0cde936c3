#pragma once

#include <string>
#include <string_view>

namespace webnav {

// Collapses runs of whitespace (ASCII whitespace and U+00A0) to one space
// and trims both ends.
std::string normalize_whitespace(std::string_view text);

// ASCII-only lowercase; other bytes pass through untouched.
std::string ascii_lower(std::string_view text);

// normalize_whitespace followed by ascii_lower.
std::string normalize_for_match(std::string_view text);

bool is_ascii_space(char c) noexcept;

void append_utf8(std::string& out, char32_t code_point);

}  // namespace webnav
