#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace geoprov {

std::string to_lower_ascii(std::string_view s);
std::string to_upper_ascii(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

// RFC 3986 percent-decoding. '+' is left untouched. Throws InvalidArgument on
// a truncated or non-hex escape.
std::string percent_decode(std::string_view s);
// Encodes everything outside the unreserved set.
std::string percent_encode(std::string_view s);

// UTF-8 <-> code points. Invalid bytes decode to U+FFFD.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);

// Simple lower-case mapping for Latin, Greek and Cyrillic blocks.
char32_t fold_case(char32_t c);
std::string fold_case_utf8(std::string_view s);
bool is_letter(char32_t c);

}  // namespace geoprov
