#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace presuppose::retrieval {

// Invalid bytes decode to U+FFFD one byte at a time.
std::vector<char32_t> utf8_decode(std::string_view text);
void utf8_append(std::string& out, char32_t cp);

// Named (common subset) and numeric character references.
std::string decode_entities(std::string_view text);

// Runs of whitespace (including U+00A0) become one ASCII space.
std::string collapse_whitespace(std::string_view text);

}  // namespace presuppose::retrieval
