#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Lenient UTF-8 handling shared by normalization and truncation. Invalid
// bytes decode to the surrogate escapes U+DC80..U+DCFF and encode back to
// the original byte, so arbitrary byte strings round-trip.

namespace lid::utf8 {

struct Decoded {
  char32_t cp;
  unsigned length;  // bytes consumed, >= 1
};

Decoded decode(std::string_view s, std::size_t pos);

void encode(char32_t cp, std::string& out);

// Byte offset of every code point start, plus s.size() as a sentinel.
std::vector<std::size_t> codepoint_offsets(std::string_view s);

// Simple one-to-one lowercase mapping covering ASCII, Latin-1, Latin
// Extended-A, the regular Extended-B rows, Latin Extended Additional,
// Greek and Cyrillic. Everything else passes through.
char32_t to_lower(char32_t cp);

bool is_space(char32_t cp);

}  // namespace lid::utf8
