#include "utf8.hpp"

namespace lid::utf8 {

namespace {

constexpr char32_t kEscapeBase = 0xDC00;

bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

}  // namespace

Decoded decode(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  const std::size_t remaining = s.size() - pos;

  if (b0 < 0x80) return {b0, 1};

  auto escape = [&]() -> Decoded { return {kEscapeBase + b0, 1}; };

  unsigned len;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return escape();
  }
  if (remaining < len) return escape();
  for (unsigned i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if (!is_continuation(b)) return escape();
    cp = (cp << 6) | (b & 0x3F);
  }
  // Reject overlongs, surrogates and out-of-range values rather than
  // aliasing them with well-formed input.
  static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
    return escape();
  return {cp, len};
}

void encode(char32_t cp, std::string& out) {
  if (cp >= kEscapeBase && cp <= kEscapeBase + 0xFF) {
    out.push_back(static_cast<char>(cp - kEscapeBase));
  } else if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::vector<std::size_t> codepoint_offsets(std::string_view s) {
  std::vector<std::size_t> offsets;
  offsets.reserve(s.size() + 1);
  std::size_t pos = 0;
  while (pos < s.size()) {
    offsets.push_back(pos);
    pos += decode(s, pos).length;
  }
  offsets.push_back(s.size());
  return offsets;
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= U'A' && cp <= U'Z') ? cp + 0x20 : cp;
  // Latin-1 supplement (multiplication sign excluded).
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  // Latin Extended-A: alternating upper/lower pairs.
  if (cp >= 0x100 && cp <= 0x137) {
    if (cp == 0x130) return U'i';  // simple fold for dotted capital I
    return (cp & 1) ? cp : cp + 1;
  }
  if (cp >= 0x139 && cp <= 0x148) return (cp & 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return (cp & 1) ? cp : cp + 1;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x179 && cp <= 0x17E) return (cp & 1) ? cp + 1 : cp;
  // The regular parts of Latin Extended-B (carons, ogoneks, comma accents).
  if (cp >= 0x1CD && cp <= 0x1DC) return (cp & 1) ? cp + 1 : cp;
  if (cp >= 0x1DE && cp <= 0x1EF) return (cp & 1) ? cp : cp + 1;
  if (cp >= 0x1F8 && cp <= 0x21F) return (cp & 1) ? cp : cp + 1;
  if (cp >= 0x222 && cp <= 0x233) return (cp & 1) ? cp : cp + 1;
  // Greek.
  if (cp == 0x386) return 0x3AC;
  if (cp >= 0x388 && cp <= 0x38A) return cp + 0x25;
  if (cp == 0x38C) return 0x3CC;
  if (cp == 0x38E || cp == 0x38F) return cp + 0x3F;
  if (cp >= 0x391 && cp <= 0x3A1) return cp + 0x20;
  if (cp >= 0x3A3 && cp <= 0x3AB) return cp + 0x20;
  // Cyrillic.
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x460 && cp <= 0x481) return (cp & 1) ? cp : cp + 1;
  if (cp >= 0x48A && cp <= 0x4BF) return (cp & 1) ? cp : cp + 1;
  if (cp == 0x4C0) return 0x4CF;
  if (cp >= 0x4C1 && cp <= 0x4CE) return (cp & 1) ? cp + 1 : cp;
  if (cp >= 0x4D0 && cp <= 0x52F) return (cp & 1) ? cp : cp + 1;
  // Latin Extended Additional (Vietnamese, Venda, ...).
  if (cp >= 0x1E00 && cp <= 0x1E95) return (cp & 1) ? cp : cp + 1;
  if (cp >= 0x1EA0 && cp <= 0x1EFF) return (cp & 1) ? cp : cp + 1;
  return cp;
}

bool is_space(char32_t cp) {
  switch (cp) {
    case 0x09:
    case 0x0A:
    case 0x0B:
    case 0x0C:
    case 0x0D:
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

}  // namespace lid::utf8
