#ifndef GLYPHGAN_UTF8_HPP
#define GLYPHGAN_UTF8_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace glyphgan::utf8 {

// Decodes the first scalar value of `s`. Returns the code point and the
// number of bytes consumed, or nullopt on malformed input.
inline std::optional<std::pair<char32_t, int>> decode_first(std::string_view s) {
  if (s.empty()) return std::nullopt;
  const auto b0 = static_cast<uint8_t>(s[0]);
  auto cont = [&](int i) {
    return i < static_cast<int>(s.size()) &&
           (static_cast<uint8_t>(s[i]) & 0xC0u) == 0x80u;
  };
  if (b0 < 0x80u) return {{static_cast<char32_t>(b0), 1}};
  if ((b0 & 0xE0u) == 0xC0u) {
    if (!cont(1)) return std::nullopt;
    char32_t c = ((b0 & 0x1Fu) << 6) | (static_cast<uint8_t>(s[1]) & 0x3Fu);
    if (c < 0x80) return std::nullopt;
    return {{c, 2}};
  }
  if ((b0 & 0xF0u) == 0xE0u) {
    if (!cont(1) || !cont(2)) return std::nullopt;
    char32_t c = ((b0 & 0x0Fu) << 12) |
                 ((static_cast<uint8_t>(s[1]) & 0x3Fu) << 6) |
                 (static_cast<uint8_t>(s[2]) & 0x3Fu);
    if (c < 0x800 || (c >= 0xD800 && c <= 0xDFFF)) return std::nullopt;
    return {{c, 3}};
  }
  if ((b0 & 0xF8u) == 0xF0u) {
    if (!cont(1) || !cont(2) || !cont(3)) return std::nullopt;
    char32_t c = ((b0 & 0x07u) << 18) |
                 ((static_cast<uint8_t>(s[1]) & 0x3Fu) << 12) |
                 ((static_cast<uint8_t>(s[2]) & 0x3Fu) << 6) |
                 (static_cast<uint8_t>(s[3]) & 0x3Fu);
    if (c < 0x10000 || c > 0x10FFFF) return std::nullopt;
    return {{c, 4}};
  }
  return std::nullopt;
}

inline std::string encode(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
  return out;
}

}  // namespace glyphgan::utf8

#endif
