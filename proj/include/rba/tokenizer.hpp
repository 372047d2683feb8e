#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rba {

namespace detail {

// Decodes the UTF-8 sequence starting at text[i] into cp and returns its
// byte length, or 0 for a malformed byte.
inline std::size_t decode_utf8(std::string_view text, std::size_t i, char32_t& cp) {
  unsigned char b0 = static_cast<unsigned char>(text[i]);
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  std::size_t len;
  if ((b0 & 0xE0) == 0xC0) {
    cp = b0 & 0x1F;
    len = 2;
  } else if ((b0 & 0xF0) == 0xE0) {
    cp = b0 & 0x0F;
    len = 3;
  } else if ((b0 & 0xF8) == 0xF0) {
    cp = b0 & 0x07;
    len = 4;
  } else {
    return 0;
  }
  if (i + len > text.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    unsigned char b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  return len;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
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

// Word characters: ASCII alphanumerics, Latin-1 letters, and codepoints of
// other scripts. Latin-1 symbols (U+0080..U+00BF, multiplication and
// division signs) and the general punctuation block split tokens.
inline bool is_token_char(char32_t cp) {
  if (cp < 0x80)
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z');
  if (cp < 0xC0) return false;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp < 0x2070) return false;
  return true;
}

// ASCII and Latin-1 case folding; other scripts pass through unchanged.
inline char32_t fold_case(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

}  // namespace detail

// Deterministic lowercase tokenization: splits on every non-alphanumeric
// codepoint and never inside a UTF-8 sequence. Total function; malformed
// bytes act as separators.
std::vector<std::string> tokenize(std::string_view text);

// Streaming form used by the indexing and magnitude scans. fn receives a
// reused buffer that is only valid for the duration of the call.
template <typename Fn>
void for_each_token(std::string_view text, Fn&& fn) {
  std::string token;
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = 0;
    std::size_t len = detail::decode_utf8(text, i, cp);
    if (len == 0) {
      if (!token.empty()) {
        fn(token);
        token.clear();
      }
      ++i;
      continue;
    }
    if (detail::is_token_char(cp)) {
      detail::append_utf8(token, detail::fold_case(cp));
    } else if (!token.empty()) {
      fn(token);
      token.clear();
    }
    i += len;
  }
  if (!token.empty()) fn(token);
}

}  // namespace rba
