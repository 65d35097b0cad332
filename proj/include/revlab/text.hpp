#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace revlab {

// Splits on '\n' only ('\r' stays inside the line so reconstruction is
// byte-exact). A trailing newline does not produce a final empty line.
inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(pos));
      break;
    }
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

inline bool has_trailing_newline(std::string_view text) {
  return !text.empty() && text.back() == '\n';
}

inline std::string join_lines(const std::vector<std::string>& lines, bool trailing_newline) {
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    out += lines[i];
    if (i + 1 < lines.size()) out += '\n';
  }
  if (trailing_newline && !lines.empty()) out += '\n';
  return out;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool contains_ci(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return true;
  std::string h = to_lower(haystack);
  std::string n = to_lower(needle);
  return h.find(n) != std::string::npos;
}

inline std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

struct SanitizedText {
  std::string text;
  int replaced = 0;  // count of invalid byte sequences replaced with U+FFFD
};

// Validates UTF-8 (rejecting overlongs, surrogates, and values past U+10FFFF)
// and replaces each invalid sequence with the replacement character.
inline SanitizedText sanitize_utf8(std::string_view bytes) {
  static const char kReplacement[] = "\xEF\xBF\xBD";
  SanitizedText out;
  out.text.reserve(bytes.size());
  size_t i = 0;
  while (i < bytes.size()) {
    unsigned char b0 = static_cast<unsigned char>(bytes[i]);
    size_t len = 0;
    uint32_t code = 0;
    if (b0 < 0x80) {
      out.text += static_cast<char>(b0);
      ++i;
      continue;
    } else if ((b0 & 0xe0) == 0xc0) {
      len = 2;
      code = b0 & 0x1f;
    } else if ((b0 & 0xf0) == 0xe0) {
      len = 3;
      code = b0 & 0x0f;
    } else if ((b0 & 0xf8) == 0xf0) {
      len = 4;
      code = b0 & 0x07;
    } else {
      out.text += kReplacement;
      out.replaced += 1;
      ++i;
      continue;
    }
    bool valid = i + len <= bytes.size();
    for (size_t k = 1; valid && k < len; ++k) {
      unsigned char bk = static_cast<unsigned char>(bytes[i + k]);
      if ((bk & 0xc0) != 0x80)
        valid = false;
      else
        code = (code << 6) | (bk & 0x3f);
    }
    if (valid) {
      if (len == 2 && code < 0x80) valid = false;
      if (len == 3 && code < 0x800) valid = false;
      if (len == 4 && code < 0x10000) valid = false;
      if (code >= 0xd800 && code <= 0xdfff) valid = false;
      if (code > 0x10ffff) valid = false;
    }
    if (valid) {
      out.text.append(bytes.substr(i, len));
      i += len;
    } else {
      out.text += kReplacement;
      out.replaced += 1;
      ++i;  // resync one byte at a time
    }
  }
  return out;
}

}  // namespace revlab
