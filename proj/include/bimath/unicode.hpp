#pragma once

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <string>
#include <string_view>

#include "bimath/errors.hpp"

namespace bimath::unicode {

inline constexpr char32_t kDevanagariZero = 0x0966;
inline constexpr char32_t kDevanagariNine = 0x096F;

inline std::string nfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  if (norm->isNormalized(src, status) && U_SUCCESS(status)) return std::string(utf8);
  status = U_ZERO_ERROR;
  icu::UnicodeString dst = norm->normalize(src, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string out;
  dst.toUTF8String(out);
  return out;
}

/// Calls `fn(codepoint, byte_offset, byte_length)` for each codepoint.
/// Ill-formed sequences are reported as U+FFFD covering one byte.
template <typename Fn>
void for_each_codepoint(std::string_view s, Fn&& fn) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t len = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < len) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, len, c);
    if (c < 0) c = 0xFFFD;
    fn(static_cast<char32_t>(c), static_cast<std::size_t>(start),
       static_cast<std::size_t>(i - start));
  }
}

inline void append_utf8(std::string& out, char32_t cp) {
  char buf[4];
  int32_t n = 0;
  UBool err = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), n, 4, static_cast<UChar32>(cp), err);
  if (!err) out.append(buf, static_cast<std::size_t>(n));
}

inline bool is_devanagari_digit(char32_t cp) {
  return cp >= kDevanagariZero && cp <= kDevanagariNine;
}

inline bool is_devanagari(char32_t cp) { return cp >= 0x0900 && cp <= 0x097F; }

// Letters and combining signs of the Devanagari block (digits and dandas excluded).
inline bool is_devanagari_letter(char32_t cp) {
  return is_devanagari(cp) && !is_devanagari_digit(cp) && cp != 0x0964 && cp != 0x0965;
}

/// Replaces Devanagari digits U+0966..U+096F with ASCII '0'..'9'.
inline std::string ascii_digits(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for_each_codepoint(s, [&](char32_t cp, std::size_t off, std::size_t n) {
    if (is_devanagari_digit(cp))
      out.push_back(static_cast<char>('0' + (cp - kDevanagariZero)));
    else
      out.append(s.substr(off, n));
  });
  return out;
}

inline std::string devanagari_digits(std::string_view s) {
  std::string out;
  out.reserve(s.size() * 3);
  for (char c : s) {
    if (c >= '0' && c <= '9')
      append_utf8(out, kDevanagariZero + static_cast<char32_t>(c - '0'));
    else
      out.push_back(c);
  }
  return out;
}

}  // namespace bimath::unicode
