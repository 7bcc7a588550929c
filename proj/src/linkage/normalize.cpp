#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/translit.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <memory>
#include <stdexcept>

#include "revmatch/linkage.hpp"

namespace revmatch {
namespace {

bool is_punct_or_symbol(UChar32 c) {
  return (U_GET_GC_MASK(c) & (U_GC_P_MASK | U_GC_S_MASK)) != 0;
}

bool is_upper_or_title(UChar32 c) {
  return (U_GET_GC_MASK(c) & (U_GC_LU_MASK | U_GC_LT_MASK)) != 0;
}

icu::UnicodeString nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  if (U_FAILURE(status)) return in;
  icu::UnicodeString out = norm->normalize(in, status);
  return U_FAILURE(status) ? in : out;
}

icu::UnicodeString strip_punctuation(const icu::UnicodeString& s) {
  icu::UnicodeString out;
  for (int32_t i = 0; i < s.length();) {
    const UChar32 c = s.char32At(i);
    if (!is_punct_or_symbol(c)) out.append(c);
    i = s.moveIndex32(i, 1);
  }
  return out;
}

// Lowercases; code points that stay upper/titlecase (no lowercase mapping
// exists) are dropped so the output never contains them.
icu::UnicodeString lower(icu::UnicodeString s) {
  s.toLower(icu::Locale::getRoot());
  icu::UnicodeString out;
  for (int32_t i = 0; i < s.length();) {
    const UChar32 c = s.char32At(i);
    if (!is_upper_or_title(c)) out.append(c);
    i = s.moveIndex32(i, 1);
  }
  return out;
}

std::vector<std::string> split_whitespace(const icu::UnicodeString& s) {
  std::vector<std::string> out;
  icu::UnicodeString current;
  auto flush = [&] {
    if (!current.isEmpty()) {
      std::string utf8;
      current.toUTF8String(utf8);
      out.push_back(std::move(utf8));
      current.remove();
    }
  };
  for (int32_t i = 0; i < s.length();) {
    const UChar32 c = s.char32At(i);
    if (u_isUWhiteSpace(c)) {
      flush();
    } else {
      current.append(c);
    }
    i = s.moveIndex32(i, 1);
  }
  flush();
  return out;
}

icu::Transliterator& ascii_transliterator() {
  thread_local std::unique_ptr<icu::Transliterator> instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::Transliterator> t(
        icu::Transliterator::createInstance("Any-Latin; Latin-ASCII", UTRANS_FORWARD, status));
    if (U_FAILURE(status) || !t) throw std::runtime_error("ICU transliterator unavailable");
    return t;
  }();
  return *instance;
}

}  // namespace

std::string NormalizedTitle::joined() const {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

NormalizedTitle normalize_title(std::string_view title) {
  return NormalizedTitle{split_whitespace(lower(strip_punctuation(nfc(title))))};
}

bool titles_match(std::string_view t1, std::string_view t2) {
  return normalize_title(t1) == normalize_title(t2);
}

const RomanNumeralTable& default_roman_numerals() {
  static const RomanNumeralTable table = {
      {"II", "second"}, {"III", "third"},   {"IV", "fourth"},  {"V", "fifth"},
      {"VI", "sixth"},  {"VII", "seventh"}, {"VIII", "eighth"},
  };
  return table;
}

NormalizedName normalize_name(std::string_view name, const RomanNumeralTable& roman) {
  std::vector<std::string> raw = split_whitespace(nfc(name));
  if (raw.size() >= 2) {
    std::string suffix;
    strip_punctuation(icu::UnicodeString::fromUTF8(raw.back())).toUTF8String(suffix);
    if (auto it = roman.find(suffix); it != roman.end()) raw.back() = it->second;
  }
  icu::UnicodeString joined;
  for (const auto& token : raw) {
    joined.append(icu::UnicodeString::fromUTF8(token));
    joined.append(static_cast<UChar32>(' '));
  }
  ascii_transliterator().transliterate(joined);
  icu::UnicodeString ascii;
  for (int32_t i = 0; i < joined.length();) {
    const UChar32 c = joined.char32At(i);
    if (c < 0x80 || u_isUWhiteSpace(c)) ascii.append(c);
    i = joined.moveIndex32(i, 1);
  }
  return NormalizedName{split_whitespace(lower(strip_punctuation(ascii)))};
}

}  // namespace revmatch
