#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revmatch/corpus.hpp"

namespace revmatch {

/// Lowercase, punctuation-free title words in original order.
struct NormalizedTitle {
  std::vector<std::string> words;

  std::string joined() const;
  bool operator==(const NormalizedTitle&) const = default;
};

/// Removes every code point of Unicode category P* or S*, lowercases, and
/// splits on Unicode whitespace. Input is NFC-normalized first.
NormalizedTitle normalize_title(std::string_view title);

/// Equal word count and pairwise-equal words.
bool titles_match(std::string_view t1, std::string_view t2);

struct NormalizedName {
  std::vector<std::string> tokens;

  bool operator==(const NormalizedName&) const = default;
};

/// Suffix Roman numeral -> English ordinal word.
using RomanNumeralTable = std::map<std::string, std::string, std::less<>>;
const RomanNumeralTable& default_roman_numerals();

/// Converts a trailing Roman-numeral token (II..VIII by default, matched in
/// upper case) to its ordinal word, transliterates to ASCII (pinyin
/// diacritics drop to base letters, so ü becomes u), removes punctuation and
/// lowercases.
NormalizedName normalize_name(std::string_view name,
                              const RomanNumeralTable& roman = default_roman_numerals());

/// Resolves scholar `a` to an author of `matched_pubs` (publications of
/// `other_source` whose titles match a's publications). Candidates are the
/// authors common to every matched publication. The unique candidate with the
/// largest positive name-token overlap wins; on a tie or zero overlap the tied
/// candidates are compared by the multiset of token initials, and exactly one
/// must agree with a's.
std::optional<SourceId> match_scholar(const ScholarProfile& a,
                                      std::span<const Publication* const> matched_pubs,
                                      const Corpus& other_source);

struct EvidencePair {
  std::string left_title;
  std::string right_title;

  bool operator==(const EvidencePair&) const = default;
};

struct VerifyResult {
  bool matched = false;
  std::vector<EvidencePair> evidence;
};

/// Accepts the pair iff at least one publication title of `a` matches one of
/// `a_prime`; evidence lists every matching pair.
VerifyResult verify_match(const ScholarProfile& a, const Corpus& source_a,
                          const ScholarProfile& a_prime, const Corpus& source_b);

struct LinkEntry {
  SourceId left;
  SourceId right;
  std::vector<EvidencePair> evidence;

  bool operator==(const LinkEntry&) const = default;
};

struct LinkTable {
  std::vector<LinkEntry> entries;  // ordered by left id

  bool operator==(const LinkTable&) const = default;
};

struct LinkOptions {
  /// Scholars rejected by this predicate are skipped on both sides. The
  /// default drops scholars without publications.
  std::function<bool(const ScholarProfile&)> keep_scholar;
  std::size_t jobs = 1;
};

/// Publication matching, scholar matching and verification for every scholar
/// of `a` against `b`.
LinkTable link_sources(const Corpus& a, const Corpus& b, const LinkOptions& options = {});

void save_links(const LinkTable& table, const std::filesystem::path& path);
LinkTable load_links(const std::filesystem::path& path);

}  // namespace revmatch
