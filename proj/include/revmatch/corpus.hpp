#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "revmatch/util/io.hpp"

namespace revmatch {

enum class SourceTag { kGraph, kReviewPlatform, kRegistry };

std::string_view to_string(SourceTag tag);
SourceTag parse_source_tag(std::string_view text);

/// Identifier of a record inside one data source.
struct SourceId {
  SourceTag tag = SourceTag::kGraph;
  std::string local_id;

  /// "tag:local_id"; used as a stable key in manifests and seeds.
  std::string key() const;
  static SourceId parse_key(std::string_view key);

  auto operator<=>(const SourceId&) const = default;
  bool operator==(const SourceId&) const = default;
};

struct SourceIdHash {
  std::size_t operator()(const SourceId& id) const noexcept;
};

struct Publication {
  SourceId id;
  std::string title;
  std::optional<std::string> abstract;
  std::vector<SourceId> author_ids;
  int year = 0;
  std::int64_t citation_count = 0;
  std::optional<std::string> venue;

  bool operator==(const Publication&) const = default;
};

struct ScholarProfile {
  std::vector<SourceId> ids;
  std::string display_name;
  std::vector<SourceId> publication_ids;
  int h_index = 0;  // cached; Corpus keeps it consistent

  const SourceId& primary_id() const { return ids.front(); }
  bool operator==(const ScholarProfile&) const = default;
};

struct ReviewRecord {
  SourceId paper_id;
  std::vector<SourceId> reviewer_ids;
  std::optional<SourceId> editor_id;
  std::vector<SourceId> unqualified_ids;
  std::vector<SourceId> potential_ids;
  std::string l1_category;
  std::string l3_category;

  std::string record_id() const { return paper_id.key(); }
  bool operator==(const ReviewRecord&) const = default;
};

/// Cross-references that do not resolve.
class IntegrityError : public std::runtime_error {
 public:
  explicit IntegrityError(std::vector<std::string> offenders);
  const std::vector<std::string>& offenders() const { return offenders_; }

 private:
  std::vector<std::string> offenders_;
};

/// Maximum h such that at least h entries are >= h.
int compute_h_index(std::span<const std::int64_t> citation_counts);

/// Immutable collection of publications, scholars and review records with
/// id indexes. Construction checks every invariant and cross-reference.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<Publication> publications, std::vector<ScholarProfile> scholars,
         std::vector<ReviewRecord> records);

  const std::vector<Publication>& publications() const { return publications_; }
  const std::vector<ScholarProfile>& scholars() const { return scholars_; }
  const std::vector<ReviewRecord>& records() const { return records_; }

  const Publication* find_publication(const SourceId& id) const;
  /// Looks a scholar up by any of its ids.
  const ScholarProfile* find_scholar(const SourceId& id) const;

  std::vector<const Publication*> publications_of(const ScholarProfile& scholar) const;

  /// Scholars and publications whose primary tag satisfies `keep`; author
  /// lists are trimmed to retained scholars, publications left without
  /// authors are dropped, and records are not carried over.
  Corpus subset(const std::function<bool(SourceTag)>& keep) const;

  bool operator==(const Corpus& other) const;

 private:
  void build_indexes();

  std::vector<Publication> publications_;
  std::vector<ScholarProfile> scholars_;
  std::vector<ReviewRecord> records_;
  std::unordered_map<SourceId, std::size_t, SourceIdHash> pub_index_;
  std::unordered_map<SourceId, std::size_t, SourceIdHash> scholar_index_;
};

struct RecordViolation {
  std::string rule;
  std::string subject;  // offending id key, or empty for record-level rules

  bool operator==(const RecordViolation&) const = default;
};

/// Empty iff every ReviewRecord invariant holds against `corpus`.
std::vector<RecordViolation> validate_record(const ReviewRecord& record, const Corpus& corpus);

// publications.jsonl / scholars.jsonl / records.jsonl, one object per line.
inline constexpr std::string_view kPublicationsFile = "publications.jsonl";
inline constexpr std::string_view kScholarsFile = "scholars.jsonl";
inline constexpr std::string_view kRecordsFile = "records.jsonl";

Corpus load_corpus(const std::filesystem::path& dir);
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);

void to_json(json& j, const SourceId& id);
void from_json(const json& j, SourceId& id);
void to_json(json& j, const Publication& p);
void from_json(const json& j, Publication& p);
void to_json(json& j, const ScholarProfile& s);
void from_json(const json& j, ScholarProfile& s);
void to_json(json& j, const ReviewRecord& r);
void from_json(const json& j, ReviewRecord& r);

std::string to_jsonl(std::span<const ReviewRecord> records);

}  // namespace revmatch
