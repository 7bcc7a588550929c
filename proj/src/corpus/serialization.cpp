#include <fstream>
#include <sstream>

#include "revmatch/corpus.hpp"

namespace revmatch {
namespace {

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

template <typename T>
std::string dump_lines(const std::vector<T>& items) {
  std::string out;
  for (const auto& item : items) {
    out += json(item).dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace

void to_json(json& j, const SourceId& id) {
  j = json{{"tag", std::string(to_string(id.tag))}, {"local_id", id.local_id}};
}

void from_json(const json& j, SourceId& id) {
  id.tag = parse_source_tag(j.at("tag").get<std::string>());
  id.local_id = j.at("local_id").get<std::string>();
  if (id.local_id.empty()) throw std::invalid_argument("empty local_id");
}

void to_json(json& j, const Publication& p) {
  j = json{{"id", p.id}, {"title", p.title}};
  if (p.abstract) j["abstract"] = *p.abstract;
  j["author_ids"] = p.author_ids;
  j["year"] = p.year;
  j["citation_count"] = p.citation_count;
  if (p.venue) j["venue"] = *p.venue;
}

void from_json(const json& j, Publication& p) {
  p.id = j.at("id").get<SourceId>();
  p.title = j.at("title").get<std::string>();
  p.abstract = optional_field<std::string>(j, "abstract");
  p.author_ids = j.at("author_ids").get<std::vector<SourceId>>();
  p.year = j.at("year").get<int>();
  p.citation_count = j.at("citation_count").get<std::int64_t>();
  p.venue = optional_field<std::string>(j, "venue");
}

void to_json(json& j, const ScholarProfile& s) {
  j = json{{"ids", s.ids}, {"display_name", s.display_name}, {"publication_ids", s.publication_ids}};
}

void from_json(const json& j, ScholarProfile& s) {
  s.ids = j.at("ids").get<std::vector<SourceId>>();
  s.display_name = j.at("display_name").get<std::string>();
  s.publication_ids = j.at("publication_ids").get<std::vector<SourceId>>();
}

void to_json(json& j, const ReviewRecord& r) {
  j = json{{"paper_id", r.paper_id}, {"reviewer_ids", r.reviewer_ids}};
  j["editor_id"] = r.editor_id ? json(*r.editor_id) : json(nullptr);
  j["unqualified_ids"] = r.unqualified_ids;
  j["potential_ids"] = r.potential_ids;
  j["l1_category"] = r.l1_category;
  j["l3_category"] = r.l3_category;
}

void from_json(const json& j, ReviewRecord& r) {
  r.paper_id = j.at("paper_id").get<SourceId>();
  r.reviewer_ids = j.at("reviewer_ids").get<std::vector<SourceId>>();
  r.editor_id = optional_field<SourceId>(j, "editor_id");
  r.unqualified_ids = j.value("unqualified_ids", std::vector<SourceId>{});
  r.potential_ids = j.value("potential_ids", std::vector<SourceId>{});
  r.l1_category = j.value("l1_category", std::string{});
  r.l3_category = j.value("l3_category", std::string{});
}

std::string to_jsonl(std::span<const ReviewRecord> records) {
  return dump_lines(std::vector<ReviewRecord>(records.begin(), records.end()));
}

Corpus load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("corpus directory not found: " + dir.string());
  }
  std::vector<Publication> pubs;
  std::vector<ScholarProfile> scholars;
  std::vector<ReviewRecord> records;
  read_jsonl(dir / kPublicationsFile, [&](const json& j, std::size_t) { pubs.push_back(j.get<Publication>()); });
  read_jsonl(dir / kScholarsFile, [&](const json& j, std::size_t) { scholars.push_back(j.get<ScholarProfile>()); });
  read_jsonl(dir / kRecordsFile, [&](const json& j, std::size_t) { records.push_back(j.get<ReviewRecord>()); });
  return Corpus(std::move(pubs), std::move(scholars), std::move(records));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / kPublicationsFile, dump_lines(corpus.publications()));
  write_file_atomic(dir / kScholarsFile, dump_lines(corpus.scholars()));
  write_file_atomic(dir / kRecordsFile, dump_lines(corpus.records()));
}

}  // namespace revmatch
