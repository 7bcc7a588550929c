#include <algorithm>
#include <set>
#include <unordered_set>

#include "revmatch/corpus.hpp"

namespace revmatch {
namespace {

std::string join_offenders(const std::vector<std::string>& offenders) {
  std::string out = "referential integrity violated: ";
  for (std::size_t i = 0; i < offenders.size() && i < 20; ++i) {
    if (i) out += "; ";
    out += offenders[i];
  }
  if (offenders.size() > 20) out += "; ... (" + std::to_string(offenders.size()) + " total)";
  return out;
}

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

IntegrityError::IntegrityError(std::vector<std::string> offenders)
    : std::runtime_error(join_offenders(offenders)), offenders_(std::move(offenders)) {}

int compute_h_index(std::span<const std::int64_t> citation_counts) {
  std::vector<std::int64_t> sorted(citation_counts.begin(), citation_counts.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  int h = 0;
  while (h < static_cast<int>(sorted.size()) && sorted[h] >= h + 1) ++h;
  return h;
}

Corpus::Corpus(std::vector<Publication> publications, std::vector<ScholarProfile> scholars,
               std::vector<ReviewRecord> records)
    : publications_(std::move(publications)),
      scholars_(std::move(scholars)),
      records_(std::move(records)) {
  std::vector<std::string> offenders;
  for (const auto& p : publications_) {
    if (p.id.local_id.empty()) offenders.push_back("publication with empty local_id");
    if (blank(p.title)) offenders.push_back("publication " + p.id.key() + ": empty title");
    if (p.author_ids.empty()) offenders.push_back("publication " + p.id.key() + ": no authors");
    if (p.citation_count < 0) offenders.push_back("publication " + p.id.key() + ": negative citations");
  }
  for (const auto& s : scholars_) {
    if (s.ids.empty()) {
      offenders.push_back("scholar '" + s.display_name + "' without ids");
      continue;
    }
    std::set<SourceTag> tags;
    for (const auto& id : s.ids) {
      if (!tags.insert(id.tag).second) offenders.push_back("scholar " + s.primary_id().key() + ": duplicate source tag");
    }
  }
  if (!offenders.empty()) throw IntegrityError(std::move(offenders));

  build_indexes();
  if (pub_index_.size() != publications_.size()) offenders.push_back("duplicate publication ids");
  std::size_t scholar_ids = 0;
  for (const auto& s : scholars_) scholar_ids += s.ids.size();
  if (scholar_index_.size() != scholar_ids) offenders.push_back("duplicate scholar ids");

  for (const auto& p : publications_) {
    for (const auto& a : p.author_ids) {
      if (!find_scholar(a)) offenders.push_back("publication " + p.id.key() + " -> missing author " + a.key());
    }
  }
  for (auto& s : scholars_) {
    std::vector<std::int64_t> cites;
    for (const auto& pid : s.publication_ids) {
      const Publication* p = find_publication(pid);
      if (!p) {
        offenders.push_back("scholar " + s.primary_id().key() + " -> missing publication " + pid.key());
      } else {
        cites.push_back(p->citation_count);
      }
    }
    s.h_index = compute_h_index(cites);
  }
  for (const auto& r : records_) {
    if (!find_publication(r.paper_id)) offenders.push_back("record -> missing paper " + r.paper_id.key());
    auto check = [&](const SourceId& id, const char* role) {
      if (!find_scholar(id)) offenders.push_back("record " + r.record_id() + " -> missing " + role + " " + id.key());
    };
    for (const auto& id : r.reviewer_ids) check(id, "reviewer");
    for (const auto& id : r.unqualified_ids) check(id, "unqualified candidate");
    for (const auto& id : r.potential_ids) check(id, "potential candidate");
    if (r.editor_id) check(*r.editor_id, "editor");
  }
  if (!offenders.empty()) throw IntegrityError(std::move(offenders));
}

void Corpus::build_indexes() {
  pub_index_.clear();
  scholar_index_.clear();
  for (std::size_t i = 0; i < publications_.size(); ++i) pub_index_.emplace(publications_[i].id, i);
  for (std::size_t i = 0; i < scholars_.size(); ++i) {
    for (const auto& id : scholars_[i].ids) scholar_index_.emplace(id, i);
  }
}

const Publication* Corpus::find_publication(const SourceId& id) const {
  auto it = pub_index_.find(id);
  return it == pub_index_.end() ? nullptr : &publications_[it->second];
}

const ScholarProfile* Corpus::find_scholar(const SourceId& id) const {
  auto it = scholar_index_.find(id);
  return it == scholar_index_.end() ? nullptr : &scholars_[it->second];
}

std::vector<const Publication*> Corpus::publications_of(const ScholarProfile& scholar) const {
  std::vector<const Publication*> out;
  out.reserve(scholar.publication_ids.size());
  for (const auto& id : scholar.publication_ids) {
    if (const Publication* p = find_publication(id)) out.push_back(p);
  }
  return out;
}

Corpus Corpus::subset(const std::function<bool(SourceTag)>& keep) const {
  std::unordered_set<SourceId, SourceIdHash> kept_scholars;
  for (const auto& s : scholars_) {
    if (keep(s.primary_id().tag)) kept_scholars.insert(s.ids.begin(), s.ids.end());
  }
  std::vector<Publication> pubs;
  std::unordered_set<SourceId, SourceIdHash> kept_pubs;
  for (const auto& p : publications_) {
    if (!keep(p.id.tag)) continue;
    Publication copy = p;
    std::erase_if(copy.author_ids, [&](const SourceId& a) { return !kept_scholars.count(a); });
    if (copy.author_ids.empty()) continue;
    kept_pubs.insert(copy.id);
    pubs.push_back(std::move(copy));
  }
  std::vector<ScholarProfile> scholars;
  for (const auto& s : scholars_) {
    if (!keep(s.primary_id().tag)) continue;
    ScholarProfile copy = s;
    std::erase_if(copy.publication_ids, [&](const SourceId& p) { return !kept_pubs.count(p); });
    scholars.push_back(std::move(copy));
  }
  return Corpus(std::move(pubs), std::move(scholars), {});
}

bool Corpus::operator==(const Corpus& other) const {
  return publications_ == other.publications_ && scholars_ == other.scholars_ &&
         records_ == other.records_;
}

std::vector<RecordViolation> validate_record(const ReviewRecord& record, const Corpus& corpus) {
  std::vector<RecordViolation> out;
  if (record.reviewer_ids.empty()) out.push_back({"reviewer_ids must be non-empty", ""});

  std::set<SourceId> unqualified(record.unqualified_ids.begin(), record.unqualified_ids.end());
  std::set<SourceId> potential(record.potential_ids.begin(), record.potential_ids.end());
  for (const auto& id : record.potential_ids) {
    if (unqualified.count(id)) out.push_back({"candidate in both unqualified and potential pools", id.key()});
  }
  for (const auto& id : record.reviewer_ids) {
    if (unqualified.count(id)) out.push_back({"reviewer in unqualified pool", id.key()});
    if (potential.count(id)) out.push_back({"reviewer in potential pool", id.key()});
  }

  // Authors are compared by scholar identity so that linked ids also count.
  const Publication* paper = corpus.find_publication(record.paper_id);
  if (!paper) {
    out.push_back({"paper not found in corpus", record.paper_id.key()});
    return out;
  }
  std::set<const ScholarProfile*> authors;
  for (const auto& a : paper->author_ids) {
    if (const auto* s = corpus.find_scholar(a)) authors.insert(s);
  }
  auto check_authors = [&](const std::vector<SourceId>& ids, const char* rule) {
    for (const auto& id : ids) {
      const auto* s = corpus.find_scholar(id);
      if (s && authors.count(s)) out.push_back({rule, id.key()});
    }
  };
  check_authors(record.reviewer_ids, "paper author listed as reviewer");
  check_authors(record.unqualified_ids, "paper author in unqualified pool");
  check_authors(record.potential_ids, "paper author in potential pool");
  return out;
}

}  // namespace revmatch
