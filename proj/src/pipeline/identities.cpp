#include <algorithm>
#include <set>
#include <unordered_set>

#include "revmatch/pipeline.hpp"
#include "revmatch/util/hash.hpp"
#include "revmatch/util/rng.hpp"

namespace revmatch {

Corpus merge_linked_identities(const Corpus& corpus, const LinkTable& links) {
  std::unordered_map<SourceId, std::vector<const LinkEntry*>, SourceIdHash> by_right;
  std::unordered_set<SourceId, SourceIdHash> merged_left;
  for (const LinkEntry& e : links.entries) {
    by_right[e.right].push_back(&e);
    merged_left.insert(e.left);
  }

  // A linked profile's publications whose titles appear in its evidence are
  // copies of graph-side publications.
  std::unordered_set<SourceId, SourceIdHash> dropped;
  for (const LinkEntry& e : links.entries) {
    const ScholarProfile* left = corpus.find_scholar(e.left);
    if (!left) continue;
    std::set<std::string> dup_titles;
    for (const EvidencePair& ev : e.evidence) dup_titles.insert(normalize_title(ev.left_title).joined());
    for (const Publication* p : corpus.publications_of(*left)) {
      if (dup_titles.count(normalize_title(p->title).joined())) dropped.insert(p->id);
    }
  }

  std::vector<Publication> pubs;
  for (const Publication& p : corpus.publications()) {
    if (!dropped.count(p.id)) pubs.push_back(p);
  }
  auto keep_pubs = [&](const std::vector<SourceId>& ids) {
    std::vector<SourceId> out;
    for (const SourceId& id : ids) {
      if (!dropped.count(id)) out.push_back(id);
    }
    return out;
  };

  std::vector<ScholarProfile> scholars;
  for (const ScholarProfile& s : corpus.scholars()) {
    if (merged_left.count(s.primary_id())) continue;
    ScholarProfile out = s;
    out.publication_ids = keep_pubs(s.publication_ids);
    auto it = by_right.find(s.primary_id());
    for (const LinkEntry* e : it == by_right.end() ? std::vector<const LinkEntry*>{} : it->second) {
      const ScholarProfile* left = corpus.find_scholar(e->left);
      for (const SourceId& id : left->ids) {
        const bool tag_taken = std::any_of(out.ids.begin(), out.ids.end(),
                                           [&](const SourceId& o) { return o.tag == id.tag; });
        if (!tag_taken) out.ids.push_back(id);
      }
      for (const SourceId& p : keep_pubs(left->publication_ids)) {
        if (std::find(out.publication_ids.begin(), out.publication_ids.end(), p) == out.publication_ids.end()) {
          out.publication_ids.push_back(p);
        }
      }
    }
    scholars.push_back(std::move(out));
  }
  // Authors that were merged away are addressed through the surviving
  // profile's secondary ids; authors whose tag slot was already taken are
  // rewritten to the surviving primary id.
  std::unordered_map<SourceId, SourceId, SourceIdHash> rewrite;
  for (const LinkEntry& e : links.entries) {
    const ScholarProfile* left = corpus.find_scholar(e.left);
    if (!left) continue;
    for (const SourceId& id : left->ids) rewrite[id] = e.right;
  }
  std::unordered_set<SourceId, SourceIdHash> known;
  for (const ScholarProfile& s : scholars) known.insert(s.ids.begin(), s.ids.end());
  for (Publication& p : pubs) {
    std::vector<SourceId> authors;
    for (const SourceId& a : p.author_ids) {
      SourceId id = known.count(a) ? a : rewrite.at(a);
      if (std::find(authors.begin(), authors.end(), id) == authors.end()) authors.push_back(id);
    }
    p.author_ids = std::move(authors);
  }

  std::vector<ReviewRecord> records = corpus.records();
  for (ReviewRecord& r : records) {
    auto fix = [&](SourceId& id) {
      if (!known.count(id) && rewrite.count(id)) id = rewrite.at(id);
    };
    for (SourceId& id : r.reviewer_ids) fix(id);
    for (SourceId& id : r.unqualified_ids) fix(id);
    for (SourceId& id : r.potential_ids) fix(id);
    if (r.editor_id) fix(*r.editor_id);
  }
  return Corpus(std::move(pubs), std::move(scholars), std::move(records));
}

std::vector<SourceId> distant_candidates(const ReviewRecord& record, const Taxonomy& taxonomy,
                                         std::span<const ScholarSubjects> subjects, std::size_t limit,
                                         std::uint64_t seed) {
  const EmbeddingVector& ref = *taxonomy.node(record.l3_category).embedding;
  std::vector<std::pair<double, std::string>> order;
  for (const std::string& leaf : taxonomy.leaves()) {
    if (leaf == record.l3_category) continue;
    order.emplace_back(ref.dot(*taxonomy.node(leaf).embedding), leaf);
  }
  std::sort(order.begin(), order.end());
  std::set<SourceId> exclude(record.reviewer_ids.begin(), record.reviewer_ids.end());
  for (const auto& [_, leaf] : order) {
    std::vector<SourceId> members;
    for (const ScholarSubjects& s : subjects) {
      if (s.count_in(leaf) > 0 && s.count_in(record.l3_category) == 0 && !exclude.count(s.scholar_id)) {
        members.push_back(s.scholar_id);
      }
    }
    if (members.empty()) continue;
    std::sort(members.begin(), members.end());
    if (members.size() <= limit) return members;
    Rng rng(derive_seed(seed, record.record_id() + ":distant"));
    std::vector<SourceId> out;
    for (std::size_t i : rng.sample_indices(members.size(), limit)) out.push_back(members[i]);
    std::sort(out.begin(), out.end());
    return out;
  }
  return {};
}

}  // namespace revmatch
