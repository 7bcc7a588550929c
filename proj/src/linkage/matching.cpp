#include <algorithm>
#include <set>
#include <unordered_map>

#include "revmatch/linkage.hpp"
#include "revmatch/util/parallel.hpp"

namespace revmatch {
namespace {

std::vector<char> initials(const std::vector<std::string>& tokens) {
  std::vector<char> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.front());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t token_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end());
  std::set<std::string> sb(b.begin(), b.end());
  std::size_t n = 0;
  for (const auto& t : sa) n += sb.count(t);
  return n;
}

using TitleIndex = std::unordered_map<std::string, std::vector<const Publication*>>;

TitleIndex index_titles(const std::vector<const Publication*>& pubs) {
  TitleIndex index;
  for (const Publication* p : pubs) {
    NormalizedTitle t = normalize_title(p->title);
    if (t.words.empty()) continue;
    index[t.joined()].push_back(p);
  }
  return index;
}

}  // namespace

std::optional<SourceId> match_scholar(const ScholarProfile& a,
                                      std::span<const Publication* const> matched_pubs,
                                      const Corpus& other_source) {
  if (matched_pubs.empty()) return std::nullopt;

  // Co-author intersection, by resolved scholar identity.
  std::set<SourceId> common;
  bool first = true;
  for (const Publication* p : matched_pubs) {
    std::set<SourceId> authors;
    for (const auto& id : p->author_ids) {
      if (const ScholarProfile* s = other_source.find_scholar(id)) authors.insert(s->primary_id());
    }
    if (first) {
      common = std::move(authors);
      first = false;
    } else {
      std::set<SourceId> next;
      std::set_intersection(common.begin(), common.end(), authors.begin(), authors.end(),
                            std::inserter(next, next.end()));
      common = std::move(next);
    }
    if (common.empty()) return std::nullopt;
  }

  const NormalizedName name_a = normalize_name(a.display_name);
  std::size_t best_score = 0;
  std::vector<std::pair<SourceId, NormalizedName>> best;
  for (const SourceId& id : common) {
    NormalizedName name_c = normalize_name(other_source.find_scholar(id)->display_name);
    const std::size_t score = token_overlap(name_a.tokens, name_c.tokens);
    if (score > best_score || best.empty()) {
      best_score = score;
      best.clear();
    }
    if (score == best_score) best.emplace_back(id, std::move(name_c));
  }
  if (best_score > 0 && best.size() == 1) return best.front().first;

  if (name_a.tokens.empty()) return std::nullopt;
  const std::vector<char> initials_a = initials(name_a.tokens);
  std::optional<SourceId> found;
  for (const auto& [id, name_c] : best) {
    if (!name_c.tokens.empty() && initials(name_c.tokens) == initials_a) {
      if (found) return std::nullopt;  // ambiguous
      found = id;
    }
  }
  return found;
}

VerifyResult verify_match(const ScholarProfile& a, const Corpus& source_a,
                          const ScholarProfile& a_prime, const Corpus& source_b) {
  VerifyResult result;
  const TitleIndex right = index_titles(source_b.publications_of(a_prime));
  for (const Publication* p : source_a.publications_of(a)) {
    NormalizedTitle t = normalize_title(p->title);
    if (t.words.empty()) continue;
    auto it = right.find(t.joined());
    if (it == right.end()) continue;
    for (const Publication* q : it->second) result.evidence.push_back({p->title, q->title});
  }
  result.matched = !result.evidence.empty();
  return result;
}

LinkTable link_sources(const Corpus& a, const Corpus& b, const LinkOptions& options) {
  auto keep = options.keep_scholar ? options.keep_scholar
                                   : [](const ScholarProfile& s) { return !s.publication_ids.empty(); };

  std::vector<const Publication*> b_pubs;
  b_pubs.reserve(b.publications().size());
  for (const auto& p : b.publications()) b_pubs.push_back(&p);
  const TitleIndex b_titles = index_titles(b_pubs);

  std::vector<const ScholarProfile*> left;
  for (const auto& s : a.scholars()) {
    if (keep(s)) left.push_back(&s);
  }
  std::sort(left.begin(), left.end(),
            [](const ScholarProfile* x, const ScholarProfile* y) { return x->primary_id() < y->primary_id(); });

  std::vector<std::optional<LinkEntry>> slots(left.size());
  parallel_for(left.size(), options.jobs, [&](std::size_t i) {
    const ScholarProfile& scholar = *left[i];
    std::set<SourceId> seen;
    std::vector<const Publication*> matched;
    for (const Publication* p : a.publications_of(scholar)) {
      NormalizedTitle t = normalize_title(p->title);
      if (t.words.empty()) continue;
      auto it = b_titles.find(t.joined());
      if (it == b_titles.end()) continue;
      for (const Publication* q : it->second) {
        if (seen.insert(q->id).second) matched.push_back(q);
      }
    }
    std::sort(matched.begin(), matched.end(),
              [](const Publication* x, const Publication* y) { return x->id < y->id; });
    const std::optional<SourceId> candidate = match_scholar(scholar, matched, b);
    if (!candidate) return;
    const ScholarProfile* partner = b.find_scholar(*candidate);
    if (!partner || !keep(*partner)) return;
    VerifyResult verdict = verify_match(scholar, a, *partner, b);
    if (!verdict.matched) return;
    slots[i] = LinkEntry{scholar.primary_id(), partner->primary_id(), std::move(verdict.evidence)};
  });

  LinkTable table;
  for (auto& slot : slots) {
    if (slot) table.entries.push_back(std::move(*slot));
  }
  return table;
}

}  // namespace revmatch
