#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "revmatch/poolgen.hpp"
#include "revmatch/util/hash.hpp"
#include "revmatch/util/parallel.hpp"
#include "revmatch/util/rng.hpp"

namespace revmatch {
namespace {

enum class PoolKind { kUnqualified, kPotential };

std::vector<SourceId> build_pool(PoolKind kind, const ReviewRecord& record, const PoolContext& ctx,
                                 const PoolConfig& config) {
  config.validate();
  const std::string& c_p = record.l3_category;
  const std::string c_star = nearest_sibling_category(c_p, ctx.taxonomy);
  std::set<std::string> target = descendants(c_p, ctx.taxonomy);
  target.insert(c_p);

  // Exclusions compare scholar identities, so any linked id of an author or
  // reviewer counts.
  std::set<SourceId> excluded;
  auto exclude = [&](const SourceId& id) {
    const ScholarProfile* s = ctx.corpus.find_scholar(id);
    excluded.insert(s ? s->primary_id() : id);
  };
  if (const Publication* paper = ctx.corpus.find_publication(record.paper_id)) {
    for (const SourceId& a : paper->author_ids) exclude(a);
  }
  for (const SourceId& r : record.reviewer_ids) exclude(r);

  std::vector<SourceId> eligible;
  for (const ScholarSubjects& s : ctx.subjects) {
    if (excluded.count(s.scholar_id)) continue;
    if (s.h_index < config.h_index_threshold) continue;
    if (s.count_in(c_star) < config.min_pubs_in_cstar) continue;
    const int in_target = s.count_in(target);
    if (kind == PoolKind::kUnqualified ? in_target != 0 : s.count_in(c_p) < 1) continue;
    eligible.push_back(s.scholar_id);
  }
  std::sort(eligible.begin(), eligible.end());

  const char* name = kind == PoolKind::kUnqualified ? "unqualified" : "potential";
  const auto want = static_cast<std::size_t>(config.pool_size);
  if (eligible.size() < want) {
    spdlog::warn("record {}: {} pool has {} of {} candidates", record.record_id(), name, eligible.size(), want);
    return eligible;
  }
  Rng rng(derive_seed(config.seed, record.record_id() + ":" + name));
  std::vector<SourceId> out;
  for (std::size_t i : rng.sample_indices(eligible.size(), want)) out.push_back(eligible[i]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void PoolConfig::validate() const {
  if (pool_size < 1) throw std::invalid_argument("pool_size must be at least 1");
  if (min_pubs_in_cstar < 1) throw std::invalid_argument("min_pubs_in_cstar must be positive");
  if (h_index_threshold < 0) throw std::invalid_argument("h_index_threshold must be non-negative");
}

int ScholarSubjects::count_in(const std::string& node) const {
  auto it = l3_counts.find(node);
  return it == l3_counts.end() ? 0 : it->second;
}

int ScholarSubjects::count_in(const std::set<std::string>& nodes) const {
  int n = 0;
  for (const auto& [node, count] : l3_counts) {
    if (nodes.count(node)) n += count;
  }
  return n;
}

std::vector<ScholarSubjects> build_scholar_subjects(const Corpus& corpus, const AssignmentMap& assignments) {
  std::vector<ScholarSubjects> out;
  out.reserve(corpus.scholars().size());
  for (const ScholarProfile& s : corpus.scholars()) {
    ScholarSubjects ss;
    ss.scholar_id = s.primary_id();
    ss.h_index = s.h_index;
    for (const SourceId& p : s.publication_ids) {
      auto it = assignments.find(p);
      if (it == assignments.end()) throw TaxonomyError("publication " + p.key() + " has no subject assignment");
      ++ss.l3_counts[it->second.l3_node];
    }
    out.push_back(std::move(ss));
  }
  return out;
}

std::vector<SourceId> build_unqualified_pool(const ReviewRecord& record, const PoolContext& ctx,
                                             const PoolConfig& config) {
  return build_pool(PoolKind::kUnqualified, record, ctx, config);
}

std::vector<SourceId> build_potential_pool(const ReviewRecord& record, const PoolContext& ctx,
                                           const PoolConfig& config) {
  return build_pool(PoolKind::kPotential, record, ctx, config);
}

void build_pools(std::vector<ReviewRecord>& records, const PoolContext& ctx, const PoolConfig& config,
                 std::size_t jobs) {
  parallel_for(records.size(), jobs, [&](std::size_t i) {
    records[i].unqualified_ids = build_unqualified_pool(records[i], ctx, config);
    records[i].potential_ids = build_potential_pool(records[i], ctx, config);
  });
}

}  // namespace revmatch
