#pragma once

#include <array>
#include <filesystem>
#include <string_view>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "revmatch/corpus.hpp"
#include "revmatch/taxonomy.hpp"

namespace revmatch {

struct PoolConfig {
  int min_pubs_in_cstar = 2;
  int h_index_threshold = 3;
  int pool_size = 8;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Per-scholar view used by the pool predicates.
struct ScholarSubjects {
  SourceId scholar_id;  // primary id
  int h_index = 0;
  std::map<std::string, int> l3_counts;  // assigned publications per level-3 node

  int count_in(const std::set<std::string>& nodes) const;
  int count_in(const std::string& node) const;
};

/// One entry per corpus scholar, in corpus order. Throws TaxonomyError when a
/// publication has no assignment.
std::vector<ScholarSubjects> build_scholar_subjects(const Corpus& corpus, const AssignmentMap& assignments);

/// Shared read-only inputs for pool construction.
struct PoolContext {
  const Corpus& corpus;
  const Taxonomy& taxonomy;
  std::span<const ScholarSubjects> subjects;
};

/// Hard negatives: scholars of the nearest sibling category c* with nothing in
/// c_p or its descendants. Sorted by id; may be shorter than pool_size.
std::vector<SourceId> build_unqualified_pool(const ReviewRecord& record, const PoolContext& ctx,
                                             const PoolConfig& config);
/// Cross-disciplinary candidates: established in c* with at least one
/// publication in c_p. Sorted by id; may be shorter than pool_size.
std::vector<SourceId> build_potential_pool(const ReviewRecord& record, const PoolContext& ctx,
                                           const PoolConfig& config);

/// Fills both pools of every record in place.
void build_pools(std::vector<ReviewRecord>& records, const PoolContext& ctx, const PoolConfig& config,
                 std::size_t jobs = 1);

struct SplitResult {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

/// Largest-remainder split of `total` into parts proportional to
/// `ratios`; remainder ties go to the earlier part.
std::vector<std::size_t> apportion(std::size_t total, std::span<const int> ratios);

/// Stratified by l1_category. Record ids are listed in shuffled order.
SplitResult stratified_split(std::span<const ReviewRecord> records, std::array<int, 3> ratios,
                             std::uint64_t seed);

enum class PoolOrigin { kGroundTruth, kUnqualified, kPotential };
std::string_view to_string(PoolOrigin origin);
PoolOrigin pool_origin_from_string(std::string_view s);

struct LabeledPair {
  SourceId paper_id;
  SourceId candidate_id;
  bool positive = false;
  PoolOrigin origin = PoolOrigin::kGroundTruth;

  bool operator==(const LabeledPair&) const = default;
};

/// Every reviewer gives one positive; negatives_per_positive negatives per
/// positive are drawn from the two pools (unqualified_share of them from the
/// unqualified pool). A short pool is cycled; a record with both pools empty
/// is skipped with a warning.
std::vector<LabeledPair> build_training_pairs(std::span<const ReviewRecord> records, int negatives_per_positive,
                                              std::uint64_t seed, double unqualified_share = 0.5);

struct RankingPair {
  SourceId paper_id;
  SourceId positive_id;
  SourceId negative_id;
  PoolOrigin negative_origin = PoolOrigin::kUnqualified;
};

/// Every reviewer against every pool member of the same record.
std::vector<RankingPair> build_ranking_pairs(std::span<const ReviewRecord> records);

void save_pairs(std::span<const LabeledPair> pairs, const std::filesystem::path& path);
std::vector<LabeledPair> load_pairs(const std::filesystem::path& path);

}  // namespace revmatch
