#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "revmatch/poolgen.hpp"
#include "revmatch/util/hash.hpp"
#include "revmatch/util/io.hpp"
#include "revmatch/util/rng.hpp"

namespace revmatch {
namespace {

// `n` draws from `pool`: a shuffled pass, repeated while more are needed.
std::vector<SourceId> draw(const std::vector<SourceId>& pool, std::size_t n, Rng& rng) {
  std::vector<SourceId> out;
  if (pool.empty()) return out;
  while (out.size() < n) {
    std::vector<SourceId> pass = pool;
    rng.shuffle(pass);
    for (std::size_t i = 0; i < pass.size() && out.size() < n; ++i) out.push_back(pass[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(PoolOrigin origin) {
  switch (origin) {
    case PoolOrigin::kGroundTruth: return "gt";
    case PoolOrigin::kUnqualified: return "unqualified";
    case PoolOrigin::kPotential: return "potential";
  }
  return "gt";
}

PoolOrigin pool_origin_from_string(std::string_view s) {
  if (s == "gt") return PoolOrigin::kGroundTruth;
  if (s == "unqualified") return PoolOrigin::kUnqualified;
  if (s == "potential") return PoolOrigin::kPotential;
  throw std::invalid_argument("unknown pool origin: " + std::string(s));
}

std::vector<LabeledPair> build_training_pairs(std::span<const ReviewRecord> records, int negatives_per_positive,
                                              std::uint64_t seed, double unqualified_share) {
  if (negatives_per_positive < 0) throw std::invalid_argument("negatives_per_positive must be non-negative");
  if (!(unqualified_share >= 0.0 && unqualified_share <= 1.0)) {
    throw std::invalid_argument("unqualified_share must be in [0, 1]");
  }
  std::vector<LabeledPair> out;
  for (const ReviewRecord& r : records) {
    const std::size_t n_neg = r.reviewer_ids.size() * static_cast<std::size_t>(negatives_per_positive);
    if (n_neg > 0 && r.unqualified_ids.empty() && r.potential_ids.empty()) {
      spdlog::warn("record {}: both candidate pools are empty; skipped", r.record_id());
      continue;
    }
    for (const SourceId& id : r.reviewer_ids) out.push_back({r.paper_id, id, true, PoolOrigin::kGroundTruth});

    auto n_unq = static_cast<std::size_t>(std::llround(static_cast<double>(n_neg) * unqualified_share));
    if (r.unqualified_ids.empty()) n_unq = 0;
    if (r.potential_ids.empty()) n_unq = n_neg;
    Rng rng(derive_seed(seed, r.record_id() + ":pairs"));
    for (const SourceId& id : draw(r.unqualified_ids, n_unq, rng)) {
      out.push_back({r.paper_id, id, false, PoolOrigin::kUnqualified});
    }
    for (const SourceId& id : draw(r.potential_ids, n_neg - n_unq, rng)) {
      out.push_back({r.paper_id, id, false, PoolOrigin::kPotential});
    }
  }
  return out;
}

std::vector<RankingPair> build_ranking_pairs(std::span<const ReviewRecord> records) {
  std::vector<RankingPair> out;
  for (const ReviewRecord& r : records) {
    for (const SourceId& pos : r.reviewer_ids) {
      for (const SourceId& neg : r.unqualified_ids) out.push_back({r.paper_id, pos, neg, PoolOrigin::kUnqualified});
      for (const SourceId& neg : r.potential_ids) out.push_back({r.paper_id, pos, neg, PoolOrigin::kPotential});
    }
  }
  return out;
}

void save_pairs(std::span<const LabeledPair> pairs, const std::filesystem::path& path) {
  std::string out;
  for (const LabeledPair& p : pairs) {
    json j = {{"paper_id", p.paper_id},
              {"candidate_id", p.candidate_id},
              {"label", p.positive ? "positive" : "negative"},
              {"pool_origin", to_string(p.origin)}};
    out += j.dump() + "\n";
  }
  write_file_atomic(path, out);
}

std::vector<LabeledPair> load_pairs(const std::filesystem::path& path) {
  std::vector<LabeledPair> out;
  read_jsonl(path, [&](const json& j, std::size_t) {
    LabeledPair p;
    p.paper_id = j.at("paper_id").get<SourceId>();
    p.candidate_id = j.at("candidate_id").get<SourceId>();
    p.positive = j.at("label").get<std::string>() == "positive";
    p.origin = pool_origin_from_string(j.at("pool_origin").get<std::string>());
    if (p.positive != (p.origin == PoolOrigin::kGroundTruth)) {
      throw std::invalid_argument("label/pool_origin mismatch");
    }
    out.push_back(std::move(p));
  });
  return out;
}

}  // namespace revmatch
