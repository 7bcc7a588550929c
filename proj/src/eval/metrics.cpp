#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "revmatch/eval.hpp"

namespace revmatch {
namespace {

double mean_of_means(std::span<const std::vector<double>> per_record, const char* what) {
  if (per_record.empty()) throw std::invalid_argument(std::string(what) + ": no records");
  double total = 0.0;
  for (std::size_t r = 0; r < per_record.size(); ++r) {
    const auto& v = per_record[r];
    if (v.empty()) throw std::invalid_argument(std::string(what) + ": record " + std::to_string(r) + " has no scores");
    double s = 0.0;
    for (double c : v) {
      if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument(std::string(what) + ": confidence outside [0, 1]");
      s += c;
    }
    total += s / static_cast<double>(v.size());
  }
  return total / static_cast<double>(per_record.size());
}

}  // namespace

double task1_rrc(std::span<const std::vector<double>> gt_confidences) {
  return mean_of_means(gt_confidences, "RRC");
}

double task2_ucc(std::span<const std::vector<double>> unqualified_confidences) {
  return mean_of_means(unqualified_confidences, "UCC");
}

void sort_ranking(std::vector<ScoredCandidate>& candidates) {
  for (const auto& c : candidates) {
    if (!std::isfinite(c.score)) throw std::invalid_argument("non-finite score for " + c.scholar_id.key());
  }
  std::sort(candidates.begin(), candidates.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.scholar_id < b.scholar_id;
  });
}

RankingMetrics task3_ranking_metrics(std::span<const ScoredCandidate> ranking) {
  std::size_t r_total = 0;
  for (const auto& c : ranking) r_total += c.is_ground_truth;
  if (r_total == 0) throw std::invalid_argument("ranking has no ground-truth candidate");

  RankingMetrics m;
  double dcg = 0.0, ideal = 0.0, precision_sum = 0.0;
  std::size_t hits = 0, hits_at_r = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const double rank = static_cast<double>(i + 1);
    if (i < r_total) ideal += 1.0 / std::log2(rank + 1.0);
    if (!ranking[i].is_ground_truth) continue;
    ++hits;
    precision_sum += static_cast<double>(hits) / rank;
    dcg += 1.0 / std::log2(rank + 1.0);
    if (i < r_total) ++hits_at_r;
    if (hits == 1) m.reciprocal_rank = 1.0 / rank;
    if (i < 5) m.success_at_5 = 1.0;
  }
  m.average_precision = precision_sum / static_cast<double>(r_total);
  m.r_precision = static_cast<double>(hits_at_r) / static_cast<double>(r_total);
  m.ndcg = dcg / ideal;
  return m;
}

}  // namespace revmatch
