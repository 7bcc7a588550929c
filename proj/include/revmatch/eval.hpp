#pragma once

#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "revmatch/corpus.hpp"

namespace revmatch {

struct ScoredCandidate {
  SourceId scholar_id;
  double score = 0.0;
  bool is_ground_truth = false;
};

/// Per-record mean, then mean over records. Throws on a record without scores
/// or a score outside [0, 1].
double task1_rrc(std::span<const std::vector<double>> gt_confidences);
double task2_ucc(std::span<const std::vector<double>> unqualified_confidences);

struct RankingMetrics {
  double average_precision = 0.0;
  double r_precision = 0.0;
  double reciprocal_rank = 0.0;
  double ndcg = 0.0;
  double success_at_5 = 0.0;
};

/// Score descending, ties by smaller scholar id.
void sort_ranking(std::vector<ScoredCandidate>& candidates);

/// Metrics of a ranking over ground truth plus pool. The input is ordered with
/// sort_ranking first. NDCG uses binary gains, 1/log2(rank+1) discounts and
/// no cutoff. Throws when no ground truth is present.
RankingMetrics task3_ranking_metrics(std::span<const ScoredCandidate> ranking);

struct CandidateScore {
  double confidence = 0.0;  // Tasks 1 and 2; must lie in [0, 1]
  double rank_score = 0.0;  // Task 3
};

using Scorer = std::function<CandidateScore(const SourceId& paper_id, const SourceId& candidate_id)>;

struct RecordEval {
  std::string record_id;
  double rrc = 0.0;
  double ucc = 0.0;
  RankingMetrics ranking;
};

struct EvalReport {
  double rrc = 0.0;
  double ucc = 0.0;
  double map = 0.0;
  double r_prec = 0.0;
  double recip_rank = 0.0;
  double ndcg = 0.0;
  double success_at_5 = 0.0;
  std::size_t n_records = 0;
  std::vector<RecordEval> per_record;
};

/// Task 1 over ground truth, Task 2 over unqualified pools, Task 3 over
/// ground truth plus potential pools. Unweighted means over records.
EvalReport evaluate_suite(const Scorer& scorer, std::span<const ReviewRecord> records, std::size_t jobs = 1);

json report_to_json(const EvalReport& report, bool include_per_record = false);
EvalReport report_from_json(const json& j);
/// Aligned table, one row per named report, columns RRC UCC MAP R-prec
/// Recip-rank NDCG Success@5.
std::string format_report_table(std::span<const std::pair<std::string, EvalReport>> rows);

// ---------------------------------------------------------------------------
// TF-IDF baseline

using SparseVector = std::vector<std::pair<int, double>>;  // sorted by term id

double cosine(const SparseVector& a, const SparseVector& b);

/// Vocabulary and document frequencies over every publication's title and
/// abstract, tokenized like title matching. TF = count / length,
/// IDF = ln(N / df).
class TfidfIndex {
 public:
  explicit TfidfIndex(const Corpus& corpus);

  double idf(const std::string& term) const;
  /// Terms outside the vocabulary are dropped.
  SparseVector vectorize(std::string_view text) const;
  const SparseVector& publication_vector(const SourceId& pub_id) const;
  /// Mean of the scholar's publication vectors; empty when there are none.
  SparseVector candidate_vector(const ScholarProfile& scholar) const;

  /// Raw cosine of the query publication against each candidate.
  std::vector<double> tfidf_scores(const Publication& query, std::span<const ScholarProfile* const> candidates) const;

 private:
  const Corpus& corpus_;
  std::unordered_map<std::string, int> vocab_;
  std::vector<double> idf_;
  std::unordered_map<SourceId, SparseVector, SourceIdHash> pub_vectors_;
};

/// Non-decreasing step map fitted by pool-adjacent-violators (squared error).
/// Below the first knot and above the last the end values are held.
class IsotonicCalibrator {
 public:
  IsotonicCalibrator() = default;
  IsotonicCalibrator(std::vector<double> xs, std::vector<double> ys);

  double operator()(double raw) const;
  const std::vector<double>& knots_x() const { return xs_; }
  const std::vector<double>& knots_y() const { return ys_; }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// Weighted PAV over arbitrary (x, y, w) points; equal x values are merged
/// first.
IsotonicCalibrator fit_isotonic(std::span<const double> xs, std::span<const double> ys,
                                std::span<const double> weights = {});

/// Labels 1 for positives and 0 for negatives. Throws if either is empty.
IsotonicCalibrator isotonic_calibrate(std::span<const double> positive_scores,
                                      std::span<const double> negative_scores);

void to_json(json& j, const IsotonicCalibrator& c);
void from_json(const json& j, IsotonicCalibrator& c);

/// Calibrated TF-IDF scorer: confidence is the isotonic map of the raw
/// cosine, the ranking uses the raw cosine.
struct TfidfBaseline {
  const TfidfIndex* index = nullptr;
  const Corpus* corpus = nullptr;
  IsotonicCalibrator calibrator;

  CandidateScore score(const SourceId& paper_id, const SourceId& candidate_id) const;
};

/// Positives are (paper, reviewer) pairs of `records`; negatives pair each
/// paper with the scholars returned by `distant_candidates`.
TfidfBaseline fit_tfidf_baseline(const TfidfIndex& index, const Corpus& corpus,
                                 std::span<const ReviewRecord> records,
                                 const std::function<std::vector<SourceId>(const ReviewRecord&)>& distant_candidates);

}  // namespace revmatch
