#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "revmatch/util/io.hpp"

namespace revmatch {

struct MmoeDims {
  int input_dim = 0;
  int expert_hidden_dim = 256;
  int expert_out_dim = 128;
  int tower_hidden_dim = 64;

  bool operator==(const MmoeDims&) const = default;
};

struct Dense {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;

  bool operator==(const Dense& o) const { return weight == o.weight && bias == o.bias; }
};

struct Expert {
  Dense hidden;
  Dense out;
  bool operator==(const Expert&) const = default;
};

struct Tower {
  Dense hidden;
  Dense head;  // 1 x tower_hidden_dim
  bool operator==(const Tower&) const = default;
};

/// Parameters, or a gradient with the same shapes.
struct MmoeParams {
  std::vector<Expert> experts;
  Dense confidence_gate;  // n_experts x input_dim
  Dense ranking_gate;
  Tower confidence_tower;
  Tower ranking_tower;

  bool operator==(const MmoeParams&) const = default;
};

enum class ParamGroup { kExperts, kConfidenceGate, kConfidenceTower, kRankingGate, kRankingTower };

/// Calls fn(group, name, matrix-or-vector) for every parameter block in a
/// fixed order (used by initialization, checkpoints and gradient checks).
template <typename Params, typename Fn>
void for_each_block(Params& p, Fn&& fn) {
  auto dense = [&](ParamGroup g, const std::string& name, auto& d) {
    fn(g, name + ".weight", d.weight);
    fn(g, name + ".bias", d.bias);
  };
  for (std::size_t i = 0; i < p.experts.size(); ++i) {
    const std::string e = "expert" + std::to_string(i);
    dense(ParamGroup::kExperts, e + ".hidden", p.experts[i].hidden);
    dense(ParamGroup::kExperts, e + ".out", p.experts[i].out);
  }
  dense(ParamGroup::kConfidenceGate, "confidence_gate", p.confidence_gate);
  dense(ParamGroup::kRankingGate, "ranking_gate", p.ranking_gate);
  dense(ParamGroup::kConfidenceTower, "confidence_tower.hidden", p.confidence_tower.hidden);
  dense(ParamGroup::kConfidenceTower, "confidence_tower.head", p.confidence_tower.head);
  dense(ParamGroup::kRankingTower, "ranking_tower.hidden", p.ranking_tower.hidden);
  dense(ParamGroup::kRankingTower, "ranking_tower.head", p.ranking_tower.head);
}

struct MmoeModel {
  MmoeDims dims;
  int n_experts = 0;
  MmoeParams params;

  std::size_t parameter_count() const;
  /// Same shapes, all zeros.
  MmoeParams zeros_like() const;
};

/// n(in*H + H + H*O + O) + 2(n*in + n) + 2(O*T + T + T + 1)
std::size_t expected_parameter_count(const MmoeDims& dims, int n_experts);

/// Every parameter, biases included, is drawn from uniform(-a, a) with
/// a = sqrt(6 / (fan_in + fan_out)) of its layer.
MmoeModel init_model(const MmoeDims& dims, int n_experts, std::uint64_t seed);

struct ForwardResult {
  double confidence = 0.0;
  double confidence_logit = 0.0;
  double rank_score = 0.0;
  Eigen::VectorXd confidence_gate;
  Eigen::VectorXd ranking_gate;
};

ForwardResult forward(const MmoeModel& model, std::span<const double> x);

struct BatchForward {
  Eigen::RowVectorXd confidence_logit;
  Eigen::RowVectorXd rank_score;
  Eigen::MatrixXd confidence_gate;  // n_experts x batch
  Eigen::MatrixXd ranking_gate;
};

/// Column-per-sample forward pass.
BatchForward forward_batch(const MmoeModel& model, const Eigen::MatrixXd& features);

struct Batch {
  Eigen::MatrixXd features;                 // input_dim x batch
  std::vector<int> labels;                  // 0/1 per column; may be empty for ranking
  std::vector<std::pair<int, int>> pairs;   // (positive column, negative column)

  void validate(int input_dim) const;
};

struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;
};

/// w_c = N / (2 N_c) over the given labels. A class that never occurs gets
/// weight 0.
ClassWeights inverse_frequency_weights(std::span<const int> labels);

struct TrainConfig {
  int epochs_total = 100;
  int stage_boundary = 50;
  double lambda_entropy = 0.01;
  double lambda_auc = 0.5;
  double margin = 1.0;
  double learning_rate = 1e-2;
  int batch_size = 64;
  std::uint64_t seed = 42;
  bool entropy_bonus = true;  // false flips the entropy term to +lambda*H

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

void to_json(json& j, const TrainConfig& c);
void from_json(const json& j, TrainConfig& c);
void to_json(json& j, const MmoeDims& d);
void from_json(const json& j, MmoeDims& d);

double sigmoid(double x);
/// log(1 + e^x) without overflow.
double softplus(double x);

/// Mean over columns of -sum_i g_i log g_i.
double mean_gate_entropy(const Eigen::MatrixXd& gates);

struct ConfidenceLoss {
  double total = 0.0;
  double weighted_bce = 0.0;
  double entropy = 0.0;
};

/// Weighted BCE from logits averaged over the batch, minus (or plus)
/// lambda * mean gate entropy of the confidence gate.
ConfidenceLoss confidence_loss_from_outputs(const Eigen::RowVectorXd& logits, std::span<const int> labels,
                                            const Eigen::MatrixXd& gates, double lambda_entropy,
                                            const ClassWeights& weights, bool entropy_bonus = true);
ConfidenceLoss confidence_loss(const MmoeModel& model, const Batch& batch, double lambda_entropy,
                               const ClassWeights& weights, bool entropy_bonus = true);

struct RankingLoss {
  double total = 0.0;
  double margin_term = 0.0;
  double auc_term = 0.0;
};

RankingLoss ranking_loss_from_scores(std::span<const double> s_pos, std::span<const double> s_neg,
                                     double lambda_auc, double margin);
RankingLoss ranking_loss(const MmoeModel& model, const Batch& batch, double lambda_auc, double margin);

/// A loss that is not finite; names the offending term.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Objective { kConfidence, kRanking };

struct LossAndGradient {
  double loss = 0.0;
  MmoeParams gradient;
};

/// Exact gradient of one objective with respect to every parameter.
LossAndGradient full_gradient(const MmoeModel& model, const Batch& batch, const TrainConfig& config,
                              Objective objective, const ClassWeights& weights = {});

/// Stage-masked gradient: stage 1 (confidence) updates experts, confidence
/// gate and tower; stage 2 (ranking) updates only the ranking gate and
/// tower. Frozen blocks are exact zeros.
LossAndGradient stage_gradient(const MmoeModel& model, const Batch& batch, const TrainConfig& config,
                               Objective stage, const ClassWeights& weights = {});

bool trains(Objective stage, ParamGroup group);

/// Dense training inputs. The first labels.size() columns of `features` are
/// the stage-1 samples; ranking pairs may refer to any column.
struct TrainingData {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::vector<std::pair<int, int>> ranking_pairs;
};

struct EpochLoss {
  int epoch = 0;  // 1-based
  Objective stage = Objective::kConfidence;
  double loss = 0.0;
};

struct LossTrace {
  double initial_confidence_loss = 0.0;
  double initial_ranking_loss = 0.0;
  std::vector<EpochLoss> epochs;
};

void to_json(json& j, const LossTrace& t);

class TrainingDivergedError : public DivergenceError {
 public:
  TrainingDivergedError(const std::string& what, LossTrace trace)
      : DivergenceError(what), trace_(std::move(trace)) {}
  const LossTrace& trace() const { return trace_; }

 private:
  LossTrace trace_;
};

/// Epochs 1..stage_boundary minimize the confidence loss, the rest the
/// ranking loss. Plain mini-batch gradient descent with seeded shuffling.
/// Class weights come from the full training label set. Returns the per-epoch
/// full-set loss of the active stage. `observer`, when set, sees the model
/// after every epoch.
using EpochObserver = std::function<void(const EpochLoss&, const MmoeModel&)>;
LossTrace train_two_stage(MmoeModel& model, const TrainingData& data, const TrainConfig& config,
                          const EpochObserver& observer = {});

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const MmoeModel& model, const TrainConfig& config, const std::filesystem::path& path);

struct LoadedCheckpoint {
  MmoeModel model;
  TrainConfig config;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);
/// Also refuses a checkpoint whose expert count differs from `expected_n_experts`.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, int expected_n_experts);

}  // namespace revmatch
