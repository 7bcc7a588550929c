#include <cmath>
#include <stdexcept>

#include "internal.hpp"

namespace revmatch {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double mean_gate_entropy(const Eigen::MatrixXd& gates) {
  if (gates.cols() == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < gates.cols(); ++j) {
    for (Eigen::Index i = 0; i < gates.rows(); ++i) {
      const double g = gates(i, j);
      if (g > 0.0) total -= g * std::log(g);
    }
  }
  return total / static_cast<double>(gates.cols());
}

ClassWeights inverse_frequency_weights(std::span<const int> labels) {
  std::size_t pos = 0;
  for (int y : labels) pos += y == 1;
  const double n = static_cast<double>(labels.size());
  const std::size_t neg = labels.size() - pos;
  ClassWeights w;
  w.positive = pos ? n / (2.0 * static_cast<double>(pos)) : 0.0;
  w.negative = neg ? n / (2.0 * static_cast<double>(neg)) : 0.0;
  return w;
}

void Batch::validate(int input_dim) const {
  if (features.rows() != input_dim) throw std::invalid_argument("batch feature dimension mismatch");
  if (!features.allFinite()) throw std::invalid_argument("batch features contain non-finite values");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != features.cols()) {
    throw std::invalid_argument("batch has " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(features.cols()) + " samples");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
  }
  for (const auto& [a, b] : pairs) {
    if (a < 0 || b < 0 || a >= features.cols() || b >= features.cols()) {
      throw std::invalid_argument("pair index out of range");
    }
  }
}

ConfidenceLoss confidence_loss_from_outputs(const Eigen::RowVectorXd& logits, std::span<const int> labels,
                                            const Eigen::MatrixXd& gates, double lambda_entropy,
                                            const ClassWeights& weights, bool entropy_bonus) {
  if (labels.empty() || static_cast<Eigen::Index>(labels.size()) != logits.size()) {
    throw std::invalid_argument("confidence loss needs one label per prediction");
  }
  double bce = 0.0;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const double s = logits(static_cast<Eigen::Index>(j));
    bce += labels[j] == 1 ? weights.positive * softplus(-s) : weights.negative * softplus(s);
  }
  ConfidenceLoss out;
  out.weighted_bce = bce / static_cast<double>(labels.size());
  out.entropy = mean_gate_entropy(gates);
  const double sign = entropy_bonus ? -1.0 : 1.0;
  out.total = out.weighted_bce + sign * lambda_entropy * out.entropy;
  if (!std::isfinite(out.weighted_bce)) throw DivergenceError("confidence loss: weighted BCE is not finite");
  if (!std::isfinite(out.entropy)) throw DivergenceError("confidence loss: gate entropy is not finite");
  return out;
}

ConfidenceLoss confidence_loss(const MmoeModel& model, const Batch& batch, double lambda_entropy,
                               const ClassWeights& weights, bool entropy_bonus) {
  batch.validate(model.dims.input_dim);
  const BatchForward f = forward_batch(model, batch.features);
  return confidence_loss_from_outputs(f.confidence_logit, batch.labels, f.confidence_gate, lambda_entropy, weights,
                                      entropy_bonus);
}

RankingLoss ranking_loss_from_scores(std::span<const double> s_pos, std::span<const double> s_neg,
                                     double lambda_auc, double margin) {
  if (s_pos.empty()) throw std::invalid_argument("ranking loss needs at least one pair");
  if (s_pos.size() != s_neg.size()) throw std::invalid_argument("ranking loss: score lists differ in length");
  RankingLoss out;
  for (std::size_t i = 0; i < s_pos.size(); ++i) {
    const double d = s_pos[i] - s_neg[i];
    out.margin_term += std::max(0.0, margin - d);
    out.auc_term += softplus(-d);
  }
  const double n = static_cast<double>(s_pos.size());
  out.margin_term /= n;
  out.auc_term /= n;
  out.total = (1.0 - lambda_auc) * out.margin_term + lambda_auc * out.auc_term;
  if (!std::isfinite(out.margin_term)) throw DivergenceError("ranking loss: margin term is not finite");
  if (!std::isfinite(out.auc_term)) throw DivergenceError("ranking loss: AUC term is not finite");
  return out;
}

RankingLoss ranking_loss(const MmoeModel& model, const Batch& batch, double lambda_auc, double margin) {
  batch.validate(model.dims.input_dim);
  if (batch.pairs.empty()) throw std::invalid_argument("ranking loss needs at least one pair");
  const BatchForward f = forward_batch(model, batch.features);
  std::vector<double> pos, neg;
  for (const auto& [a, b] : batch.pairs) {
    pos.push_back(f.rank_score(a));
    neg.push_back(f.rank_score(b));
  }
  return ranking_loss_from_scores(pos, neg, lambda_auc, margin);
}

void TrainConfig::validate() const {
  if (epochs_total < 1) throw std::invalid_argument("epochs_total must be positive");
  if (stage_boundary < 0 || stage_boundary >= epochs_total) {
    throw std::invalid_argument("stage_boundary must be in [0, epochs_total)");
  }
  if (!(lambda_entropy >= 0.0)) throw std::invalid_argument("lambda_entropy must be non-negative");
  if (!(lambda_auc >= 0.0 && lambda_auc <= 1.0)) throw std::invalid_argument("lambda_auc must be in [0, 1]");
  if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
}

void to_json(json& j, const TrainConfig& c) {
  j = {{"epochs_total", c.epochs_total},   {"stage_boundary", c.stage_boundary},
       {"lambda_entropy", c.lambda_entropy}, {"lambda_auc", c.lambda_auc},
       {"margin", c.margin},               {"learning_rate", c.learning_rate},
       {"batch_size", c.batch_size},       {"seed", c.seed},
       {"entropy_bonus", c.entropy_bonus}};
}

void from_json(const json& j, TrainConfig& c) {
  c.epochs_total = j.at("epochs_total").get<int>();
  c.stage_boundary = j.at("stage_boundary").get<int>();
  c.lambda_entropy = j.at("lambda_entropy").get<double>();
  c.lambda_auc = j.at("lambda_auc").get<double>();
  c.margin = j.at("margin").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.entropy_bonus = j.at("entropy_bonus").get<bool>();
}

void to_json(json& j, const MmoeDims& d) {
  j = {{"input_dim", d.input_dim},
       {"expert_hidden_dim", d.expert_hidden_dim},
       {"expert_out_dim", d.expert_out_dim},
       {"tower_hidden_dim", d.tower_hidden_dim}};
}

void from_json(const json& j, MmoeDims& d) {
  d.input_dim = j.at("input_dim").get<int>();
  d.expert_hidden_dim = j.at("expert_hidden_dim").get<int>();
  d.expert_out_dim = j.at("expert_out_dim").get<int>();
  d.tower_hidden_dim = j.at("tower_hidden_dim").get<int>();
}

}  // namespace revmatch
