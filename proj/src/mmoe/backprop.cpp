#include <cmath>
#include <stdexcept>

#include "internal.hpp"

namespace revmatch {
namespace detail {
namespace {

void accumulate_dense(Dense& g, const Eigen::MatrixXd& d_out, const Eigen::MatrixXd& input) {
  g.weight.noalias() += d_out * input.transpose();
  g.bias += d_out.rowwise().sum();
}

Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& d, const Eigen::MatrixXd& pre) {
  return (pre.array() > 0.0).select(d, 0.0);
}

}  // namespace

void backward(const MmoeModel& model, const Eigen::MatrixXd& x, const ForwardCache& c,
              const std::array<Eigen::RowVectorXd, 2>& d_score,
              const std::array<Eigen::MatrixXd, 2>& d_gate_extra,
              const std::function<bool(ParamGroup)>& want, MmoeParams& grad) {
  const MmoeParams& p = model.params;
  const int n = model.n_experts;
  const bool experts = want(ParamGroup::kExperts);
  std::vector<Eigen::MatrixXd> d_expert;
  if (experts) d_expert.assign(n, Eigen::MatrixXd::Zero(model.dims.expert_out_dim, x.cols()));

  const std::array<const Tower*, 2> towers{&p.confidence_tower, &p.ranking_tower};
  const std::array<Tower*, 2> g_towers{&grad.confidence_tower, &grad.ranking_tower};
  const std::array<Dense*, 2> g_gates{&grad.confidence_gate, &grad.ranking_gate};
  const std::array<ParamGroup, 2> tower_group{ParamGroup::kConfidenceTower, ParamGroup::kRankingTower};
  const std::array<ParamGroup, 2> gate_group{ParamGroup::kConfidenceGate, ParamGroup::kRankingGate};

  for (int k = 0; k < 2; ++k) {
    const bool has_score = d_score[k].size() > 0;
    const bool has_gate_extra = d_gate_extra[k].size() > 0;
    if (!has_score && !has_gate_extra) continue;

    Eigen::MatrixXd d_gate = Eigen::MatrixXd::Zero(n, x.cols());
    if (has_score) {
      const Eigen::MatrixXd ds = d_score[k];  // 1 x B
      if (want(tower_group[k])) accumulate_dense(g_towers[k]->head, ds, c.tower_act[k]);
      const Eigen::MatrixXd d_pre = relu_mask(towers[k]->head.weight.transpose() * ds, c.tower_pre[k]);
      if (want(tower_group[k])) accumulate_dense(g_towers[k]->hidden, d_pre, c.mixed[k]);

      if (experts || want(gate_group[k])) {
        const Eigen::MatrixXd d_mixed = towers[k]->hidden.weight.transpose() * d_pre;  // O x B
        for (int i = 0; i < n; ++i) {
          d_gate.row(i) = (d_mixed.array() * c.expert_out[i].array()).colwise().sum();
          if (experts) d_expert[i] += d_mixed * c.gates[k].row(i).asDiagonal();
        }
      }
    }
    if (!want(gate_group[k])) continue;
    if (has_gate_extra) d_gate += d_gate_extra[k];
    // Softmax Jacobian: ds_i = g_i (dg_i - sum_j g_j dg_j).
    const Eigen::RowVectorXd inner = (c.gates[k].array() * d_gate.array()).colwise().sum();
    const Eigen::MatrixXd d_logits = c.gates[k].array() * (d_gate.rowwise() - inner).array();
    accumulate_dense(*g_gates[k], d_logits, x);
  }

  if (!experts) return;
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd dz2 = relu_mask(d_expert[i], c.z2[i]);
    accumulate_dense(grad.experts[i].out, dz2, c.a1[i]);
    const Eigen::MatrixXd dz1 = relu_mask(p.experts[i].out.weight.transpose() * dz2, c.z1[i]);
    accumulate_dense(grad.experts[i].hidden, dz1, x);
  }
}

}  // namespace detail

bool trains(Objective stage, ParamGroup group) {
  if (stage == Objective::kConfidence) {
    return group == ParamGroup::kExperts || group == ParamGroup::kConfidenceGate ||
           group == ParamGroup::kConfidenceTower;
  }
  return group == ParamGroup::kRankingGate || group == ParamGroup::kRankingTower;
}

namespace {

LossAndGradient compute(const MmoeModel& model, const Batch& batch, const TrainConfig& config, Objective objective,
                        const ClassWeights& weights, const std::function<bool(ParamGroup)>& want,
                        const std::vector<Eigen::MatrixXd>* expert_out = nullptr) {
  const detail::ForwardCache c = detail::run_forward(model, batch.features, expert_out);
  const double b = static_cast<double>(batch.features.cols());
  std::array<Eigen::RowVectorXd, 2> d_score;
  std::array<Eigen::MatrixXd, 2> d_gate_extra;
  LossAndGradient out;
  out.gradient = model.zeros_like();

  if (objective == Objective::kConfidence) {
    const ConfidenceLoss loss = confidence_loss_from_outputs(c.score[0], batch.labels, c.gates[0],
                                                             config.lambda_entropy, weights, config.entropy_bonus);
    out.loss = loss.total;
    d_score[0].resize(c.score[0].size());
    for (Eigen::Index j = 0; j < c.score[0].size(); ++j) {
      const double p = sigmoid(c.score[0](j));
      const bool pos = batch.labels[static_cast<std::size_t>(j)] == 1;
      d_score[0](j) = (pos ? weights.positive * (p - 1.0) : weights.negative * p) / b;
    }
    // d(-sum g log g)/dg = -(log g + 1); the loss carries sign * lambda / B.
    const double coef = (config.entropy_bonus ? -1.0 : 1.0) * config.lambda_entropy / b;
    if (coef != 0.0) {
      const Eigen::MatrixXd& g = c.gates[0];
      d_gate_extra[0] = g.unaryExpr([coef](double v) { return v > 0.0 ? -coef * (std::log(v) + 1.0) : 0.0; });
    }
  } else {
    if (batch.pairs.empty()) throw std::invalid_argument("ranking gradient needs at least one pair");
    std::vector<double> pos, neg;
    for (const auto& [a, bb] : batch.pairs) {
      pos.push_back(c.score[1](a));
      neg.push_back(c.score[1](bb));
    }
    out.loss = ranking_loss_from_scores(pos, neg, config.lambda_auc, config.margin).total;
    d_score[1] = Eigen::RowVectorXd::Zero(c.score[1].size());
    const double np = static_cast<double>(batch.pairs.size());
    for (std::size_t i = 0; i < batch.pairs.size(); ++i) {
      const double d = pos[i] - neg[i];
      double dd = -config.lambda_auc * sigmoid(-d);
      if (config.margin - d > 0.0) dd -= 1.0 - config.lambda_auc;
      dd /= np;
      d_score[1](batch.pairs[i].first) += dd;
      d_score[1](batch.pairs[i].second) -= dd;
    }
  }
  detail::backward(model, batch.features, c, d_score, d_gate_extra, want, out.gradient);
  return out;
}

}  // namespace

LossAndGradient full_gradient(const MmoeModel& model, const Batch& batch, const TrainConfig& config,
                              Objective objective, const ClassWeights& weights) {
  batch.validate(model.dims.input_dim);
  return compute(model, batch, config, objective, weights, [](ParamGroup) { return true; });
}

LossAndGradient stage_gradient(const MmoeModel& model, const Batch& batch, const TrainConfig& config,
                               Objective stage, const ClassWeights& weights) {
  batch.validate(model.dims.input_dim);
  return compute(model, batch, config, stage, weights, [stage](ParamGroup g) { return trains(stage, g); });
}

namespace detail {

// Used by the trainer in stage 2, where expert outputs are frozen and cached.
LossAndGradient ranking_gradient_cached(const MmoeModel& model, const Batch& batch, const TrainConfig& config,
                                        const std::vector<Eigen::MatrixXd>& expert_out) {
  return compute(model, batch, config, Objective::kRanking, {},
                 [](ParamGroup g) { return trains(Objective::kRanking, g); }, &expert_out);
}

}  // namespace detail
}  // namespace revmatch
