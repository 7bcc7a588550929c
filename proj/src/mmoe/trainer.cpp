#include <cmath>
#include <numeric>
#include <stdexcept>

#include "internal.hpp"
#include "revmatch/util/hash.hpp"
#include "revmatch/util/rng.hpp"

namespace revmatch {
namespace {

struct BlockRef {
  ParamGroup group;
  double* data;
  Eigen::Index size;
};

std::vector<BlockRef> blocks_of(MmoeParams& p) {
  std::vector<BlockRef> out;
  for_each_block(p, [&](ParamGroup g, const std::string&, auto& b) { out.push_back({g, b.data(), b.size()}); });
  return out;
}

// Frozen blocks are skipped entirely so they stay bit-identical.
void sgd_step(MmoeParams& params, MmoeParams& grad, double lr, Objective stage) {
  auto p = blocks_of(params);
  auto g = blocks_of(grad);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!trains(stage, p[k].group)) continue;
    for (Eigen::Index i = 0; i < p[k].size; ++i) p[k].data[i] -= lr * g[k].data[i];
  }
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<int>& cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
  return out;
}

std::vector<Eigen::MatrixXd> expert_outputs(const MmoeModel& model, const Eigen::MatrixXd& x) {
  std::vector<Eigen::MatrixXd> out;
  for (const Expert& e : model.params.experts) {
    out.push_back(detail::relu(detail::affine(e.out, detail::relu(detail::affine(e.hidden, x)))));
  }
  return out;
}

double full_ranking_loss(const MmoeModel& model, const TrainingData& data, const TrainConfig& config,
                         const std::vector<Eigen::MatrixXd>* experts) {
  const detail::ForwardCache c = detail::run_forward(model, data.features, experts);
  std::vector<double> pos, neg;
  for (const auto& [a, b] : data.ranking_pairs) {
    pos.push_back(c.score[1](a));
    neg.push_back(c.score[1](b));
  }
  return ranking_loss_from_scores(pos, neg, config.lambda_auc, config.margin).total;
}

std::string_view stage_name(Objective s) { return s == Objective::kConfidence ? "confidence" : "ranking"; }

}  // namespace

void to_json(json& j, const LossTrace& t) {
  j = {{"initial_confidence_loss", t.initial_confidence_loss},
       {"initial_ranking_loss", t.initial_ranking_loss},
       {"epochs", json::array()}};
  for (const EpochLoss& e : t.epochs) {
    j["epochs"].push_back({{"epoch", e.epoch}, {"stage", stage_name(e.stage)}, {"loss", e.loss}});
  }
}

LossTrace train_two_stage(MmoeModel& model, const TrainingData& data, const TrainConfig& config,
                          const EpochObserver& observer) {
  config.validate();
  const auto n_labeled = static_cast<Eigen::Index>(data.labels.size());
  if (n_labeled > data.features.cols()) throw std::invalid_argument("more labels than training samples");
  Batch all{data.features, {}, data.ranking_pairs};
  all.validate(model.dims.input_dim);
  Batch labeled{data.features.leftCols(n_labeled), data.labels, {}};
  labeled.validate(model.dims.input_dim);
  if (config.stage_boundary > 0 && n_labeled == 0) throw std::invalid_argument("stage 1 needs labeled samples");
  if (data.ranking_pairs.empty()) throw std::invalid_argument("stage 2 needs at least one ranking pair");

  const ClassWeights weights = inverse_frequency_weights(data.labels);
  auto labeled_loss = [&] {
    return confidence_loss(model, labeled, config.lambda_entropy, weights, config.entropy_bonus).total;
  };
  LossTrace trace;
  if (n_labeled > 0) trace.initial_confidence_loss = labeled_loss();
  trace.initial_ranking_loss = full_ranking_loss(model, data, config, nullptr);

  auto record = [&](int epoch, Objective stage, double loss) {
    trace.epochs.push_back({epoch, stage, loss});
    if (!std::isfinite(loss)) {
      throw TrainingDivergedError("training diverged at epoch " + std::to_string(epoch) + " (" +
                                      std::string(stage_name(stage)) + " loss is not finite)",
                                  trace);
    }
    if (observer) observer(trace.epochs.back(), model);
  };
  const auto bs = static_cast<std::size_t>(config.batch_size);

  try {
    std::vector<int> order(static_cast<std::size_t>(n_labeled));
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 1; epoch <= config.stage_boundary; ++epoch) {
      Rng rng(derive_seed(config.seed, "epoch:" + std::to_string(epoch)));
      rng.shuffle(order);
      for (std::size_t start = 0; start < order.size(); start += bs) {
        std::vector<int> cols(order.begin() + static_cast<std::ptrdiff_t>(start),
                              order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + bs)));
        Batch batch;
        batch.features = gather(data.features, cols);
        for (int c : cols) batch.labels.push_back(data.labels[static_cast<std::size_t>(c)]);
        LossAndGradient lg = stage_gradient(model, batch, config, Objective::kConfidence, weights);
        sgd_step(model.params, lg.gradient, config.learning_rate, Objective::kConfidence);
      }
      record(epoch, Objective::kConfidence, labeled_loss());
    }

    // Experts are frozen from here on, so their outputs are computed once.
    const std::vector<Eigen::MatrixXd> experts = expert_outputs(model, data.features);
    std::vector<std::size_t> pair_order(data.ranking_pairs.size());
    std::iota(pair_order.begin(), pair_order.end(), 0);
    for (int epoch = config.stage_boundary + 1; epoch <= config.epochs_total; ++epoch) {
      Rng rng(derive_seed(config.seed, "epoch:" + std::to_string(epoch)));
      rng.shuffle(pair_order);
      for (std::size_t start = 0; start < pair_order.size(); start += bs) {
        const std::size_t end = std::min(pair_order.size(), start + bs);
        std::vector<int> cols;
        Batch batch;
        for (std::size_t k = start; k < end; ++k) {
          const auto& [a, b] = data.ranking_pairs[pair_order[k]];
          const int idx = static_cast<int>(cols.size());
          cols.push_back(a);
          cols.push_back(b);
          batch.pairs.emplace_back(idx, idx + 1);
        }
        batch.features = gather(data.features, cols);
        std::vector<Eigen::MatrixXd> batch_experts;
        for (const auto& e : experts) batch_experts.push_back(gather(e, cols));
        LossAndGradient lg = detail::ranking_gradient_cached(model, batch, config, batch_experts);
        sgd_step(model.params, lg.gradient, config.learning_rate, Objective::kRanking);
      }
      record(epoch, Objective::kRanking, full_ranking_loss(model, data, config, &experts));
    }
  } catch (const TrainingDivergedError&) {
    throw;
  } catch (const DivergenceError& e) {
    throw TrainingDivergedError(e.what(), trace);
  }
  return trace;
}

}  // namespace revmatch
