#pragma once

#include <array>
#include <functional>
#include <vector>

#include "revmatch/mmoe.hpp"

namespace revmatch::detail {

// Activations of one batch, kept for backpropagation. Index 0 is the
// confidence task, 1 the ranking task.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> z1, a1, z2, expert_out;
  std::array<Eigen::MatrixXd, 2> gate_logits, gates, mixed, tower_pre, tower_act;
  std::array<Eigen::RowVectorXd, 2> score;
};

inline Eigen::MatrixXd affine(const Dense& d, const Eigen::MatrixXd& x) {
  return (d.weight * x).colwise() + d.bias;
}

inline Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

/// Column-wise softmax with max subtraction.
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits);

/// When `expert_out` is given the expert layers are not evaluated and their
/// intermediate activations stay empty.
ForwardCache run_forward(const MmoeModel& model, const Eigen::MatrixXd& x,
                         const std::vector<Eigen::MatrixXd>* expert_out = nullptr);

/// Accumulates gradients given dL/dscore for each task and an extra dL/dgate
/// term for each task (may be empty). Only blocks with `want(group)` are
/// touched.
void backward(const MmoeModel& model, const Eigen::MatrixXd& x, const ForwardCache& cache,
              const std::array<Eigen::RowVectorXd, 2>& d_score,
              const std::array<Eigen::MatrixXd, 2>& d_gate_extra,
              const std::function<bool(ParamGroup)>& want, MmoeParams& grad);

}  // namespace revmatch::detail

namespace revmatch::detail {

LossAndGradient ranking_gradient_cached(const MmoeModel& model, const Batch& batch, const TrainConfig& config,
                                        const std::vector<Eigen::MatrixXd>& expert_out);

}  // namespace revmatch::detail
