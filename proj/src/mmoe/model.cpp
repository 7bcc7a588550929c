#include <cmath>
#include <stdexcept>
#include <type_traits>

#include "internal.hpp"
#include "revmatch/util/rng.hpp"

namespace revmatch {
namespace {

Dense make_dense(int in, int out) {
  return {Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)};
}

}  // namespace

namespace detail {

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const Eigen::VectorXd shifted = logits.col(j).array() - logits.col(j).maxCoeff();
    const Eigen::VectorXd e = shifted.array().exp();
    out.col(j) = e / e.sum();
  }
  return out;
}

ForwardCache run_forward(const MmoeModel& model, const Eigen::MatrixXd& x,
                         const std::vector<Eigen::MatrixXd>* expert_out) {
  const MmoeParams& p = model.params;
  ForwardCache c;
  if (expert_out) {
    c.expert_out = *expert_out;
  } else {
    for (const Expert& e : p.experts) {
      c.z1.push_back(affine(e.hidden, x));
      c.a1.push_back(relu(c.z1.back()));
      c.z2.push_back(affine(e.out, c.a1.back()));
      c.expert_out.push_back(relu(c.z2.back()));
    }
  }
  const std::array<const Dense*, 2> gates{&p.confidence_gate, &p.ranking_gate};
  const std::array<const Tower*, 2> towers{&p.confidence_tower, &p.ranking_tower};
  for (int k = 0; k < 2; ++k) {
    c.gate_logits[k] = affine(*gates[k], x);
    c.gates[k] = softmax_columns(c.gate_logits[k]);
    c.mixed[k] = Eigen::MatrixXd::Zero(model.dims.expert_out_dim, x.cols());
    for (int i = 0; i < model.n_experts; ++i) {
      c.mixed[k] += c.expert_out[i] * c.gates[k].row(i).asDiagonal();
    }
    c.tower_pre[k] = affine(towers[k]->hidden, c.mixed[k]);
    c.tower_act[k] = relu(c.tower_pre[k]);
    c.score[k] = affine(towers[k]->head, c.tower_act[k]).row(0);
  }
  return c;
}

}  // namespace detail

std::size_t expected_parameter_count(const MmoeDims& d, int n) {
  const std::size_t in = d.input_dim, h = d.expert_hidden_dim, o = d.expert_out_dim, t = d.tower_hidden_dim;
  const std::size_t nn = static_cast<std::size_t>(n);
  return nn * (in * h + h + h * o + o) + 2 * (nn * in + nn) + 2 * (o * t + t + t + 1);
}

std::size_t MmoeModel::parameter_count() const {
  std::size_t n = 0;
  for_each_block(params, [&](ParamGroup, const std::string&, const auto& block) { n += block.size(); });
  return n;
}

MmoeParams MmoeModel::zeros_like() const {
  MmoeParams z = params;
  for_each_block(z, [](ParamGroup, const std::string&, auto& block) { block.setZero(); });
  return z;
}

MmoeModel init_model(const MmoeDims& dims, int n_experts, std::uint64_t seed) {
  if (n_experts < 1) throw std::invalid_argument("n_experts must be at least 1");
  if (dims.input_dim < 1 || dims.expert_hidden_dim < 1 || dims.expert_out_dim < 1 || dims.tower_hidden_dim < 1) {
    throw std::invalid_argument("all model dimensions must be at least 1");
  }
  MmoeModel m;
  m.dims = dims;
  m.n_experts = n_experts;
  MmoeParams& p = m.params;
  for (int i = 0; i < n_experts; ++i) {
    p.experts.push_back({make_dense(dims.input_dim, dims.expert_hidden_dim),
                         make_dense(dims.expert_hidden_dim, dims.expert_out_dim)});
  }
  p.confidence_gate = make_dense(dims.input_dim, n_experts);
  p.ranking_gate = make_dense(dims.input_dim, n_experts);
  for (Tower* t : {&p.confidence_tower, &p.ranking_tower}) {
    t->hidden = make_dense(dims.expert_out_dim, dims.tower_hidden_dim);
    t->head = make_dense(dims.tower_hidden_dim, 1);
  }

  // A bias shares the bound of the weight matrix before it, whose shape
  // gives fan_out x fan_in.
  Rng rng(seed);
  double bound = 0.0;
  for_each_block(p, [&](ParamGroup, const std::string&, auto& block) {
    if constexpr (std::is_same_v<std::decay_t<decltype(block)>, Eigen::MatrixXd>) {
      bound = std::sqrt(6.0 / static_cast<double>(block.rows() + block.cols()));
    }
    for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] = rng.uniform(-bound, bound);
  });
  return m;
}

BatchForward forward_batch(const MmoeModel& model, const Eigen::MatrixXd& features) {
  if (features.rows() != model.dims.input_dim) throw std::invalid_argument("feature dimension mismatch");
  if (!features.allFinite()) throw std::invalid_argument("features contain non-finite values");
  detail::ForwardCache c = detail::run_forward(model, features);
  return {c.score[0], c.score[1], c.gates[0], c.gates[1]};
}

ForwardResult forward(const MmoeModel& model, std::span<const double> x) {
  const Eigen::MatrixXd col = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  BatchForward b = forward_batch(model, col);
  ForwardResult r;
  r.confidence_logit = b.confidence_logit(0);
  r.confidence = sigmoid(r.confidence_logit);
  r.rank_score = b.rank_score(0);
  r.confidence_gate = b.confidence_gate.col(0);
  r.ranking_gate = b.ranking_gate.col(0);
  return r;
}

}  // namespace revmatch
