#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "revmatch/eval.hpp"

namespace revmatch {

IsotonicCalibrator::IsotonicCalibrator(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.empty() || xs_.size() != ys_.size()) throw std::invalid_argument("isotonic map needs matching knots");
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    if (!(xs_[i] > xs_[i - 1]) || ys_[i] < ys_[i - 1]) {
      throw std::invalid_argument("isotonic knots must be increasing in x and non-decreasing in y");
    }
  }
}

double IsotonicCalibrator::operator()(double raw) const {
  if (xs_.empty()) throw std::logic_error("isotonic map is not fitted");
  // Last knot at or below `raw`; below the first knot the first value holds.
  auto it = std::upper_bound(xs_.begin(), xs_.end(), raw);
  if (it == xs_.begin()) return ys_.front();
  return ys_[static_cast<std::size_t>(it - xs_.begin()) - 1];
}

IsotonicCalibrator fit_isotonic(std::span<const double> xs, std::span<const double> ys,
                                std::span<const double> weights) {
  if (xs.empty() || xs.size() != ys.size()) throw std::invalid_argument("fit_isotonic: mismatched inputs");
  if (!weights.empty() && weights.size() != xs.size()) throw std::invalid_argument("fit_isotonic: weight count");
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  for (double x : xs) {
    if (!std::isfinite(x)) throw std::invalid_argument("fit_isotonic: non-finite score");
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

  struct Block {
    double x;        // first x of the block
    double sum_wy;
    double sum_w;
    std::vector<double> xs;
    double mean() const { return sum_wy / sum_w; }
  };
  // Equal scores share one fitted value, so they are merged up front.
  std::vector<Block> points;
  for (std::size_t i : order) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) throw std::invalid_argument("fit_isotonic: weights must be positive");
    if (!points.empty() && points.back().xs.back() == xs[i]) {
      points.back().sum_wy += w * ys[i];
      points.back().sum_w += w;
    } else {
      points.push_back({xs[i], w * ys[i], w, {xs[i]}});
    }
  }

  std::vector<Block> stack;
  for (Block& p : points) {
    stack.push_back(std::move(p));
    while (stack.size() > 1 && stack[stack.size() - 2].mean() > stack.back().mean()) {
      Block top = std::move(stack.back());
      stack.pop_back();
      Block& prev = stack.back();
      prev.sum_wy += top.sum_wy;
      prev.sum_w += top.sum_w;
      prev.xs.insert(prev.xs.end(), top.xs.begin(), top.xs.end());
    }
  }

  std::vector<double> kx, ky;
  for (const Block& b : stack) {
    const double y = b.mean();
    for (double x : b.xs) {
      kx.push_back(x);
      ky.push_back(y);
    }
  }
  return IsotonicCalibrator(std::move(kx), std::move(ky));
}

IsotonicCalibrator isotonic_calibrate(std::span<const double> positive_scores,
                                      std::span<const double> negative_scores) {
  if (positive_scores.empty() || negative_scores.empty()) {
    throw std::invalid_argument("isotonic calibration needs at least one score of each class");
  }
  std::vector<double> xs(positive_scores.begin(), positive_scores.end());
  xs.insert(xs.end(), negative_scores.begin(), negative_scores.end());
  std::vector<double> ys(positive_scores.size(), 1.0);
  ys.resize(xs.size(), 0.0);
  return fit_isotonic(xs, ys);
}

void to_json(json& j, const IsotonicCalibrator& c) { j = {{"x", c.knots_x()}, {"y", c.knots_y()}}; }

void from_json(const json& j, IsotonicCalibrator& c) {
  c = IsotonicCalibrator(j.at("x").get<std::vector<double>>(), j.at("y").get<std::vector<double>>());
}

}  // namespace revmatch
