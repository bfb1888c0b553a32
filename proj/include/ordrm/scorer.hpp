// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ordrm {

enum class ScorerKind { kLinear, kMlp };

// Toy reward function over feature vectors. Linear: w.f + b with params
// [w(d), b]. MLP: head.tanh(W f + c) + b, one hidden layer of width h,
// params [W(h x d, row-major), c(h), head(h), b].
class RewardScorer {
 public:
  RewardScorer(ScorerKind kind, int dim, int hidden, std::vector<double> params);

  static int param_count(ScorerKind kind, int dim, int hidden);
  static RewardScorer zeros(ScorerKind kind, int dim, int hidden);
  // w ~ N(0, 1/fan_in) per layer, biases 0, deterministic under seed.
  static RewardScorer random_init(ScorerKind kind, int dim, int hidden,
                                  std::uint64_t seed);

  ScorerKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int hidden() const { return hidden_; }
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& params() { return params_; }

  double score(std::span<const double> f) const;
  // s = score(a) - score(b); the predictor for every loss.
  double score_diff(std::span<const double> a, std::span<const double> b) const;
  // grad += upstream * d(score_diff)/d(params). For the linear scorer the
  // bias entry cancels exactly.
  void accumulate_score_diff_grad(std::span<const double> a,
                                  std::span<const double> b, double upstream,
                                  std::span<double> grad) const;

 private:
  ScorerKind kind_;
  int dim_;
  int hidden_;
  std::vector<double> params_;
};

}  // namespace ordrm
