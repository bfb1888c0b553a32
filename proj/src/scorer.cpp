// SPDX-License-Identifier: Apache-2.0
#include "ordrm/scorer.hpp"

#include <cmath>
#include <string>

#include "ordrm/common.hpp"
#include "ordrm/rng.hpp"

namespace ordrm {

RewardScorer::RewardScorer(ScorerKind kind, int dim, int hidden,
                           std::vector<double> params)
    : kind_(kind), dim_(dim), hidden_(hidden), params_(std::move(params)) {
  if (dim_ < 1) {
    throw SchemaError("scorer: d must be >= 1");
  }
  if (kind_ == ScorerKind::kMlp && hidden_ < 1) {
    throw SchemaError("scorer: mlp requires h >= 1");
  }
  if (kind_ == ScorerKind::kLinear) {
    hidden_ = 0;
  }
  const int expected = param_count(kind_, dim_, hidden_);
  if (static_cast<int>(params_.size()) != expected) {
    throw SchemaError("scorer: expected " + std::to_string(expected) +
                      " parameters, got " + std::to_string(params_.size()));
  }
  for (double p : params_) {
    if (!std::isfinite(p)) {
      throw SchemaError("scorer: non-finite parameter");
    }
  }
}

int RewardScorer::param_count(ScorerKind kind, int dim, int hidden) {
  return kind == ScorerKind::kLinear ? dim + 1
                                     : dim * hidden + hidden + hidden + 1;
}

RewardScorer RewardScorer::zeros(ScorerKind kind, int dim, int hidden) {
  return RewardScorer(kind, dim, hidden,
                      std::vector<double>(param_count(kind, dim, hidden), 0.0));
}

RewardScorer RewardScorer::random_init(ScorerKind kind, int dim, int hidden,
                                       std::uint64_t seed) {
  std::vector<double> params(param_count(kind, dim, hidden), 0.0);
  rng::Stream stream(seed, rng::Purpose::kInit, 0);
  if (kind == ScorerKind::kLinear) {
    const double std_w = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int i = 0; i < dim; ++i) {
      params[i] = std_w * stream.next_gauss();
    }
  } else {
    const double std_w = 1.0 / std::sqrt(static_cast<double>(dim));
    const double std_head = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (int i = 0; i < dim * hidden; ++i) {
      params[i] = std_w * stream.next_gauss();
    }
    double* head = params.data() + dim * hidden + hidden;
    for (int i = 0; i < hidden; ++i) {
      head[i] = std_head * stream.next_gauss();
    }
  }
  return RewardScorer(kind, dim, hidden, std::move(params));
}

double RewardScorer::score(std::span<const double> f) const {
  if (static_cast<int>(f.size()) != dim_) {
    throw SchemaError("scorer: feature dimension mismatch");
  }
  if (kind_ == ScorerKind::kLinear) {
    double acc = params_[dim_];
    for (int i = 0; i < dim_; ++i) {
      acc += params_[i] * f[i];
    }
    return acc;
  }
  const double* w = params_.data();
  const double* c = params_.data() + dim_ * hidden_;
  const double* head = c + hidden_;
  const double b = params_.back();
  double acc = b;
  for (int k = 0; k < hidden_; ++k) {
    double u = c[k];
    const double* row = w + k * dim_;
    for (int i = 0; i < dim_; ++i) {
      u += row[i] * f[i];
    }
    acc += head[k] * std::tanh(u);
  }
  return acc;
}

double RewardScorer::score_diff(std::span<const double> a,
                                std::span<const double> b) const {
  if (static_cast<int>(a.size()) != dim_ || static_cast<int>(b.size()) != dim_) {
    throw SchemaError("scorer: feature dimension mismatch");
  }
  // Bias-free forms: the bias cancels algebraically, so perturbing it cannot
  // change any loss value even at the last ulp.
  if (kind_ == ScorerKind::kLinear) {
    double acc = 0.0;
    for (int i = 0; i < dim_; ++i) {
      acc += params_[i] * (a[i] - b[i]);
    }
    return acc;
  }
  const double* w = params_.data();
  const double* c = params_.data() + dim_ * hidden_;
  const double* head = c + hidden_;
  double acc = 0.0;
  for (int k = 0; k < hidden_; ++k) {
    const double* row = w + k * dim_;
    double ua = c[k];
    double ub = c[k];
    for (int i = 0; i < dim_; ++i) {
      ua += row[i] * a[i];
      ub += row[i] * b[i];
    }
    acc += head[k] * (std::tanh(ua) - std::tanh(ub));
  }
  return acc;
}

void RewardScorer::accumulate_score_diff_grad(std::span<const double> a,
                                              std::span<const double> b,
                                              double upstream,
                                              std::span<double> grad) const {
  if (static_cast<int>(a.size()) != dim_ || static_cast<int>(b.size()) != dim_) {
    throw SchemaError("scorer: feature dimension mismatch");
  }
  if (grad.size() != params_.size()) {
    throw SchemaError("scorer: gradient buffer size mismatch");
  }
  if (kind_ == ScorerKind::kLinear) {
    for (int i = 0; i < dim_; ++i) {
      grad[i] += upstream * (a[i] - b[i]);
    }
    return;  // bias cancels in the difference
  }
  const double* w = params_.data();
  const double* c = params_.data() + dim_ * hidden_;
  const double* head = c + hidden_;
  double* gw = grad.data();
  double* gc = grad.data() + dim_ * hidden_;
  double* ghead = gc + hidden_;
  for (int k = 0; k < hidden_; ++k) {
    const double* row = w + k * dim_;
    double ua = c[k];
    double ub = c[k];
    for (int i = 0; i < dim_; ++i) {
      ua += row[i] * a[i];
      ub += row[i] * b[i];
    }
    const double ta = std::tanh(ua);
    const double tb = std::tanh(ub);
    const double da = 1.0 - ta * ta;
    const double db = 1.0 - tb * tb;
    ghead[k] += upstream * (ta - tb);
    const double hk = head[k];
    gc[k] += upstream * hk * (da - db);
    double* grow = gw + k * dim_;
    for (int i = 0; i < dim_; ++i) {
      grow[i] += upstream * hk * (da * a[i] - db * b[i]);
    }
  }
  // bias cancels in the difference
}

}  // namespace ordrm
