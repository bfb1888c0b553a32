// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ordrm/data.hpp"
#include "ordrm/losses.hpp"
#include "ordrm/scorer.hpp"
#include "ordrm/thresholds.hpp"

namespace ordrm {

enum class SchedKind { kCosineWarmup, kConstant };
enum class OptKind { kSgd, kAdam };
enum class ThresholdOpt { kReparam, kProjectedGd };

struct TrainConfig {
  LossSpec loss;
  ThresholdMode mode = ThresholdMode::kSymmetric;
  int num_levels = 3;
  int epochs = 8;
  int batch_size = 64;

  ScorerKind scorer_kind = ScorerKind::kLinear;
  int dim = 16;
  int hidden = 32;
  // When set, training starts from (or freezes at) this scorer instead of a
  // random init.
  std::optional<RewardScorer> initial_scorer;
  bool freeze_scorer = false;

  double lr_phi = 1e-3;
  double lr_alpha = 1e-3;
  SchedKind sched_phi = SchedKind::kCosineWarmup;
  double warmup_frac = 0.1;  // sched_alpha is always constant

  double lambda = 1.0;
  OptKind optimizer = OptKind::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  // Thresholds updated only every N-th step.
  int async_interval = 1;
  ThresholdOpt threshold_opt = ThresholdOpt::kReparam;
  double proj_eps = 1e-3;

  std::uint64_t seed = 0;
  // Empty = default init (zeta uniformly spaced in [-K/2, K/2]).
  std::vector<double> init_alpha;

  int log_interval = 0;  // 0 = auto (~200 trajectory points)
  bool parallel = true;

  void validate() const;
};

struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;
  long long t = 0;
};

// Bias-corrected Adam update; returns the delta to add to the parameters and
// advances the moments.
std::vector<double> adam_step(AdamMoments& moments, std::span<const double> grad,
                              double lr, double beta1, double beta2, double eps);

// Linear ramp 0 -> base_lr over the warmup steps, then cosine decay to 0.
double cosine_warmup_lr(long long step, long long total, double warmup_frac,
                        double base_lr);

struct Checkpoint {
  long long step = 0;
  double val_binary_accuracy = 0.0;
  std::vector<double> scorer_params;
  std::vector<double> zeta;
};

struct TrainState {
  RewardScorer scorer;
  // Reparam mode optimizes alpha; ProjectedGD holds zeta directly.
  ThresholdParams th_params;
  std::vector<double> zeta_raw;
  bool has_thresholds = false;
  ThresholdOpt threshold_opt = ThresholdOpt::kReparam;

  AdamMoments opt_phi;
  AdamMoments opt_alpha;
  long long step = 0;

  std::vector<double> loss_history;  // batch-mean loss + reg, per step
  std::vector<std::pair<long long, std::vector<double>>> trajectory;
  std::optional<Checkpoint> best;

  Thresholds current_thresholds() const;
};

struct TrainReport {
  long long total_steps = 0;
  long long skipped_examples = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  std::optional<long long> best_step;
  std::optional<double> best_val_accuracy;
};

// Joint optimization of scorer and thresholds: per step, batch-mean loss plus
// the regularization penalty applied once; simultaneous updates at
// async_interval 1. Deterministic under seed (shuffle keyed by (seed, epoch)).
std::pair<TrainState, TrainReport> train(const Dataset& ds, const TrainConfig& cfg,
                                         const Dataset* validation = nullptr);

// Mean per-example loss over the whole dataset plus the penalty (th null for
// BT-family losses).
double full_objective(const Dataset& ds, const RewardScorer& scorer,
                      const Thresholds* th, const LossSpec& spec, double lambda);

}  // namespace ordrm
