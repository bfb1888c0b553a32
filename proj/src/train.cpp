// SPDX-License-Identifier: Apache-2.0
#include "ordrm/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ordrm/batch.hpp"
#include "ordrm/common.hpp"
#include "ordrm/eval.hpp"
#include "ordrm/rng.hpp"

namespace ordrm {

void TrainConfig::validate() const {
  if (num_levels < 1) throw SchemaError("train config: K must be >= 1");
  if (epochs < 1) throw SchemaError("train config: epochs must be >= 1");
  if (batch_size < 1) throw SchemaError("train config: batch_size must be >= 1");
  if (!(lr_phi > 0)) throw SchemaError("train config: lr_phi must be > 0");
  if (!(lr_alpha > 0)) throw SchemaError("train config: lr_alpha must be > 0");
  if (!(warmup_frac >= 0 && warmup_frac < 1)) {
    throw SchemaError("train config: warmup_frac must lie in [0, 1)");
  }
  if (!(lambda >= 0)) throw SchemaError("train config: lambda must be >= 0");
  if (async_interval < 1) {
    throw SchemaError("train config: async_interval must be >= 1");
  }
  if (threshold_opt == ThresholdOpt::kProjectedGd && !(proj_eps > 0)) {
    throw SchemaError("train config: proj_eps must be > 0");
  }
  if (!init_alpha.empty()) {
    const int expected =
        mode == ThresholdMode::kSymmetric ? num_levels : 2 * num_levels;
    if (static_cast<int>(init_alpha.size()) != expected) {
      throw SchemaError("train config: init_alpha needs " +
                        std::to_string(expected) + " entries");
    }
  }
  loss.validate(num_levels);
}

std::vector<double> adam_step(AdamMoments& moments, std::span<const double> grad,
                              double lr, double beta1, double beta2, double eps) {
  if (moments.m.size() != grad.size()) {
    moments.m.assign(grad.size(), 0.0);
    moments.v.assign(grad.size(), 0.0);
    moments.t = 0;
  }
  ++moments.t;
  const double corr1 = 1.0 - std::pow(beta1, static_cast<double>(moments.t));
  const double corr2 = 1.0 - std::pow(beta2, static_cast<double>(moments.t));
  std::vector<double> delta(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    moments.m[i] = beta1 * moments.m[i] + (1.0 - beta1) * grad[i];
    moments.v[i] = beta2 * moments.v[i] + (1.0 - beta2) * grad[i] * grad[i];
    const double m_hat = moments.m[i] / corr1;
    const double v_hat = moments.v[i] / corr2;
    delta[i] = -lr * m_hat / (std::sqrt(v_hat) + eps);
  }
  return delta;
}

double cosine_warmup_lr(long long step, long long total, double warmup_frac,
                        double base_lr) {
  if (step < 0 || step > total) {
    throw SchemaError("cosine_warmup_lr: step outside [0, total]");
  }
  const double warmup = warmup_frac * static_cast<double>(total);
  if (warmup > 0 && static_cast<double>(step) < warmup) {
    return base_lr * static_cast<double>(step) / warmup;
  }
  if (total == 0) {
    return base_lr;
  }
  const double progress =
      (static_cast<double>(step) - warmup) / (static_cast<double>(total) - warmup);
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

Thresholds TrainState::current_thresholds() const {
  if (!has_thresholds) {
    throw SchemaError("train state: loss has no thresholds");
  }
  if (threshold_opt == ThresholdOpt::kReparam) {
    return build_thresholds(th_params);
  }
  const int K = static_cast<int>(zeta_raw.size()) / 2;
  return Thresholds(K, th_params.mode, zeta_raw);
}

double full_objective(const Dataset& ds, const RewardScorer& scorer,
                      const Thresholds* th, const LossSpec& spec, double lambda) {
  std::vector<int> all(ds.size());
  std::iota(all.begin(), all.end(), 0);
  const batch::Accum acc =
      batch::serial_loss_grad(ds, all, scorer, th, spec, false);
  double value = acc.used > 0 ? acc.loss_sum / static_cast<double>(acc.used) : 0.0;
  if (th != nullptr) {
    value += reg_penalty(*th, lambda).first;
  }
  return value;
}

namespace {

struct SgdOrAdam {
  OptKind kind;
  AdamMoments moments;

  std::vector<double> step(std::span<const double> grad, double lr,
                           const TrainConfig& cfg) {
    if (kind == OptKind::kAdam) {
      return adam_step(moments, grad, lr, cfg.beta1, cfg.beta2, cfg.adam_eps);
    }
    std::vector<double> delta(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) {
      delta[i] = -lr * grad[i];
    }
    return delta;
  }
};

}  // namespace

std::pair<TrainState, TrainReport> train(const Dataset& ds, const TrainConfig& cfg,
                                         const Dataset* validation) {
  cfg.validate();
  if (ds.examples.empty()) {
    throw SchemaError("train: dataset is empty");
  }
  for (std::size_t i = 0; i < ds.examples.size(); ++i) {
    const int z = ds.examples[i].z;
    if (z < -cfg.num_levels || z > cfg.num_levels) {
      throw SchemaError("train: example " + std::to_string(i) + " has level " +
                        std::to_string(z) + " outside config K=" +
                        std::to_string(cfg.num_levels));
    }
  }
  if (cfg.initial_scorer.has_value() && cfg.initial_scorer->dim() != ds.dim) {
    throw SchemaError("train: initial scorer dimension != dataset dimension");
  }

  const bool ordinal = uses_thresholds(cfg.loss.kind);
  const long long n = static_cast<long long>(ds.size());
  const long long steps_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  const long long total_steps = steps_per_epoch * cfg.epochs;
  const long long log_interval =
      cfg.log_interval > 0 ? cfg.log_interval
                           : std::max<long long>(1, total_steps / 200);

  TrainState state{
      .scorer = cfg.initial_scorer.has_value()
                    ? *cfg.initial_scorer
                    : RewardScorer::random_init(cfg.scorer_kind, ds.dim,
                                                cfg.hidden, cfg.seed),
      .th_params = {},
      .zeta_raw = {},
      .has_thresholds = ordinal,
      .threshold_opt = cfg.threshold_opt,
      .opt_phi = {},
      .opt_alpha = {},
      .step = 0,
      .loss_history = {},
      .trajectory = {},
      .best = {},
  };
  if (ordinal) {
    ThresholdParams init =
        cfg.init_alpha.empty()
            ? default_params(cfg.mode, cfg.num_levels)
            : ThresholdParams{cfg.mode, cfg.num_levels, cfg.init_alpha};
    if (cfg.threshold_opt == ThresholdOpt::kReparam) {
      state.th_params = std::move(init);
    } else {
      state.th_params.mode = cfg.mode;
      state.th_params.num_levels = cfg.num_levels;
      state.zeta_raw = build_thresholds(init).sorted();
    }
  }

  SgdOrAdam opt_phi{cfg.optimizer, {}};
  SgdOrAdam opt_alpha{cfg.optimizer, {}};

  TrainReport report;
  report.total_steps = total_steps;
  {
    const Thresholds th0 = ordinal ? state.current_thresholds()
                                   : Thresholds(1, ThresholdMode::kSymmetric,
                                                {-1.0, 1.0});
    report.initial_objective = full_objective(
        ds, state.scorer, ordinal ? &th0 : nullptr, cfg.loss, cfg.lambda);
  }

  // Sup-norm stability window for checkpoint eligibility.
  const long long stability_window =
      std::max(1LL, static_cast<long long>(std::ceil(0.05 * total_steps)));
  std::vector<std::vector<double>> zeta_history;
  if (validation != nullptr && ordinal) {
    zeta_history.reserve(total_steps);
  }

  std::vector<int> order(ds.size());
  std::iota(order.begin(), order.end(), 0);

  bool val_has_signal = false;
  if (validation != nullptr) {
    for (const auto& ex : validation->examples) {
      if (ex.z != 0) {
        val_has_signal = true;
        break;
      }
    }
  }

  auto log_zeta = [&](long long step_idx) {
    if (!ordinal) return;
    state.trajectory.emplace_back(step_idx, state.current_thresholds().sorted());
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng::Stream shuffle_stream(cfg.seed, rng::Purpose::kShuffle,
                               static_cast<std::uint64_t>(epoch));
    rng::shuffle(order, shuffle_stream);

    for (long long b = 0; b < steps_per_epoch; ++b) {
      const long long begin = b * cfg.batch_size;
      const long long end = std::min<long long>(begin + cfg.batch_size, n);
      const std::span<const int> batch_idx(order.data() + begin,
                                           static_cast<std::size_t>(end - begin));

      Thresholds th = ordinal ? state.current_thresholds()
                              : Thresholds(1, ThresholdMode::kSymmetric,
                                           {-1.0, 1.0});
      const Thresholds* th_ptr = ordinal ? &th : nullptr;

      const bool want_phi_grad = !cfg.freeze_scorer;
      const batch::Accum acc =
          cfg.parallel
              ? batch::parallel_loss_grad(ds, batch_idx, state.scorer, th_ptr,
                                          cfg.loss, want_phi_grad)
              : batch::serial_loss_grad(ds, batch_idx, state.scorer, th_ptr,
                                        cfg.loss, want_phi_grad);
      if (acc.first_non_finite >= 0) {
        throw NumericError("train: non-finite loss or gradient at step " +
                           std::to_string(state.step) + ", example " +
                           std::to_string(acc.first_non_finite));
      }
      report.skipped_examples += acc.skipped;

      const double denom = acc.used > 0 ? static_cast<double>(acc.used) : 1.0;
      double step_loss = acc.loss_sum / denom;

      std::vector<double> grad_zeta;
      if (ordinal) {
        grad_zeta.assign(acc.grad_zeta.size(), 0.0);
        for (std::size_t j = 0; j < grad_zeta.size(); ++j) {
          grad_zeta[j] = acc.grad_zeta[j] / denom;
        }
        auto [reg_value, reg_grad] = reg_penalty(th, cfg.lambda);
        step_loss += reg_value;
        for (std::size_t j = 0; j < grad_zeta.size(); ++j) {
          grad_zeta[j] += reg_grad[j];
        }
      }

      if (want_phi_grad) {
        std::vector<double> grad_phi(acc.grad_params.size());
        for (std::size_t j = 0; j < grad_phi.size(); ++j) {
          grad_phi[j] = acc.grad_params[j] / denom;
        }
        const double lr =
            cfg.sched_phi == SchedKind::kCosineWarmup
                ? cosine_warmup_lr(state.step, total_steps, cfg.warmup_frac,
                                   cfg.lr_phi)
                : cfg.lr_phi;
        const std::vector<double> delta = opt_phi.step(grad_phi, lr, cfg);
        auto& params = state.scorer.params();
        for (std::size_t j = 0; j < params.size(); ++j) {
          params[j] += delta[j];
        }
      }

      if (ordinal && state.step % cfg.async_interval == 0) {
        if (cfg.threshold_opt == ThresholdOpt::kReparam) {
          const std::vector<double> grad_alpha =
              backprop_thresholds(state.th_params, grad_zeta);
          const std::vector<double> delta =
              opt_alpha.step(grad_alpha, cfg.lr_alpha, cfg);
          for (std::size_t j = 0; j < state.th_params.alpha.size(); ++j) {
            state.th_params.alpha[j] += delta[j];
          }
        } else {
          std::vector<double> moved = state.zeta_raw;
          for (std::size_t j = 0; j < moved.size(); ++j) {
            moved[j] -= cfg.lr_alpha * grad_zeta[j];
          }
          const Thresholds projected =
              cfg.mode == ThresholdMode::kSymmetric
                  ? project_thresholds_symmetric(moved, cfg.proj_eps)
                  : project_thresholds(moved, cfg.proj_eps);
          state.zeta_raw = projected.sorted();
        }
      }

      state.loss_history.push_back(step_loss);
      if (validation != nullptr && ordinal) {
        zeta_history.push_back(state.current_thresholds().sorted());
      }
      if (state.step % log_interval == 0 || state.step + 1 == total_steps) {
        log_zeta(state.step);
      }

      // Checkpoint selection on validation accuracy, excluding steps where
      // the thresholds moved more than 0.05 in sup-norm over the trailing
      // window (transition phases).
      if (validation != nullptr && state.step % log_interval == 0) {
        bool stable = true;
        if (ordinal) {
          if (state.step + 1 < stability_window) {
            stable = false;
          } else {
            const auto& now = zeta_history.back();
            const auto& then =
                zeta_history[zeta_history.size() - stability_window];
            double sup = 0.0;
            for (std::size_t j = 0; j < now.size(); ++j) {
              sup = std::max(sup, std::abs(now[j] - then[j]));
            }
            stable = sup <= 0.05;
          }
        }
        if (stable && val_has_signal) {
          const double acc_val = binary_accuracy(state.scorer, *validation);
          if (!state.best.has_value() ||
              acc_val > state.best->val_binary_accuracy) {
            Checkpoint cp;
            cp.step = state.step;
            cp.val_binary_accuracy = acc_val;
            cp.scorer_params = state.scorer.params();
            if (ordinal) cp.zeta = state.current_thresholds().sorted();
            state.best = std::move(cp);
          }
        }
      }

      ++state.step;
    }
  }

  {
    const Thresholds th_end = ordinal ? state.current_thresholds()
                                      : Thresholds(1, ThresholdMode::kSymmetric,
                                                   {-1.0, 1.0});
    report.final_objective = full_objective(
        ds, state.scorer, ordinal ? &th_end : nullptr, cfg.loss, cfg.lambda);
  }
  if (state.best.has_value()) {
    report.best_step = state.best->step;
    report.best_val_accuracy = state.best->val_binary_accuracy;
  }
  return {std::move(state), std::move(report)};
}

}  // namespace ordrm
