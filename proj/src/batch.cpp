// SPDX-License-Identifier: Apache-2.0
#include "ordrm/batch.hpp"

#include <cmath>

#include "ordrm/common.hpp"

namespace ordrm::batch {

namespace {

struct Slot {
  double loss = 0.0;
  bool used = false;
  bool finite = true;
};

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

Accum serial_loss_grad(const Dataset& ds, std::span<const int> indices,
                       const RewardScorer& scorer, const Thresholds* th,
                       const LossSpec& spec, bool want_scorer_grad) {
  const std::size_t n_params = scorer.params().size();
  const std::size_t n_zeta = th != nullptr ? th->sorted().size() : 0;
  Accum acc;
  if (want_scorer_grad) acc.grad_params.assign(n_params, 0.0);
  acc.grad_zeta.assign(n_zeta, 0.0);
  LossValueGrad lvg;
  std::vector<double> example_grad(want_scorer_grad ? n_params : 0);
  for (int idx : indices) {
    const PreferenceExample& ex = ds.examples[idx];
    const double s = scorer.score_diff(ex.a, ex.b);
    if (!example_loss(spec, s, ex.z, th, &lvg)) {
      ++acc.skipped;
      continue;
    }
    if (want_scorer_grad) {
      std::fill(example_grad.begin(), example_grad.end(), 0.0);
      scorer.accumulate_score_diff_grad(ex.a, ex.b, lvg.d_s, example_grad);
    }
    if (!std::isfinite(lvg.value) || !all_finite(example_grad) ||
        !all_finite(lvg.d_zeta)) {
      acc.first_non_finite = idx;
      return acc;
    }
    ++acc.used;
    acc.loss_sum += lvg.value;
    // Each slot receives exactly one addend per example, so summing through
    // the staging buffer is bit-identical to accumulating in place.
    for (std::size_t j = 0; j < example_grad.size(); ++j) {
      acc.grad_params[j] += example_grad[j];
    }
    for (std::size_t j = 0; j < n_zeta; ++j) {
      acc.grad_zeta[j] += lvg.d_zeta[j];
    }
  }
  return acc;
}

Accum parallel_loss_grad(const Dataset& ds, std::span<const int> indices,
                         const RewardScorer& scorer, const Thresholds* th,
                         const LossSpec& spec, bool want_scorer_grad) {
  const std::size_t n = indices.size();
  const std::size_t n_params = want_scorer_grad ? scorer.params().size() : 0;
  const std::size_t n_zeta = th != nullptr ? th->sorted().size() : 0;

  std::vector<Slot> slots(n);
  std::vector<double> grad_p(n * n_params, 0.0);
  std::vector<double> grad_z(n * n_zeta, 0.0);

#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    const PreferenceExample& ex = ds.examples[indices[i]];
    const double s = scorer.score_diff(ex.a, ex.b);
    LossValueGrad lvg;
    if (!example_loss(spec, s, ex.z, th, &lvg)) {
      continue;
    }
    Slot& slot = slots[i];
    slot.used = true;
    slot.loss = lvg.value;
    const std::span<double> grad_slice(grad_p.data() + i * n_params, n_params);
    if (n_params > 0) {
      scorer.accumulate_score_diff_grad(ex.a, ex.b, lvg.d_s, grad_slice);
    }
    for (std::size_t j = 0; j < n_zeta; ++j) {
      grad_z[i * n_zeta + j] = lvg.d_zeta[j];
    }
    slot.finite = std::isfinite(lvg.value) && all_finite(grad_slice) &&
                  all_finite(lvg.d_zeta);
  }

  // Fixed-order reduction: the addition sequence matches the serial pass, so
  // the result is bit-identical for any thread count.
  Accum acc;
  if (want_scorer_grad) acc.grad_params.assign(n_params, 0.0);
  acc.grad_zeta.assign(n_zeta, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Slot& slot = slots[i];
    if (!slot.used) {
      ++acc.skipped;
      continue;
    }
    if (!slot.finite) {
      acc.first_non_finite = indices[i];
      return acc;
    }
    ++acc.used;
    acc.loss_sum += slot.loss;
    for (std::size_t j = 0; j < n_params; ++j) {
      acc.grad_params[j] += grad_p[i * n_params + j];
    }
    for (std::size_t j = 0; j < n_zeta; ++j) {
      acc.grad_zeta[j] += grad_z[i * n_zeta + j];
    }
  }
  return acc;
}

void serial_score_diffs(const Dataset& ds, std::span<const int> indices,
                        const RewardScorer& scorer, std::span<double> out) {
  if (out.size() != indices.size()) {
    throw SchemaError("score_diffs: output size mismatch");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const PreferenceExample& ex = ds.examples[indices[i]];
    out[i] = scorer.score_diff(ex.a, ex.b);
  }
}

void parallel_score_diffs(const Dataset& ds, std::span<const int> indices,
                          const RewardScorer& scorer, std::span<double> out) {
  if (out.size() != indices.size()) {
    throw SchemaError("score_diffs: output size mismatch");
  }
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const PreferenceExample& ex = ds.examples[indices[i]];
    out[i] = scorer.score_diff(ex.a, ex.b);
  }
}

}  // namespace ordrm::batch
