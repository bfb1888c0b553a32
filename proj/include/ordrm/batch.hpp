// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "ordrm/data.hpp"
#include "ordrm/losses.hpp"
#include "ordrm/scorer.hpp"

namespace ordrm::batch {

// Sums (not means) over the examples selected by `indices`.
struct Accum {
  double loss_sum = 0.0;
  long long used = 0;
  long long skipped = 0;
  std::vector<double> grad_params;  // sized to scorer params when requested
  std::vector<double> grad_zeta;    // ascending order, sized 2K when th given
  // Dataset index of the first example with a non-finite loss or per-example
  // gradient, or -1.
  long long first_non_finite = -1;
};

// Reference implementation: one sequential pass in index order.
Accum serial_loss_grad(const Dataset& ds, std::span<const int> indices,
                       const RewardScorer& scorer, const Thresholds* th,
                       const LossSpec& spec, bool want_scorer_grad);

// OpenMP implementation: per-example slots filled in parallel, then a
// fixed-order reduction. Bit-identical to serial_loss_grad for any thread
// count (the addition sequence is the same).
Accum parallel_loss_grad(const Dataset& ds, std::span<const int> indices,
                         const RewardScorer& scorer, const Thresholds* th,
                         const LossSpec& spec, bool want_scorer_grad);

void serial_score_diffs(const Dataset& ds, std::span<const int> indices,
                        const RewardScorer& scorer, std::span<double> out);
void parallel_score_diffs(const Dataset& ds, std::span<const int> indices,
                          const RewardScorer& scorer, std::span<double> out);

}  // namespace ordrm::batch
