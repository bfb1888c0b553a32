// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ordrm/thresholds.hpp"

namespace ordrm {

// Log-space primitives; no overflow for |t| up to 1e8.
double sigmoid(double t);
double softplus(double t);
double log_sigmoid(double t);
// log(1 - e^x) for x < 0.
double log1mexp(double x);

enum class LossKind {
  kSimpleBt,
  kMarginBt,
  kScaledBt,
  kSoftLabel,
  kOrdinalNll,
  kOrdinalAt,
  kOrdinalIt,
};

// Ordinal losses carry threshold gradients; BT-family losses do not.
bool uses_thresholds(LossKind kind);
// Pairwise BT losses need a winner and skip z=0 examples.
bool skips_ties(LossKind kind);

// Per-level tables are indexed by preference strength |z| in 1..K.
struct LossSpec {
  LossKind kind = LossKind::kOrdinalNll;
  std::vector<double> margin_table;
  std::vector<double> weight_table;
  std::vector<double> prob_table;

  // Fills whichever table the kind needs with the defaults for K levels:
  // margins k, weights k, probabilities evenly spaced 0.75..0.95.
  static LossSpec with_defaults(LossKind kind, int num_levels);
  void validate(int num_levels) const;
};

struct LossValueGrad {
  double value = 0.0;
  double d_s = 0.0;
  // dL/dzeta in ascending order, size 2K for ordinal losses, else empty.
  std::vector<double> d_zeta;
};

// P(z | s) from the ordered-logit model: sigma(hi - s) - sigma(lo - s) with
// (lo, hi) = interval_of(z). Computed in log space (cancellation-safe).
double log_prob_level(double s, const Thresholds& th, int z);
double prob_level(double s, const Thresholds& th, int z);

LossValueGrad ordinal_nll(double s, const Thresholds& th, int z);
// Rank form: sum_j -log sigma(nu_j (t_j - s)), nu_j = -1 if j < rho(z) else +1.
LossValueGrad ordinal_at(double s, const Thresholds& th, int z);
// Penalties only at the target interval's finite boundaries.
LossValueGrad ordinal_it(double s, const Thresholds& th, int z);

// -log sigma(z_sign * s), z_sign in {+1, -1}.
LossValueGrad simple_bt(double s, int z_sign);
// -log sigma(s - m(z)) on canonicalized z > 0.
LossValueGrad margin_bt(double s, int z, std::span<const double> margin_table);
// -m(z) log sigma(s) on canonicalized z > 0.
LossValueGrad scaled_bt(double s, int z, std::span<const double> weight_table);
// BCE against soft target p(z); signed z via p(-k) = 1 - p(k), p(0) = 1/2.
LossValueGrad soft_label(double s, int z, std::span<const double> prob_table);

// lambda * sum zeta_j^2 and its gradient; applied once per optimization step.
std::pair<double, std::vector<double>> reg_penalty(const Thresholds& th,
                                                   double lambda);

// Unified per-example evaluation on the raw (uncanonicalized) score
// difference and signed label. Returns false when the example is skipped
// (z = 0 under a pairwise BT loss). `th` may be null for BT-family kinds.
bool example_loss(const LossSpec& spec, double s_raw, int z,
                  const Thresholds* th, LossValueGrad* out);

}  // namespace ordrm
