// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <utility>
#include <vector>

namespace ordrm {

enum class ThresholdMode { kSymmetric, kAsymmetric };

// Ordered cut points zeta_{-K} < ... < zeta_{-1} < zeta_1 < ... < zeta_K
// stored ascending (no zeta_0). Levels z in {-K..K} map to rank
// rho(z) = z + K + 1 in {1..2K+1}; level z occupies the half-open interval
// [t_{rho-1}, t_rho) with implicit sentinels t_0 = -inf, t_{2K+1} = +inf.
class Thresholds {
 public:
  Thresholds(int num_levels, ThresholdMode mode, std::vector<double> sorted_zeta);

  int num_levels() const { return num_levels_; }
  ThresholdMode mode() const { return mode_; }
  const std::vector<double>& sorted() const { return zeta_; }

  // zeta_k for k in {-K..-1} u {1..K}.
  double logical(int k) const;
  int rank_of(int z) const;
  // (lo, hi) bounds of level z, using +-inf sentinels.
  std::pair<double, double> interval_of(int z) const;
  // Unique z whose half-open interval contains s; boundary scores go up.
  int predict_level(double s) const;

 private:
  int num_levels_;
  ThresholdMode mode_;
  std::vector<double> zeta_;
};

// Unconstrained parameterization: alpha has K entries (symmetric) or 2K
// (asymmetric). Symmetric: zeta_1 = exp(a_1), zeta_k = zeta_{k-1} + exp(a_k),
// negative half mirrored. Asymmetric: zeta_{-K} = a_0, each later threshold
// adds exp(a_j).
struct ThresholdParams {
  ThresholdMode mode = ThresholdMode::kSymmetric;
  int num_levels = 1;
  std::vector<double> alpha;

  int expected_size() const {
    return mode == ThresholdMode::kSymmetric ? num_levels : 2 * num_levels;
  }
};

Thresholds build_thresholds(const ThresholdParams& params);

// Chain rule through build_thresholds: dL/dalpha from dL/dzeta given in
// ascending (logical) order.
std::vector<double> backprop_thresholds(const ThresholdParams& params,
                                        std::span<const double> grad_zeta);

// Inverse of build_thresholds (for initializing alpha from a target ladder).
ThresholdParams params_from_zeta(ThresholdMode mode, int num_levels,
                                 std::span<const double> sorted_zeta);

// Ladder of 2K thresholds uniformly spaced spanning [-K/2, K/2].
std::vector<double> uniform_zeta(int num_levels);
ThresholdParams default_params(ThresholdMode mode, int num_levels);

// Euclidean projection onto {v : v_{j+1} >= v_j + eps} by shifting to
// u_j = v_j - j*eps and pool-adjacent-violators isotonic regression.
std::vector<double> project_spaced(std::span<const double> raw, double eps);

// project_spaced wrapped into a Thresholds value (asymmetric).
Thresholds project_thresholds(std::span<const double> raw, double eps);

// Projection onto the symmetric subspace intersected with the eps-separated
// set: fold to the positive half, isotonic-project with lower bound eps/2.
Thresholds project_thresholds_symmetric(std::span<const double> raw, double eps);

}  // namespace ordrm
