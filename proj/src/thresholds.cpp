// SPDX-License-Identifier: Apache-2.0
#include "ordrm/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ordrm/common.hpp"

namespace ordrm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_alpha_size(const ThresholdParams& params) {
  if (params.num_levels < 1) {
    throw SchemaError("thresholds: K must be >= 1");
  }
  if (static_cast<int>(params.alpha.size()) != params.expected_size()) {
    throw SchemaError("thresholds: alpha has " +
                      std::to_string(params.alpha.size()) + " entries, expected " +
                      std::to_string(params.expected_size()));
  }
}

// Pool-adjacent-violators for nondecreasing least squares, equal weights.
std::vector<double> isotonic(std::span<const double> u) {
  const std::size_t n = u.size();
  std::vector<double> mean;
  std::vector<std::size_t> count;
  mean.reserve(n);
  count.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    mean.push_back(u[i]);
    count.push_back(1);
    while (mean.size() > 1 && mean[mean.size() - 2] >= mean.back()) {
      const double merged = (mean[mean.size() - 2] * count[count.size() - 2] +
                             mean.back() * count.back()) /
                            (count[count.size() - 2] + count.back());
      count[count.size() - 2] += count.back();
      mean[mean.size() - 2] = merged;
      mean.pop_back();
      count.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < mean.size(); ++b) {
    out.insert(out.end(), count[b], mean[b]);
  }
  return out;
}

}  // namespace

Thresholds::Thresholds(int num_levels, ThresholdMode mode,
                       std::vector<double> sorted_zeta)
    : num_levels_(num_levels), mode_(mode), zeta_(std::move(sorted_zeta)) {
  if (num_levels_ < 1) {
    throw SchemaError("thresholds: K must be >= 1");
  }
  if (static_cast<int>(zeta_.size()) != 2 * num_levels_) {
    throw SchemaError("thresholds: expected " + std::to_string(2 * num_levels_) +
                      " cut points, got " + std::to_string(zeta_.size()));
  }
  for (std::size_t j = 0; j < zeta_.size(); ++j) {
    if (!std::isfinite(zeta_[j])) {
      throw SchemaError("thresholds: non-finite cut point");
    }
    if (j > 0 && !(zeta_[j] > zeta_[j - 1])) {
      throw SchemaError("thresholds: cut points not strictly increasing at index " +
                        std::to_string(j));
    }
  }
  if (mode_ == ThresholdMode::kSymmetric) {
    for (int k = 1; k <= num_levels_; ++k) {
      if (logical(-k) != -logical(k)) {
        throw SchemaError("thresholds: symmetric mode requires zeta_{-k} = -zeta_k");
      }
    }
  }
}

double Thresholds::logical(int k) const {
  if (k == 0 || k < -num_levels_ || k > num_levels_) {
    throw SchemaError("thresholds: logical index out of range");
  }
  return k > 0 ? zeta_[num_levels_ + k - 1] : zeta_[num_levels_ + k];
}

int Thresholds::rank_of(int z) const {
  if (z < -num_levels_ || z > num_levels_) {
    throw SchemaError("thresholds: level " + std::to_string(z) +
                      " outside [-K, K] with K=" + std::to_string(num_levels_));
  }
  return z + num_levels_ + 1;
}

std::pair<double, double> Thresholds::interval_of(int z) const {
  const int rho = rank_of(z);
  const double lo = rho == 1 ? -kInf : zeta_[rho - 2];
  const double hi = rho == 2 * num_levels_ + 1 ? kInf : zeta_[rho - 1];
  return {lo, hi};
}

int Thresholds::predict_level(double s) const {
  if (std::isnan(s)) {
    throw NumericError("predict_level: score is NaN");
  }
  // Count of cut points <= s; boundary scores land in the interval above.
  const auto it = std::upper_bound(zeta_.begin(), zeta_.end(), s);
  const int below_or_equal = static_cast<int>(it - zeta_.begin());
  return below_or_equal - num_levels_;
}

Thresholds build_thresholds(const ThresholdParams& params) {
  check_alpha_size(params);
  const int K = params.num_levels;
  std::vector<double> zeta(2 * K);
  if (params.mode == ThresholdMode::kSymmetric) {
    double cur = 0.0;
    for (int k = 1; k <= K; ++k) {
      cur += std::exp(params.alpha[k - 1]);
      zeta[K + k - 1] = cur;
      zeta[K - k] = -cur;
    }
  } else {
    double cur = params.alpha[0];
    zeta[0] = cur;
    for (int j = 1; j < 2 * K; ++j) {
      cur += std::exp(params.alpha[j]);
      zeta[j] = cur;
    }
  }
  return Thresholds(K, params.mode, std::move(zeta));
}

std::vector<double> backprop_thresholds(const ThresholdParams& params,
                                        std::span<const double> grad_zeta) {
  check_alpha_size(params);
  const int K = params.num_levels;
  if (static_cast<int>(grad_zeta.size()) != 2 * K) {
    throw SchemaError("backprop_thresholds: grad_zeta must have 2K entries");
  }
  std::vector<double> grad_alpha(params.alpha.size(), 0.0);
  if (params.mode == ThresholdMode::kSymmetric) {
    // zeta_k = sum_{i<=k} exp(a_i), zeta_{-k} = -zeta_k; suffix sums of the
    // positive-half gradients minus the mirrored negative-half gradients.
    double suffix = 0.0;
    for (int k = K; k >= 1; --k) {
      const double g_pos = grad_zeta[K + k - 1];
      const double g_neg = grad_zeta[K - k];
      suffix += g_pos - g_neg;
      grad_alpha[k - 1] = std::exp(params.alpha[k - 1]) * suffix;
    }
  } else {
    // t_j = a_0 + sum_{i<j} exp(a_i): a_0 moves every threshold, a_m moves
    // thresholds at or after its increment.
    double suffix = 0.0;
    for (int j = 2 * K - 1; j >= 1; --j) {
      suffix += grad_zeta[j];
      grad_alpha[j] = std::exp(params.alpha[j]) * suffix;
    }
    grad_alpha[0] = suffix + grad_zeta[0];
  }
  return grad_alpha;
}

ThresholdParams params_from_zeta(ThresholdMode mode, int num_levels,
                                 std::span<const double> sorted_zeta) {
  if (static_cast<int>(sorted_zeta.size()) != 2 * num_levels) {
    throw SchemaError("params_from_zeta: expected 2K cut points");
  }
  ThresholdParams params;
  params.mode = mode;
  params.num_levels = num_levels;
  if (mode == ThresholdMode::kSymmetric) {
    params.alpha.resize(num_levels);
    double prev = 0.0;
    for (int k = 1; k <= num_levels; ++k) {
      const double cur = sorted_zeta[num_levels + k - 1];
      if (!(cur > prev)) {
        throw SchemaError("params_from_zeta: positive half not increasing from 0");
      }
      params.alpha[k - 1] = std::log(cur - prev);
      prev = cur;
    }
  } else {
    params.alpha.resize(2 * num_levels);
    params.alpha[0] = sorted_zeta[0];
    for (int j = 1; j < 2 * num_levels; ++j) {
      const double gap = sorted_zeta[j] - sorted_zeta[j - 1];
      if (!(gap > 0)) {
        throw SchemaError("params_from_zeta: cut points not strictly increasing");
      }
      params.alpha[j] = std::log(gap);
    }
  }
  return params;
}

std::vector<double> uniform_zeta(int num_levels) {
  const int m = 2 * num_levels;
  std::vector<double> zeta(m);
  const double half = num_levels / 2.0;
  const double gap = static_cast<double>(num_levels) / (m - 1);
  for (int j = 0; j < m; ++j) {
    zeta[j] = -half + gap * j;
  }
  // Mirror exactly so symmetric mode holds bit-for-bit.
  for (int j = 0; j < num_levels; ++j) {
    zeta[j] = -zeta[m - 1 - j];
  }
  return zeta;
}

ThresholdParams default_params(ThresholdMode mode, int num_levels) {
  return params_from_zeta(mode, num_levels, uniform_zeta(num_levels));
}

std::vector<double> project_spaced(std::span<const double> raw, double eps) {
  if (!(eps > 0)) {
    throw SchemaError("project_spaced: eps must be positive");
  }
  const std::size_t n = raw.size();
  bool feasible = true;
  for (std::size_t j = 1; j < n && feasible; ++j) {
    feasible = raw[j] >= raw[j - 1] + eps;
  }
  if (feasible) {
    return std::vector<double>(raw.begin(), raw.end());
  }
  std::vector<double> shifted(n);
  for (std::size_t j = 0; j < n; ++j) {
    shifted[j] = raw[j] - eps * static_cast<double>(j);
  }
  std::vector<double> iso = isotonic(shifted);
  for (std::size_t j = 0; j < n; ++j) {
    iso[j] += eps * static_cast<double>(j);
  }
  // The unshift can land an ulp short of the gap; pin feasibility exactly so
  // a second projection is the identity.
  for (std::size_t j = 1; j < n; ++j) {
    iso[j] = std::max(iso[j], iso[j - 1] + eps);
  }
  return iso;
}

Thresholds project_thresholds(std::span<const double> raw, double eps) {
  if (raw.size() % 2 != 0 || raw.empty()) {
    throw SchemaError("project_thresholds: raw must have 2K entries");
  }
  const int K = static_cast<int>(raw.size()) / 2;
  return Thresholds(K, ThresholdMode::kAsymmetric, project_spaced(raw, eps));
}

Thresholds project_thresholds_symmetric(std::span<const double> raw, double eps) {
  if (raw.size() % 2 != 0 || raw.empty()) {
    throw SchemaError("project_thresholds_symmetric: raw must have 2K entries");
  }
  if (!(eps > 0)) {
    throw SchemaError("project_thresholds_symmetric: eps must be positive");
  }
  const int K = static_cast<int>(raw.size()) / 2;
  // Fold: the objective separates as 2*(v_k - folded_k)^2 over the positive
  // half, with constraints v_1 >= eps/2 and v_{k+1} >= v_k + eps. Shift,
  // isotonic-project, then clip: clipping the unbounded isotonic solution at
  // the lower bound is the exact bounded solution.
  std::vector<double> folded(K);
  for (int k = 1; k <= K; ++k) {
    folded[k - 1] = 0.5 * (raw[K + k - 1] - raw[K - k]);
  }
  bool feasible = folded[0] >= eps / 2.0;
  for (int k = 1; k < K && feasible; ++k) {
    feasible = folded[k] >= folded[k - 1] + eps;
  }
  std::vector<double> pos;
  if (feasible) {
    pos = folded;
  } else {
    std::vector<double> shifted(K);
    for (int k = 0; k < K; ++k) {
      shifted[k] = folded[k] - eps * static_cast<double>(k);
    }
    pos = isotonic(shifted);
    for (int k = 0; k < K; ++k) {
      pos[k] = std::max(pos[k], eps / 2.0) + eps * static_cast<double>(k);
    }
    pos[0] = std::max(pos[0], eps / 2.0);
    for (int k = 1; k < K; ++k) {
      pos[k] = std::max(pos[k], pos[k - 1] + eps);
    }
  }
  std::vector<double> zeta(2 * K);
  for (int k = 1; k <= K; ++k) {
    zeta[K + k - 1] = pos[k - 1];
    zeta[K - k] = -pos[k - 1];
  }
  return Thresholds(K, ThresholdMode::kSymmetric, std::move(zeta));
}

}  // namespace ordrm
