// SPDX-License-Identifier: Apache-2.0
#include "ordrm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ordrm/common.hpp"
#include "ordrm/losses.hpp"
#include "ordrm/train.hpp"

namespace ordrm {

double binary_accuracy(const RewardScorer& scorer, const Dataset& ds) {
  long long compared = 0;
  long long correct = 0;
  for (const auto& ex : ds.examples) {
    if (ex.z == 0) continue;
    ++compared;
    const double s = scorer.score_diff(ex.a, ex.b);
    if ((ex.z > 0 && s > 0) || (ex.z < 0 && s < 0)) {
      ++correct;
    }
  }
  if (compared == 0) {
    throw NumericError("binary_accuracy: undefined, every example has z=0");
  }
  return static_cast<double>(correct) / static_cast<double>(compared);
}

MetricsReport evaluate(const RewardScorer& scorer, const Thresholds* th,
                       const Dataset& ds) {
  MetricsReport report;
  report.n = static_cast<long long>(ds.size());
  const int K = th != nullptr ? th->num_levels() : ds.num_levels;

  std::vector<double> margins;
  double margin_sum = 0.0;
  double margin_max = 0.0;

  double abs_err_sum = 0.0;
  std::array<long long, 3> within{};
  if (th != nullptr) {
    report.has_ordinal = true;
    report.confusion.assign(2 * K + 1, std::vector<long long>(2 * K + 1, 0));
  }

  for (const auto& ex : ds.examples) {
    const double s = scorer.score_diff(ex.a, ex.b);
    if (ex.z == 0) {
      ++report.zero_excluded;
    } else {
      // canonicalized score: positive means the preferred side won
      const double s_c = ex.z > 0 ? s : -s;
      if (s_c > 0) {
        ++report.correct;
      } else if (s_c == 0) {
        ++report.ties;
      } else {
        ++report.errors;
        margins.push_back(-s_c);
        margin_sum += -s_c;
        margin_max = std::max(margin_max, -s_c);
      }
    }
    if (th != nullptr) {
      const int zp = th->predict_level(s);
      ++report.confusion[ex.z + K][zp + K];
      const int err = std::abs(zp - ex.z);
      abs_err_sum += err;
      for (int k = 0; k < 3; ++k) {
        if (err <= k) ++within[k];
      }
    }
  }

  const long long compared = report.correct + report.ties + report.errors;
  if (compared > 0) {
    report.binary_accuracy =
        static_cast<double>(report.correct) / static_cast<double>(compared);
    report.degenerate = report.ties == compared;
  }

  report.margins.count = static_cast<long long>(margins.size());
  if (!margins.empty()) {
    report.margins.mean = margin_sum / static_cast<double>(margins.size());
    report.margins.max = margin_max;
    const int bins = static_cast<int>(margin_max / 0.5) + 1;
    report.margins.histogram.assign(bins, 0);
    for (double m : margins) {
      ++report.margins.histogram[static_cast<int>(m / 0.5)];
    }
  }

  if (th != nullptr && report.n > 0) {
    report.mae = abs_err_sum / static_cast<double>(report.n);
    for (int k = 0; k < 3; ++k) {
      report.acc_within[k] =
          static_cast<double>(within[k]) / static_cast<double>(report.n);
    }
  }
  return report;
}

MetricsReport ordinal_metrics(const RewardScorer& scorer, const Thresholds& th,
                              const Dataset& ds) {
  return evaluate(scorer, &th, ds);
}

std::vector<double> error_margins(const RewardScorer& scorer, const Dataset& ds,
                                  MarginStats* stats) {
  std::vector<double> margins;
  for (const auto& ex : ds.examples) {
    if (ex.z == 0) continue;
    const double s = scorer.score_diff(ex.a, ex.b);
    const double s_c = ex.z > 0 ? s : -s;
    if (s_c < 0) {
      margins.push_back(-s_c);
    }
  }
  if (stats != nullptr) {
    stats->count = static_cast<long long>(margins.size());
    stats->histogram.clear();
    stats->mean.reset();
    stats->max.reset();
    if (!margins.empty()) {
      const double sum = std::accumulate(margins.begin(), margins.end(), 0.0);
      const double mx = *std::max_element(margins.begin(), margins.end());
      stats->mean = sum / static_cast<double>(margins.size());
      stats->max = mx;
      stats->histogram.assign(static_cast<int>(mx / 0.5) + 1, 0);
      for (double m : margins) {
        ++stats->histogram[static_cast<int>(m / 0.5)];
      }
    }
  }
  return margins;
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= n) {
    return sorted.back();
  }
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

double calibration_objective(std::span<const double> diffs,
                             std::span<const int> labels, const Thresholds& th,
                             std::vector<double>* grad_zeta) {
  const std::size_t n = diffs.size();
  double total = 0.0;
  if (grad_zeta != nullptr) {
    grad_zeta->assign(th.sorted().size(), 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const LossValueGrad lvg = ordinal_nll(diffs[i], th, labels[i]);
    total += lvg.value;
    if (grad_zeta != nullptr) {
      for (std::size_t j = 0; j < lvg.d_zeta.size(); ++j) {
        (*grad_zeta)[j] += lvg.d_zeta[j];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  if (grad_zeta != nullptr) {
    for (double& g : *grad_zeta) g *= inv;
  }
  return total * inv;
}

}  // namespace

CalibrationResult posthoc_calibrate(std::span<const double> diffs,
                                    std::span<const int> labels,
                                    int num_levels) {
  const int K = num_levels;
  if (K < 1) {
    throw SchemaError("posthoc_calibrate: K must be >= 1");
  }
  if (diffs.size() != labels.size()) {
    throw SchemaError("posthoc_calibrate: diffs and labels differ in length");
  }
  if (static_cast<int>(diffs.size()) < 2 * K + 1) {
    throw SchemaError("posthoc_calibrate: need at least 2K+1 examples");
  }
  for (int z : labels) {
    if (z < -K || z > K) {
      throw SchemaError("posthoc_calibrate: label outside [-K, K]");
    }
  }

  // Quantile-matched start: place each cut at the diff quantile of the
  // empirical cumulative label frequency below it, then polish with the
  // fixed 100-epoch full-batch Adam at lr 0.01.
  std::vector<double> sorted(diffs.begin(), diffs.end());
  std::sort(sorted.begin(), sorted.end());
  const double spread = sorted.back() - sorted.front();
  const bool low_information = !(spread > 1e-12);

  std::vector<long long> level_counts(2 * K + 1, 0);
  for (int z : labels) {
    ++level_counts[z + K];
  }
  std::vector<double> zeta0(2 * K);
  if (low_information) {
    for (int j = 0; j < 2 * K; ++j) {
      zeta0[j] = sorted.front() + 1e-3 * (j - K + 0.5);
    }
  } else {
    const double n = static_cast<double>(diffs.size());
    long long below = 0;
    for (int j = 0; j < 2 * K; ++j) {
      below += level_counts[j];
      const double q =
          std::clamp(static_cast<double>(below) / n, 1e-9, 1.0 - 1e-9);
      zeta0[j] = quantile(sorted, q);
    }
    const double min_gap = std::max(1e-8, 1e-4 * spread);
    for (int j = 1; j < 2 * K; ++j) {
      zeta0[j] = std::max(zeta0[j], zeta0[j - 1] + min_gap);
    }
  }

  ThresholdParams params =
      params_from_zeta(ThresholdMode::kAsymmetric, K, zeta0);

  CalibrationResult result{
      .thresholds = build_thresholds(params),
      .low_information = low_information,
  };
  result.objective_initial =
      calibration_objective(diffs, labels, result.thresholds, nullptr);

  AdamMoments moments;
  std::vector<double> grad_zeta;
  for (int epoch = 0; epoch < 100; ++epoch) {
    const Thresholds th = build_thresholds(params);
    calibration_objective(diffs, labels, th, &grad_zeta);
    const std::vector<double> grad_alpha = backprop_thresholds(params, grad_zeta);
    const std::vector<double> delta =
        adam_step(moments, grad_alpha, 0.01, 0.9, 0.999, 1e-8);
    for (std::size_t j = 0; j < params.alpha.size(); ++j) {
      params.alpha[j] += delta[j];
    }
  }

  result.thresholds = build_thresholds(params);
  result.objective_final =
      calibration_objective(diffs, labels, result.thresholds, nullptr);
  return result;
}

}  // namespace ordrm
