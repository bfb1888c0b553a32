// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "ordrm/data.hpp"
#include "ordrm/scorer.hpp"
#include "ordrm/thresholds.hpp"

namespace ordrm {

struct MarginStats {
  long long count = 0;
  std::optional<double> mean;
  std::optional<double> max;
  std::vector<long long> histogram;  // bins of width 0.5 starting at 0
  double bin_width = 0.5;
};

struct MetricsReport {
  long long n = 0;

  // Binary block, over canonicalized z != 0 examples. Ties (diff == 0) count
  // as incorrect; errors + correct + ties + zero_excluded == n.
  std::optional<double> binary_accuracy;
  long long correct = 0;
  long long errors = 0;
  long long ties = 0;
  long long zero_excluded = 0;
  bool degenerate = false;

  // Ordinal block (present when thresholds were supplied).
  bool has_ordinal = false;
  std::optional<double> mae;
  std::array<double, 3> acc_within{};  // Acc@0, Acc@1, Acc@2
  std::vector<std::vector<long long>> confusion;  // true level x predicted

  MarginStats margins;
};

// Fraction of canonicalized z > 0 examples with score_diff > 0; throws
// NumericError when the dataset has no z != 0 example.
double binary_accuracy(const RewardScorer& scorer, const Dataset& ds);

// MAE, Acc@{0,1,2} and the (2K+1)^2 confusion matrix over all examples,
// z_pred = predict_level(score_diff, th).
MetricsReport ordinal_metrics(const RewardScorer& scorer, const Thresholds& th,
                              const Dataset& ds);

// Margins r(rejected) - r(chosen) > 0 of strictly misranked z != 0 examples.
std::vector<double> error_margins(const RewardScorer& scorer, const Dataset& ds,
                                  MarginStats* stats = nullptr);

// Full report: binary + margins, plus the ordinal block when th != null.
MetricsReport evaluate(const RewardScorer& scorer, const Thresholds* th,
                       const Dataset& ds);

struct CalibrationResult {
  Thresholds thresholds;
  bool low_information = false;
  double objective_initial = 0.0;
  double objective_final = 0.0;
};

// Fits asymmetric thresholds to frozen score differences by minimizing mean
// ordinal NLL: quantile-matched init, then full-batch Adam, 100 epochs,
// lr 0.01. Deterministic.
CalibrationResult posthoc_calibrate(std::span<const double> diffs,
                                    std::span<const int> labels, int num_levels);

}  // namespace ordrm
