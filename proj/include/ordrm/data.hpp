// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ordrm/scorer.hpp"
#include "ordrm/thresholds.hpp"

namespace ordrm {

// One comparison: "a is preferred to b at level z". z_clean keeps the
// pre-noise label when noise was injected.
struct PreferenceExample {
  std::vector<double> a;
  std::vector<double> b;
  int z = 0;
  std::optional<int> z_clean;
};

struct Dataset {
  int num_levels = 0;  // K
  int dim = 0;         // d
  std::vector<PreferenceExample> examples;

  std::size_t size() const { return examples.size(); }
};

struct GenConfig {
  int n = 0;
  int d = 0;
  int num_levels = 1;
  RewardScorer true_scorer;
  Thresholds true_thresholds;
  double feature_scale = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Samples features i.i.d. N(0, feature_scale^2)^d and labels from the
// ordered-logit level probabilities at s* = score_diff(true_scorer, a, b).
// Per-example Philox streams make the output independent of thread count.
Dataset generate(const GenConfig& cfg, bool parallel = true);

struct NoiseCounts {
  std::int64_t selected = 0;  // Bernoulli(rate) successes
  std::int64_t changed = 0;   // labels that actually differ afterwards
};

// Each example independently selected with probability rate; selected labels
// shift +-1 (prob 1/2 each) clamped to [-K, K]. Labels only; features and
// order untouched.
Dataset inject_shift_noise(const Dataset& ds, double rate, std::uint64_t seed,
                           NoiseCounts* counts = nullptr);
// Selected labels replaced by Uniform{-K..K} (may equal the original).
Dataset inject_random_noise(const Dataset& ds, double rate, std::uint64_t seed,
                            NoiseCounts* counts = nullptr);

// Orient so z >= 0: if z < 0, swap a/b and negate z (and z_clean).
std::pair<PreferenceExample, bool> canonicalize(const PreferenceExample& ex);

// One JSON object per line: {"a":[...],"b":[...],"z":int,"z_clean":int|null}.
// K is required to range-check labels; parse/schema errors name the line.
Dataset read_jsonl(const std::string& path, int num_levels);
void write_jsonl(const Dataset& ds, const std::string& path);

}  // namespace ordrm
