// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ordrm::gradcheck {

inline constexpr double kTol = 1e-5;
inline constexpr double kStep = 1e-6;

// |a - b| / max(|a|, |b|, 1).
double rel_err(double a, double b);

// Central finite differences of a scalar function, h = kStep.
std::vector<double> finite_diff(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h = kStep);

// Max rel_err between analytic gradient and finite_diff(f, x).
double check_gradient(const std::function<double(std::span<const double>)>& f,
                      std::span<const double> x,
                      std::span<const double> analytic, double h = kStep);

struct Row {
  std::string name;
  int draws = 0;
  double max_rel_err = 0.0;
  int worst_draw = -1;  // draw index where max_rel_err occurred
  bool pass = false;
};

// The full finite-difference suite: per-loss d_s/d_zeta, scorer backprop for
// both kinds, threshold backprop for both modes, and the end-to-end
// composition loss(score_diff(params), build(alpha)) per combination.
std::vector<Row> run_all(std::uint64_t seed, int draws = 100);

}  // namespace ordrm::gradcheck
