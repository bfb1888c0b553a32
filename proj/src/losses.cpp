// SPDX-License-Identifier: Apache-2.0
#include "ordrm/losses.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ordrm/common.hpp"

namespace ordrm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double sigmoid(double t) {
  if (t >= 0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) {
  if (t > 0) {
    return t + std::log1p(std::exp(-t));
  }
  return std::log1p(std::exp(t));
}

double log_sigmoid(double t) { return -softplus(-t); }

double log1mexp(double x) {
  // x < 0; branch at -ln 2 keeps both expm1 and exp well conditioned.
  if (x > -0.6931471805599453) {
    return std::log(-std::expm1(x));
  }
  return std::log1p(-std::exp(x));
}

bool uses_thresholds(LossKind kind) {
  return kind == LossKind::kOrdinalNll || kind == LossKind::kOrdinalAt ||
         kind == LossKind::kOrdinalIt;
}

bool skips_ties(LossKind kind) {
  return kind == LossKind::kSimpleBt || kind == LossKind::kMarginBt ||
         kind == LossKind::kScaledBt;
}

LossSpec LossSpec::with_defaults(LossKind kind, int num_levels) {
  LossSpec spec;
  spec.kind = kind;
  if (kind == LossKind::kMarginBt || kind == LossKind::kScaledBt) {
    auto& table =
        kind == LossKind::kMarginBt ? spec.margin_table : spec.weight_table;
    for (int k = 1; k <= num_levels; ++k) {
      table.push_back(static_cast<double>(k));
    }
  } else if (kind == LossKind::kSoftLabel) {
    for (int k = 1; k <= num_levels; ++k) {
      const double frac =
          num_levels == 1 ? 0.0 : static_cast<double>(k - 1) / (num_levels - 1);
      spec.prob_table.push_back(0.75 + 0.2 * frac);
    }
  }
  return spec;
}

void LossSpec::validate(int num_levels) const {
  auto check_size = [&](const std::vector<double>& table, const char* name) {
    if (static_cast<int>(table.size()) != num_levels) {
      throw SchemaError(std::string("loss spec: ") + name + " needs " +
                        std::to_string(num_levels) + " entries (strength 1..K)");
    }
  };
  if (kind == LossKind::kMarginBt) {
    check_size(margin_table, "margin_table");
    for (double m : margin_table) {
      if (!std::isfinite(m)) throw SchemaError("loss spec: non-finite margin");
    }
  } else if (kind == LossKind::kScaledBt) {
    check_size(weight_table, "weight_table");
    for (double w : weight_table) {
      if (!(w >= 0) || !std::isfinite(w)) {
        throw SchemaError("loss spec: weights must be >= 0");
      }
    }
  } else if (kind == LossKind::kSoftLabel) {
    check_size(prob_table, "prob_table");
    for (double p : prob_table) {
      if (!(p > 0) || !(p <= 1)) {
        throw SchemaError("loss spec: probabilities must lie in (0, 1]");
      }
    }
  }
}

double log_prob_level(double s, const Thresholds& th, int z) {
  const auto [lo, hi] = th.interval_of(z);
  if (hi == kInf) {
    return log_sigmoid(s - lo);
  }
  if (lo == -kInf) {
    return log_sigmoid(hi - s);
  }
  // sigma(a) - sigma(b) = sigma(a) sigma(-b) (1 - e^{b-a}), a = hi-s, b = lo-s.
  const double a = hi - s;
  const double b = lo - s;
  return log_sigmoid(a) + log_sigmoid(-b) + log1mexp(b - a);
}

double prob_level(double s, const Thresholds& th, int z) {
  return std::exp(log_prob_level(s, th, z));
}

LossValueGrad ordinal_nll(double s, const Thresholds& th, int z) {
  const int m = 2 * th.num_levels();
  const auto [lo, hi] = th.interval_of(z);
  const int rho = th.rank_of(z);
  LossValueGrad out;
  out.value = -log_prob_level(s, th, z);
  out.d_zeta.assign(m, 0.0);
  // d/ds of -log(sigma(a) - sigma(b)) collapses to 1 - sigma(a) - sigma(b)
  // with sigma(+inf)=1, sigma(-inf)=0; exact for the boundary levels too.
  const double a = hi - s;
  const double b = lo - s;
  const double sig_a = hi == kInf ? 1.0 : sigmoid(a);
  const double sig_b = lo == -kInf ? 0.0 : sigmoid(b);
  out.d_s = 1.0 - sig_a - sig_b;
  if (hi == kInf) {
    out.d_zeta[rho - 2] = sig_b;  // d(-log sigma(s - lo))/d lo
  } else if (lo == -kInf) {
    out.d_zeta[rho - 1] = -(1.0 - sig_a);  // -sigma(-a)
  } else {
    const double log_gap = log1mexp(b - a);
    out.d_zeta[rho - 1] =
        -std::exp(log_sigmoid(-a) - log_sigmoid(-b) - log_gap);
    out.d_zeta[rho - 2] = std::exp(log_sigmoid(b) - log_sigmoid(a) - log_gap);
  }
  return out;
}

LossValueGrad ordinal_at(double s, const Thresholds& th, int z) {
  const int m = 2 * th.num_levels();
  const int rho = th.rank_of(z);
  const auto& t = th.sorted();
  LossValueGrad out;
  out.d_zeta.assign(m, 0.0);
  for (int j = 0; j < m; ++j) {
    const double nu = (j + 1) < rho ? -1.0 : 1.0;
    const double u = nu * (t[j] - s);
    out.value += softplus(-u);
    const double slope = sigmoid(-u);
    out.d_s += nu * slope;
    out.d_zeta[j] = -nu * slope;
  }
  return out;
}

LossValueGrad ordinal_it(double s, const Thresholds& th, int z) {
  const int m = 2 * th.num_levels();
  const auto [lo, hi] = th.interval_of(z);
  const int rho = th.rank_of(z);
  LossValueGrad out;
  out.d_zeta.assign(m, 0.0);
  if (lo != -kInf) {
    out.value += softplus(lo - s);
    const double slope = sigmoid(lo - s);
    out.d_s -= slope;
    out.d_zeta[rho - 2] = slope;
  }
  if (hi != kInf) {
    out.value += softplus(s - hi);
    const double slope = sigmoid(s - hi);
    out.d_s += slope;
    out.d_zeta[rho - 1] = -slope;
  }
  return out;
}

LossValueGrad simple_bt(double s, int z_sign) {
  if (z_sign != 1 && z_sign != -1) {
    throw std::invalid_argument("simple_bt: z_sign must be +1 or -1");
  }
  LossValueGrad out;
  out.value = softplus(-z_sign * s);
  out.d_s = -z_sign * sigmoid(-z_sign * s);
  return out;
}

namespace {
double table_at(std::span<const double> table, int z, const char* what) {
  if (z < 1 || z > static_cast<int>(table.size())) {
    throw std::invalid_argument(std::string(what) +
                                ": level must be canonicalized into 1..K");
  }
  return table[z - 1];
}
}  // namespace

LossValueGrad margin_bt(double s, int z, std::span<const double> margin_table) {
  const double m = table_at(margin_table, z, "margin_bt");
  LossValueGrad out;
  out.value = softplus(m - s);
  out.d_s = -sigmoid(m - s);
  return out;
}

LossValueGrad scaled_bt(double s, int z, std::span<const double> weight_table) {
  const double w = table_at(weight_table, z, "scaled_bt");
  LossValueGrad out;
  out.value = w * softplus(-s);
  out.d_s = -w * sigmoid(-s);
  return out;
}

LossValueGrad soft_label(double s, int z, std::span<const double> prob_table) {
  double p = 0.5;
  if (z > 0) {
    p = table_at(prob_table, z, "soft_label");
  } else if (z < 0) {
    p = 1.0 - table_at(prob_table, -z, "soft_label");
  }
  LossValueGrad out;
  out.value = p * softplus(-s) + (1.0 - p) * softplus(s);
  out.d_s = sigmoid(s) - p;
  return out;
}

std::pair<double, std::vector<double>> reg_penalty(const Thresholds& th,
                                                   double lambda) {
  if (!(lambda >= 0)) {
    throw SchemaError("reg_penalty: lambda must be >= 0");
  }
  const auto& zeta = th.sorted();
  double value = 0.0;
  std::vector<double> grad(zeta.size());
  for (std::size_t j = 0; j < zeta.size(); ++j) {
    value += zeta[j] * zeta[j];
    grad[j] = 2.0 * lambda * zeta[j];
  }
  return {lambda * value, std::move(grad)};
}

bool example_loss(const LossSpec& spec, double s_raw, int z,
                  const Thresholds* th, LossValueGrad* out) {
  switch (spec.kind) {
    case LossKind::kOrdinalNll:
      *out = ordinal_nll(s_raw, *th, z);
      return true;
    case LossKind::kOrdinalAt:
      *out = ordinal_at(s_raw, *th, z);
      return true;
    case LossKind::kOrdinalIt:
      *out = ordinal_it(s_raw, *th, z);
      return true;
    case LossKind::kSoftLabel:
      *out = soft_label(s_raw, z, spec.prob_table);
      return true;
    case LossKind::kSimpleBt: {
      if (z == 0) return false;
      *out = simple_bt(s_raw, z > 0 ? 1 : -1);
      return true;
    }
    case LossKind::kMarginBt:
    case LossKind::kScaledBt: {
      if (z == 0) return false;
      const double sign = z > 0 ? 1.0 : -1.0;
      const int strength = z > 0 ? z : -z;
      *out = spec.kind == LossKind::kMarginBt
                 ? margin_bt(sign * s_raw, strength, spec.margin_table)
                 : scaled_bt(sign * s_raw, strength, spec.weight_table);
      out->d_s *= sign;
      return true;
    }
  }
  throw std::invalid_argument("example_loss: unknown loss kind");
}

}  // namespace ordrm
