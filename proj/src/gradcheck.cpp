// SPDX-License-Identifier: Apache-2.0
#include "ordrm/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "ordrm/losses.hpp"
#include "ordrm/rng.hpp"
#include "ordrm/scorer.hpp"
#include "ordrm/thresholds.hpp"

namespace ordrm::gradcheck {

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

std::vector<double> finite_diff(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double up = f(point);
    point[i] = saved - h;
    const double down = f(point);
    point[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double check_gradient(const std::function<double(std::span<const double>)>& f,
                      std::span<const double> x,
                      std::span<const double> analytic, double h) {
  const std::vector<double> numeric = finite_diff(f, x, h);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    worst = std::max(worst, rel_err(analytic[i], numeric[i]));
  }
  return worst;
}

namespace {

const LossKind kAllLosses[] = {
    LossKind::kSimpleBt, LossKind::kMarginBt,  LossKind::kScaledBt,
    LossKind::kSoftLabel, LossKind::kOrdinalNll, LossKind::kOrdinalAt,
    LossKind::kOrdinalIt,
};

const char* loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::kSimpleBt: return "simple_bt";
    case LossKind::kMarginBt: return "margin_bt";
    case LossKind::kScaledBt: return "scaled_bt";
    case LossKind::kSoftLabel: return "soft_label";
    case LossKind::kOrdinalNll: return "ordinal_nll";
    case LossKind::kOrdinalAt: return "ordinal_at";
    case LossKind::kOrdinalIt: return "ordinal_it";
  }
  return "?";
}

// Random ladder with gaps >= e^-2, safely wider than the FD step.
std::vector<double> random_zeta(rng::Stream& stream, int K) {
  ThresholdParams params;
  params.mode = ThresholdMode::kAsymmetric;
  params.num_levels = K;
  params.alpha.resize(2 * K);
  params.alpha[0] = -2.0 * K * stream.next_unit();
  for (int j = 1; j < 2 * K; ++j) {
    params.alpha[j] = -2.0 + 3.0 * stream.next_unit();
  }
  return build_thresholds(params).sorted();
}

int random_level(rng::Stream& stream, int K, bool allow_zero) {
  int z;
  do {
    z = static_cast<int>(stream.next_below(2 * K + 1)) - K;
  } while (!allow_zero && z == 0);
  return z;
}

std::vector<double> random_alpha(rng::Stream& stream, ThresholdMode mode, int K) {
  const int size = mode == ThresholdMode::kSymmetric ? K : 2 * K;
  std::vector<double> alpha(size);
  for (double& a : alpha) {
    a = -1.5 + 2.5 * stream.next_unit();
  }
  if (mode == ThresholdMode::kAsymmetric) {
    alpha[0] = -2.0 + 4.0 * stream.next_unit() - K;
  }
  return alpha;
}

Row check_loss_kind(LossKind kind, std::uint64_t seed, int draws) {
  Row row{std::string("loss.") + loss_name(kind), draws, 0.0, -1, false};
  for (int rep = 0; rep < draws; ++rep) {
    rng::Stream stream(seed, rng::Purpose::kGeneric, 1000 + rep);
    const int K = 1 + static_cast<int>(stream.next_below(3));
    const LossSpec spec = LossSpec::with_defaults(kind, K);
    const std::vector<double> zeta = random_zeta(stream, K);
    const int z = random_level(stream, K, !skips_ties(kind));
    const double s = -4.0 + 8.0 * stream.next_unit();
    const bool ordinal = uses_thresholds(kind);

    // x = [s] ++ zeta (ordinal) or [s]; thresholds rebuilt per evaluation so
    // the finite differences flow through the cut points too.
    std::vector<double> x;
    x.push_back(s);
    if (ordinal) {
      x.insert(x.end(), zeta.begin(), zeta.end());
    }
    auto f = [&](std::span<const double> point) {
      LossValueGrad lvg;
      if (ordinal) {
        Thresholds th(K, ThresholdMode::kAsymmetric,
                      std::vector<double>(point.begin() + 1, point.end()));
        example_loss(spec, point[0], z, &th, &lvg);
      } else {
        example_loss(spec, point[0], z, nullptr, &lvg);
      }
      return lvg.value;
    };

    LossValueGrad lvg;
    Thresholds th(K, ThresholdMode::kAsymmetric, zeta);
    example_loss(spec, s, z, ordinal ? &th : nullptr, &lvg);
    std::vector<double> analytic;
    analytic.push_back(lvg.d_s);
    if (ordinal) {
      analytic.insert(analytic.end(), lvg.d_zeta.begin(), lvg.d_zeta.end());
    }
    const double err = check_gradient(f, x, analytic);
    if (err > row.max_rel_err) {
      row.max_rel_err = err;
      row.worst_draw = rep;
    }
  }
  row.pass = row.max_rel_err <= kTol;
  return row;
}

Row check_scorer(ScorerKind kind, std::uint64_t seed, int draws) {
  Row row{kind == ScorerKind::kLinear ? "scorer.linear" : "scorer.mlp", draws,
          0.0, -1, false};
  const int d = 8;
  const int h = 8;
  for (int rep = 0; rep < draws; ++rep) {
    rng::Stream stream(seed, rng::Purpose::kGeneric, 2000 + rep);
    RewardScorer scorer = RewardScorer::random_init(
        kind, d, h, seed * 7919 + static_cast<std::uint64_t>(rep));
    std::vector<double> a(d), b(d);
    for (int i = 0; i < d; ++i) {
      a[i] = stream.next_gauss();
      b[i] = stream.next_gauss();
    }
    const double upstream = -2.0 + 4.0 * stream.next_unit();

    auto f = [&](std::span<const double> point) {
      RewardScorer probe(kind, d, h,
                         std::vector<double>(point.begin(), point.end()));
      return upstream * probe.score_diff(a, b);
    };
    std::vector<double> analytic(scorer.params().size(), 0.0);
    scorer.accumulate_score_diff_grad(a, b, upstream, analytic);
    const double err = check_gradient(f, scorer.params(), analytic);
    if (err > row.max_rel_err) {
      row.max_rel_err = err;
      row.worst_draw = rep;
    }
  }
  row.pass = row.max_rel_err <= kTol;
  return row;
}

Row check_threshold_backprop(ThresholdMode mode, std::uint64_t seed, int draws) {
  Row row{mode == ThresholdMode::kSymmetric ? "thresholds.symmetric"
                                            : "thresholds.asymmetric",
          draws, 0.0, -1, false};
  for (int rep = 0; rep < draws; ++rep) {
    rng::Stream stream(seed, rng::Purpose::kGeneric, 3000 + rep);
    const int K = 1 + static_cast<int>(stream.next_below(3));
    ThresholdParams params{mode, K, random_alpha(stream, mode, K)};
    // Smooth functional of zeta with random linear and quadratic terms.
    std::vector<double> lin(2 * K), quad(2 * K);
    for (int j = 0; j < 2 * K; ++j) {
      lin[j] = -1.0 + 2.0 * stream.next_unit();
      quad[j] = -1.0 + 2.0 * stream.next_unit();
    }
    auto f = [&](std::span<const double> point) {
      ThresholdParams probe{mode, K,
                            std::vector<double>(point.begin(), point.end())};
      const auto zeta = build_thresholds(probe).sorted();
      double acc = 0.0;
      for (int j = 0; j < 2 * K; ++j) {
        acc += lin[j] * zeta[j] + quad[j] * zeta[j] * zeta[j];
      }
      return acc;
    };
    const auto zeta = build_thresholds(params).sorted();
    std::vector<double> grad_zeta(2 * K);
    for (int j = 0; j < 2 * K; ++j) {
      grad_zeta[j] = lin[j] + 2.0 * quad[j] * zeta[j];
    }
    const std::vector<double> analytic = backprop_thresholds(params, grad_zeta);
    const double err = check_gradient(f, params.alpha, analytic);
    if (err > row.max_rel_err) {
      row.max_rel_err = err;
      row.worst_draw = rep;
    }
  }
  row.pass = row.max_rel_err <= kTol;
  return row;
}

Row check_end_to_end(LossKind kind, ScorerKind scorer_kind, ThresholdMode mode,
                     std::uint64_t seed, int draws) {
  std::string name = std::string("e2e.") + loss_name(kind) + "." +
                     (scorer_kind == ScorerKind::kLinear ? "linear" : "mlp");
  const bool ordinal = uses_thresholds(kind);
  if (ordinal) {
    name += mode == ThresholdMode::kSymmetric ? ".sym" : ".asym";
  }
  Row row{std::move(name), draws, 0.0, -1, false};
  const int d = 6;
  const int h = 5;
  for (int rep = 0; rep < draws; ++rep) {
    rng::Stream stream(seed, rng::Purpose::kGeneric, 4000 + rep);
    const int K = 1 + static_cast<int>(stream.next_below(3));
    const LossSpec spec = LossSpec::with_defaults(kind, K);
    RewardScorer scorer = RewardScorer::random_init(
        scorer_kind, d, h, seed * 104729 + static_cast<std::uint64_t>(rep));
    std::vector<double> a(d), b(d);
    for (int i = 0; i < d; ++i) {
      a[i] = stream.next_gauss();
      b[i] = stream.next_gauss();
    }
    const int z = random_level(stream, K, !skips_ties(kind));
    ThresholdParams params{mode, K, random_alpha(stream, mode, K)};
    const std::size_t n_phi = scorer.params().size();

    auto f = [&](std::span<const double> point) {
      RewardScorer probe(
          scorer_kind, d, h,
          std::vector<double>(point.begin(), point.begin() + n_phi));
      LossValueGrad lvg;
      if (ordinal) {
        ThresholdParams pp{mode, K,
                           std::vector<double>(point.begin() + n_phi, point.end())};
        Thresholds th = build_thresholds(pp);
        example_loss(spec, probe.score_diff(a, b), z, &th, &lvg);
      } else {
        example_loss(spec, probe.score_diff(a, b), z, nullptr, &lvg);
      }
      return lvg.value;
    };

    std::vector<double> x = scorer.params();
    if (ordinal) {
      x.insert(x.end(), params.alpha.begin(), params.alpha.end());
    }
    LossValueGrad lvg;
    Thresholds th = build_thresholds(params);
    example_loss(spec, scorer.score_diff(a, b), z, ordinal ? &th : nullptr,
                 &lvg);
    std::vector<double> analytic(n_phi, 0.0);
    scorer.accumulate_score_diff_grad(a, b, lvg.d_s, analytic);
    if (ordinal) {
      const std::vector<double> grad_alpha =
          backprop_thresholds(params, lvg.d_zeta);
      analytic.insert(analytic.end(), grad_alpha.begin(), grad_alpha.end());
    }
    const double err = check_gradient(f, x, analytic);
    if (err > row.max_rel_err) {
      row.max_rel_err = err;
      row.worst_draw = rep;
    }
  }
  row.pass = row.max_rel_err <= kTol;
  return row;
}

}  // namespace

std::vector<Row> run_all(std::uint64_t seed, int draws) {
  std::vector<Row> rows;
  for (LossKind kind : kAllLosses) {
    rows.push_back(check_loss_kind(kind, seed, draws));
  }
  rows.push_back(check_scorer(ScorerKind::kLinear, seed, draws));
  rows.push_back(check_scorer(ScorerKind::kMlp, seed, draws));
  rows.push_back(
      check_threshold_backprop(ThresholdMode::kSymmetric, seed, draws));
  rows.push_back(
      check_threshold_backprop(ThresholdMode::kAsymmetric, seed, draws));
  for (LossKind kind : kAllLosses) {
    for (ScorerKind sk : {ScorerKind::kLinear, ScorerKind::kMlp}) {
      if (uses_thresholds(kind)) {
        for (ThresholdMode mode :
             {ThresholdMode::kSymmetric, ThresholdMode::kAsymmetric}) {
          rows.push_back(check_end_to_end(kind, sk, mode, seed, draws));
        }
      } else {
        rows.push_back(check_end_to_end(kind, sk, ThresholdMode::kSymmetric,
                                        seed, draws));
      }
    }
  }
  return rows;
}

}  // namespace ordrm::gradcheck
