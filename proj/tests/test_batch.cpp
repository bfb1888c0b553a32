// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <numeric>
#include <vector>

#include "ordrm/batch.hpp"
#include "ordrm/data.hpp"
#include "ordrm/losses.hpp"
#include "ordrm/rng.hpp"

using namespace ordrm;

namespace {

Dataset make_dataset(int n, int K, std::uint64_t seed) {
  RewardScorer truth = RewardScorer::random_init(ScorerKind::kLinear, 6, 0, 1);
  std::vector<double> zeta = uniform_zeta(K);
  for (double& t : zeta) t *= 2.0;
  Thresholds th(K, ThresholdMode::kSymmetric, zeta);
  GenConfig cfg{n, 6, K, std::move(truth), std::move(th), 1.0, seed};
  return generate(cfg);
}

bool accum_equal(const batch::Accum& x, const batch::Accum& y) {
  return x.loss_sum == y.loss_sum && x.used == y.used &&
         x.skipped == y.skipped && x.grad_params == y.grad_params &&
         x.grad_zeta == y.grad_zeta &&
         x.first_non_finite == y.first_non_finite;
}

}  // namespace

TEST_CASE("parallel kernel is bit-identical to the serial reference") {
  const int K = 3;
  const Dataset ds = make_dataset(777, K, 3);
  std::vector<int> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  const Thresholds th(K, ThresholdMode::kSymmetric,
                      {-2.0, -1.2, -0.4, 0.4, 1.2, 2.0});

  const LossKind kinds[] = {LossKind::kSimpleBt,   LossKind::kMarginBt,
                            LossKind::kScaledBt,   LossKind::kSoftLabel,
                            LossKind::kOrdinalNll, LossKind::kOrdinalAt,
                            LossKind::kOrdinalIt};
  for (LossKind kind : kinds) {
    const LossSpec spec = LossSpec::with_defaults(kind, K);
    const Thresholds* th_ptr = uses_thresholds(kind) ? &th : nullptr;
    for (ScorerKind sk : {ScorerKind::kLinear, ScorerKind::kMlp}) {
      const RewardScorer scorer = RewardScorer::random_init(sk, 6, 4, 9);
      const batch::Accum ref =
          batch::serial_loss_grad(ds, idx, scorer, th_ptr, spec, true);
      for (int threads : {1, 2, 4, 7}) {
        omp_set_num_threads(threads);
        const batch::Accum par =
            batch::parallel_loss_grad(ds, idx, scorer, th_ptr, spec, true);
        REQUIRE(accum_equal(ref, par));
      }
      REQUIRE(ref.used + ref.skipped == static_cast<long long>(ds.size()));
      if (skips_ties(kind)) {
        REQUIRE(ref.skipped > 0);  // ties exist in this fixture
      } else {
        REQUIRE(ref.skipped == 0);
      }
    }
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("kernels honor the index subset and want_scorer_grad flag") {
  const Dataset ds = make_dataset(100, 2, 5);
  const std::vector<int> idx = {5, 17, 3, 99, 42};
  const RewardScorer scorer =
      RewardScorer::random_init(ScorerKind::kLinear, 6, 0, 2);
  const Thresholds th(2, ThresholdMode::kSymmetric, {-1.0, -0.4, 0.4, 1.0});
  const LossSpec spec = LossSpec::with_defaults(LossKind::kOrdinalNll, 2);

  const batch::Accum with_grad =
      batch::serial_loss_grad(ds, idx, scorer, &th, spec, true);
  const batch::Accum without_grad =
      batch::serial_loss_grad(ds, idx, scorer, &th, spec, false);
  CHECK(with_grad.loss_sum == without_grad.loss_sum);
  CHECK(with_grad.grad_params.size() == scorer.params().size());
  CHECK(without_grad.grad_params.empty());
  CHECK(with_grad.used == 5);

  // Against a hand accumulation over the same subset.
  double want = 0.0;
  LossValueGrad lvg;
  for (int i : idx) {
    example_loss(spec, scorer.score_diff(ds.examples[i].a, ds.examples[i].b),
                 ds.examples[i].z, &th, &lvg);
    want += lvg.value;
  }
  CHECK(with_grad.loss_sum == want);
}

TEST_CASE("non-finite losses are flagged with the first dataset index") {
  Dataset ds = make_dataset(16, 1, 8);
  // a - b overflows to +inf, so the losing-side loss is +inf.
  ds.examples[6].a.assign(6, 1e308);
  ds.examples[6].b.assign(6, -1e308);
  ds.examples[6].z = -1;
  ds.examples[11].a.assign(6, 1e308);
  ds.examples[11].b.assign(6, -1e308);
  ds.examples[11].z = -1;
  std::vector<int> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  const RewardScorer scorer(ScorerKind::kLinear, 6,
                            0, {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0});
  const LossSpec spec = LossSpec::with_defaults(LossKind::kSimpleBt, 1);

  const batch::Accum ser =
      batch::serial_loss_grad(ds, idx, scorer, nullptr, spec, true);
  const batch::Accum par =
      batch::parallel_loss_grad(ds, idx, scorer, nullptr, spec, true);
  CHECK(ser.first_non_finite == 6);
  CHECK(par.first_non_finite == 6);
}

TEST_CASE("score diff kernels agree bitwise") {
  const Dataset ds = make_dataset(333, 2, 6);
  std::vector<int> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  const RewardScorer scorer =
      RewardScorer::random_init(ScorerKind::kMlp, 6, 5, 4);
  std::vector<double> serial(ds.size()), parallel(ds.size());
  batch::serial_score_diffs(ds, idx, scorer, serial);
  for (int threads : {1, 3, 8}) {
    omp_set_num_threads(threads);
    batch::parallel_score_diffs(ds, idx, scorer, parallel);
    REQUIRE(serial == parallel);
  }
  omp_set_num_threads(omp_get_num_procs());
}
