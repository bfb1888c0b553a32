// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ordrm/common.hpp"
#include "ordrm/gradcheck.hpp"
#include "ordrm/rng.hpp"
#include "ordrm/scorer.hpp"

using namespace ordrm;

TEST_CASE("linear score is the affine form") {
  RewardScorer zero = RewardScorer::zeros(ScorerKind::kLinear, 3, 0);
  CHECK(zero.score(std::vector<double>{1.0, -2.0, 5.0}) == 0.0);

  RewardScorer sc(ScorerKind::kLinear, 2, 0, {1.0, 2.0, 0.5});
  CHECK(sc.score(std::vector<double>{1.0, 1.0}) == doctest::Approx(3.5));
}

TEST_CASE("mlp with zero weights returns the output bias") {
  RewardScorer sc = RewardScorer::zeros(ScorerKind::kMlp, 4, 3);
  sc.params().back() = 1.25;
  CHECK(sc.score(std::vector<double>{3.0, -1.0, 0.0, 2.0}) ==
        doctest::Approx(1.25));
}

TEST_CASE("score_diff basics") {
  RewardScorer sc(ScorerKind::kLinear, 2, 0, {1.0, 0.0, 7.0});
  const std::vector<double> fy = {2.0, 9.0};
  const std::vector<double> fy2 = {1.0, 9.0};
  CHECK(sc.score_diff(fy, fy) == 0.0);
  CHECK(sc.score_diff(fy, fy2) == doctest::Approx(1.0));  // bias cancels
}

TEST_CASE("score_diff is antisymmetric") {
  rng::Stream s(21, rng::Purpose::kGeneric, 0);
  for (ScorerKind kind : {ScorerKind::kLinear, ScorerKind::kMlp}) {
    const int d = 6;
    RewardScorer sc = RewardScorer::random_init(kind, d, 5, 3);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> a(d), b(d);
      for (int i = 0; i < d; ++i) {
        a[i] = s.next_gauss();
        b[i] = s.next_gauss();
      }
      CHECK(sc.score_diff(a, b) == -sc.score_diff(b, a));
    }
  }
}

TEST_CASE("linear bias is unidentifiable through score_diff") {
  RewardScorer sc = RewardScorer::random_init(ScorerKind::kLinear, 5, 0, 9);
  rng::Stream s(22, rng::Purpose::kGeneric, 0);
  std::vector<double> a(5), b(5);
  for (int i = 0; i < 5; ++i) {
    a[i] = s.next_gauss();
    b[i] = s.next_gauss();
  }
  const double before = sc.score_diff(a, b);
  sc.params().back() += 123.0;
  CHECK(sc.score_diff(a, b) == before);

  std::vector<double> grad(sc.params().size(), 0.0);
  sc.accumulate_score_diff_grad(a, b, 1.0, grad);
  CHECK(grad.back() == 0.0);
}

TEST_CASE("score_diff gradient matches central finite differences") {
  for (ScorerKind kind : {ScorerKind::kLinear, ScorerKind::kMlp}) {
    const int d = 7;
    const int h = 4;
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      rng::Stream s(23, rng::Purpose::kGeneric, rep);
      RewardScorer sc = RewardScorer::random_init(kind, d, h, 100 + rep);
      std::vector<double> a(d), b(d);
      for (int i = 0; i < d; ++i) {
        a[i] = s.next_gauss();
        b[i] = s.next_gauss();
      }
      const double upstream = 2.0 * s.next_unit() - 1.0;
      auto f = [&](std::span<const double> p) {
        RewardScorer probe(kind, d, h, std::vector<double>(p.begin(), p.end()));
        return upstream * probe.score_diff(a, b);
      };
      std::vector<double> analytic(sc.params().size(), 0.0);
      sc.accumulate_score_diff_grad(a, b, upstream, analytic);
      worst = std::max(worst,
                       gradcheck::check_gradient(f, sc.params(), analytic));
    }
    CHECK(worst <= 1e-5);
  }
}

TEST_CASE("fy == fy2 gives a zero gradient") {
  RewardScorer sc = RewardScorer::random_init(ScorerKind::kMlp, 4, 3, 5);
  const std::vector<double> f = {0.5, -1.0, 2.0, 0.0};
  std::vector<double> grad(sc.params().size(), 0.0);
  sc.accumulate_score_diff_grad(f, f, 1.7, grad);
  for (double g : grad) {
    CHECK(g == 0.0);
  }
}

TEST_CASE("init is seeded and shapes are validated") {
  RewardScorer a = RewardScorer::random_init(ScorerKind::kMlp, 8, 6, 42);
  RewardScorer b = RewardScorer::random_init(ScorerKind::kMlp, 8, 6, 42);
  CHECK(a.params() == b.params());
  RewardScorer c = RewardScorer::random_init(ScorerKind::kMlp, 8, 6, 43);
  CHECK(a.params() != c.params());
  CHECK(RewardScorer::param_count(ScorerKind::kMlp, 8, 6) == 8 * 6 + 6 + 6 + 1);

  CHECK_THROWS_AS(RewardScorer(ScorerKind::kLinear, 2, 0, {1.0, 2.0}),
                  SchemaError);
  RewardScorer sc(ScorerKind::kLinear, 2, 0, {1.0, 2.0, 3.0});
  CHECK_THROWS_AS(sc.score(std::vector<double>{1.0}), SchemaError);
}
