// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Fixtures are seeded; every tolerance is pinned here.
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ordrm/batch.hpp"
#include "ordrm/data.hpp"
#include "ordrm/eval.hpp"
#include "ordrm/gradcheck.hpp"
#include "ordrm/io.hpp"
#include "ordrm/losses.hpp"
#include "ordrm/rng.hpp"
#include "ordrm/scorer.hpp"
#include "ordrm/thresholds.hpp"
#include "ordrm/train.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace ordrm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared fixtures

const std::vector<double> kTrueZeta = {-2.0, -1.2, -0.4, 0.4, 1.2, 2.0};

Thresholds true_thresholds() {
  return Thresholds(3, ThresholdMode::kSymmetric, kTrueZeta);
}

RewardScorer true_scorer(std::uint64_t seed = 5) {
  return RewardScorer::random_init(ScorerKind::kLinear, 16, 0, seed);
}

Dataset standard_dataset(int n, std::uint64_t seed) {
  GenConfig cfg{n, 16, 3, true_scorer(), true_thresholds(), 1.0, seed};
  return generate(cfg);
}

// Deterministically labeled (perfectly separable) dataset: z is the interval
// of the true score difference rather than a sample around it.
Dataset separable_dataset(int n, std::uint64_t seed) {
  Dataset ds = standard_dataset(n, seed);
  const RewardScorer truth = true_scorer();
  const Thresholds th = true_thresholds();
  for (auto& ex : ds.examples) {
    ex.z = th.predict_level(truth.score_diff(ex.a, ex.b));
    ex.z_clean = ex.z;
  }
  return ds;
}

TrainConfig nll_symmetric_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.loss = LossSpec::with_defaults(LossKind::kOrdinalNll, 3);
  cfg.mode = ThresholdMode::kSymmetric;
  cfg.num_levels = 3;
  cfg.epochs = 12;
  cfg.batch_size = 256;
  cfg.scorer_kind = ScorerKind::kLinear;
  cfg.dim = 16;
  cfg.lr_phi = 1e-2;
  cfg.lr_alpha = 2e-3;
  cfg.lambda = 1.0;
  cfg.seed = seed;
  return cfg;
}

TrainConfig simple_bt_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.loss = LossSpec::with_defaults(LossKind::kSimpleBt, 3);
  cfg.num_levels = 3;
  cfg.epochs = 12;
  cfg.batch_size = 256;
  cfg.scorer_kind = ScorerKind::kLinear;
  cfg.dim = 16;
  cfg.lr_phi = 1e-2;
  cfg.seed = seed;
  return cfg;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------------------
// 1. Gradient suite

Outcome criterion_gradients() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const auto rows = gradcheck::run_all(2024, 100);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  double worst = 0.0;
  for (const auto& row : rows) {
    worst = std::max(worst, row.max_rel_err);
    out.require(row.pass, row.name + " rel_err " + fmt(row.max_rel_err));
  }
  out.require(seconds < 10.0, "runtime " + fmt(seconds) + "s >= 10s");
  out.note("max rel_err " + fmt(worst) + ", " + fmt(seconds) + "s");
  return out;
}

// ---------------------------------------------------------------------------
// 2. Normalization

Outcome criterion_normalization() {
  Outcome out;
  rng::Stream s(77, rng::Purpose::kGeneric, 0);
  const int levels[4] = {1, 2, 3, 5};
  double worst = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    const int K = levels[s.next_below(4)];
    ThresholdParams params;
    params.mode = ThresholdMode::kAsymmetric;
    params.num_levels = K;
    params.alpha.resize(2 * K);
    params.alpha[0] = -K - 2.0 + 4.0 * s.next_unit();
    for (int j = 1; j < 2 * K; ++j) {
      params.alpha[j] = -2.0 + 3.0 * s.next_unit();
    }
    const Thresholds th = build_thresholds(params);
    const double x = 12.0 * (2.0 * s.next_unit() - 1.0);
    double total = 0.0;
    for (int z = -K; z <= K; ++z) {
      total += prob_level(x, th, z);
    }
    worst = std::max(worst, std::abs(total - 1.0));
  }
  out.require(worst <= 1e-12, "max |sum p - 1| = " + fmt(worst));
  out.note("max deviation " + fmt(worst) + " over 10^4 draws");
  return out;
}

// ---------------------------------------------------------------------------
// 3. Joint scaling of scores and thresholds, both directions

Outcome criterion_scaling() {
  Outcome out;
  const Thresholds base(2, ThresholdMode::kSymmetric, {-2.0, -1.0, 1.0, 2.0});
  // Ten examples, two strictly inside each level interval.
  std::vector<std::pair<double, int>> fixture = {
      {-3.0, -2}, {-2.5, -2}, {-1.75, -1}, {-1.25, -1}, {-0.5, 0},
      {0.5, 0},   {1.25, 1},  {1.75, 1},   {2.5, 2},    {3.0, 2}};

  auto total_loss = [&](double c, bool misclassified, bool use_at) {
    std::vector<double> zeta = base.sorted();
    for (double& t : zeta) t *= c;
    const Thresholds th(2, ThresholdMode::kSymmetric, zeta);
    double total = 0.0;
    for (std::size_t i = 0; i < fixture.size(); ++i) {
      int z = fixture[i].second;
      if (misclassified && i == 0) z = 2;  // s=-3 labeled +2
      const double s = c * fixture[i].first;
      total += use_at ? ordinal_at(s, th, z).value : ordinal_nll(s, th, z).value;
    }
    return total;
  };

  for (bool use_at : {false, true}) {
    const char* name = use_at ? "at" : "nll";
    double prev = total_loss(1.0, false, use_at);
    for (double c : {2.0, 4.0, 8.0}) {
      const double cur = total_loss(c, false, use_at);
      out.require(cur < prev, std::string(name) + " not decreasing at c=" + fmt(c));
      prev = cur;
    }
    const double at64 = total_loss(64.0, false, use_at);
    out.require(at64 < 1e-6,
                std::string(name) + " at c=64 is " + fmt(at64) + " >= 1e-6");

    const double m4 = total_loss(4.0, true, use_at);
    const double m8 = total_loss(8.0, true, use_at);
    const double m16 = total_loss(16.0, true, use_at);
    out.require(m8 > m4 && m16 > m8,
                std::string(name) + " misclassified not increasing for c>=4");
  }
  return out;
}

// ---------------------------------------------------------------------------
// 4. Threshold divergence without regularization, convergence with it

Outcome criterion_divergence_convergence() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const Dataset ds = separable_dataset(4096, 401);

  // Constant phi schedule: the divergence is the joint (s, zeta) scale-up, so
  // the scorer must keep moving for the thresholds to keep growing.
  TrainConfig cfg = nll_symmetric_config(402);
  cfg.epochs = 150;
  cfg.batch_size = 128;
  cfg.sched_phi = SchedKind::kConstant;
  cfg.lambda = 0.0;
  cfg.lr_alpha = 1e-3;
  cfg.log_interval = 1;
  const auto [state0, report0] = train(ds, cfg);

  const long long total = report0.total_steps;
  const long long mark = total / 5;
  double at_mark = 0.0, at_end = 0.0;
  for (const auto& [step, zeta] : state0.trajectory) {
    if (step <= mark) at_mark = max_abs(zeta);
    at_end = max_abs(zeta);
  }
  out.require(at_end >= 5.0 * at_mark,
              "lambda=0 growth " + fmt(at_end) + " < 5x " + fmt(at_mark));
  out.note("lambda=0 max|zeta| " + fmt(at_mark) + " -> " + fmt(at_end));

  TrainConfig reg = cfg;
  reg.lambda = 1.0;
  reg.seed = 403;
  const auto [state1, report1] = train(ds, reg);
  const long long tail = total - total / 10;
  std::vector<double> zeta_tail_start;
  for (const auto& [step, zeta] : state1.trajectory) {
    if (step <= tail) zeta_tail_start = zeta;
  }
  const auto& zeta_final = state1.trajectory.back().second;
  double sup = 0.0;
  for (std::size_t j = 0; j < zeta_final.size(); ++j) {
    sup = std::max(sup, std::abs(zeta_final[j] - zeta_tail_start[j]));
  }
  out.require(sup <= 0.01, "lambda=1 tail movement " + fmt(sup) + " > 0.01");
  out.note("lambda=1 tail sup-norm " + fmt(sup));

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  out.require(seconds < 60.0, "runtime " + fmt(seconds) + "s >= 60s");
  out.note(fmt(seconds) + "s");
  return out;
}

// ---------------------------------------------------------------------------
// 5 & 6. Threshold MLE recovery and symmetry recovery, scorer frozen at truth

struct RecoveryResult {
  std::vector<double> zeta;
  double seconds = 0.0;
};

RecoveryResult run_recovery() {
  const auto start = std::chrono::steady_clock::now();
  const Dataset ds = standard_dataset(50000, 501);
  TrainConfig cfg;
  cfg.loss = LossSpec::with_defaults(LossKind::kOrdinalNll, 3);
  cfg.mode = ThresholdMode::kAsymmetric;
  cfg.num_levels = 3;
  cfg.epochs = 40;
  cfg.batch_size = 4096;
  cfg.dim = 16;
  cfg.freeze_scorer = true;
  cfg.initial_scorer = true_scorer();
  cfg.lr_alpha = 0.01;
  cfg.lambda = 1e-4;
  cfg.seed = 502;
  const auto [state, report] = train(ds, cfg);
  RecoveryResult result;
  result.zeta = state.current_thresholds().sorted();
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

Outcome criterion_mle_recovery(const RecoveryResult& rec) {
  Outcome out;
  double worst = 0.0;
  for (int j = 0; j < 6; ++j) {
    worst = std::max(worst, std::abs(rec.zeta[j] - kTrueZeta[j]));
  }
  out.require(worst <= 0.05, "max |zeta - truth| = " + fmt(worst) + " > 0.05");
  out.require(rec.seconds < 300.0, "runtime " + fmt(rec.seconds) + "s >= 5min");
  out.note("max error " + fmt(worst) + ", " + fmt(rec.seconds) + "s");
  return out;
}

Outcome criterion_symmetry_recovery(const RecoveryResult& rec) {
  Outcome out;
  double worst = 0.0;
  for (int k = 1; k <= 3; ++k) {
    worst = std::max(worst, std::abs(rec.zeta[3 - k] + rec.zeta[2 + k]));
  }
  out.require(worst <= 0.1, "max |zeta_-k + zeta_k| = " + fmt(worst) + " > 0.1");
  out.note("max asymmetry " + fmt(worst));
  return out;
}

// ---------------------------------------------------------------------------
// 7 & 8. Joint training beats SimpleBT + post-hoc calibration; error margins
//
// Learnable linear truth at d=64 with a wide tie band: the pairwise BT stage
// discards the z=0 quarter of the data and flattens the magnitudes, which is
// exactly the information joint maximum likelihood keeps.

struct JointVsPosthoc {
  double joint_mae = 0.0;
  double posthoc_mae = 0.0;
  double joint_margin_mean = 0.0;
  double bt_margin_mean = 0.0;
};

JointVsPosthoc run_joint_vs_posthoc(std::uint64_t seed) {
  const int d = 64;
  const std::vector<double> zeta = {-2.4, -1.6, -0.8, 0.8, 1.6, 2.4};
  const RewardScorer truth = RewardScorer::random_init(ScorerKind::kLinear, d, 0, 5);
  const Thresholds th(3, ThresholdMode::kSymmetric, zeta);
  const Dataset train_ds = generate(GenConfig{20000, d, 3, truth, th, 1.0, seed});
  const Dataset test_ds =
      generate(GenConfig{2000, d, 3, truth, th, 1.0, seed + 1000});

  TrainConfig nll_cfg = nll_symmetric_config(seed);
  nll_cfg.dim = d;
  nll_cfg.epochs = 40;
  nll_cfg.lambda = 0.01;
  nll_cfg.lr_alpha = 5e-3;
  const auto [nll_state, nll_report] = train(train_ds, nll_cfg);
  const Thresholds nll_th = nll_state.current_thresholds();

  TrainConfig bt_cfg = simple_bt_config(seed);
  bt_cfg.dim = d;
  bt_cfg.epochs = 40;
  const auto [bt_state, bt_report] = train(train_ds, bt_cfg);

  std::vector<int> idx(train_ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> diffs(train_ds.size());
  batch::parallel_score_diffs(train_ds, idx, bt_state.scorer, diffs);
  std::vector<int> labels;
  labels.reserve(train_ds.size());
  for (const auto& ex : train_ds.examples) labels.push_back(ex.z);
  const CalibrationResult calib = posthoc_calibrate(diffs, labels, 3);

  JointVsPosthoc result;
  result.joint_mae =
      *ordinal_metrics(nll_state.scorer, nll_th, test_ds).mae;
  result.posthoc_mae =
      *ordinal_metrics(bt_state.scorer, calib.thresholds, test_ds).mae;

  MarginStats nll_margins, bt_margins;
  error_margins(nll_state.scorer, test_ds, &nll_margins);
  error_margins(bt_state.scorer, test_ds, &bt_margins);
  result.joint_margin_mean = nll_margins.mean.value_or(0.0);
  result.bt_margin_mean = bt_margins.mean.value_or(0.0);
  return result;
}

Outcome criterion_joint_beats_posthoc(const std::vector<JointVsPosthoc>& runs) {
  Outcome out;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    out.require(runs[i].joint_mae < runs[i].posthoc_mae,
                "seed " + std::to_string(i) + ": joint MAE " +
                    fmt(runs[i].joint_mae) + " !< posthoc " +
                    fmt(runs[i].posthoc_mae));
    out.note(fmt(runs[i].joint_mae) + " vs " + fmt(runs[i].posthoc_mae));
  }
  return out;
}

Outcome criterion_error_margins(const std::vector<JointVsPosthoc>& runs) {
  Outcome out;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    out.require(runs[i].joint_margin_mean <= runs[i].bt_margin_mean,
                "seed " + std::to_string(i) + ": nll margin " +
                    fmt(runs[i].joint_margin_mean) + " > bt " +
                    fmt(runs[i].bt_margin_mean));
    out.note(fmt(runs[i].joint_margin_mean) + " vs " +
             fmt(runs[i].bt_margin_mean));
  }
  return out;
}

// ---------------------------------------------------------------------------
// 9. Noise robustness directions

Outcome criterion_noise_robustness() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const Dataset clean = standard_dataset(20000, 901);
  const Dataset test_ds = standard_dataset(2000, 902);

  const Dataset shift100 = inject_shift_noise(clean, 1.0, 903);
  const Dataset rand100 = inject_random_noise(clean, 1.0, 904);
  const Dataset rand25 = inject_random_noise(clean, 0.25, 905);

  auto fit = [&](const Dataset& ds) {
    return train(ds, nll_symmetric_config(906)).first;
  };
  const TrainState clean_state = fit(clean);
  const TrainState shift_state = fit(shift100);
  const TrainState rand_state = fit(rand100);
  const TrainState rand25_state = fit(rand25);

  const double shift_acc1 =
      ordinal_metrics(shift_state.scorer, shift_state.current_thresholds(),
                      test_ds)
          .acc_within[1];
  const double rand_acc1 =
      ordinal_metrics(rand_state.scorer, rand_state.current_thresholds(),
                      test_ds)
          .acc_within[1];
  out.require(shift_acc1 >= rand_acc1 + 0.1,
              "shift100 acc@1 " + fmt(shift_acc1) + " < rand100 " +
                  fmt(rand_acc1) + " + 0.1");
  out.note("acc@1 shift100 " + fmt(shift_acc1) + ", rand100 " + fmt(rand_acc1));

  const double clean_bin = binary_accuracy(clean_state.scorer, test_ds);
  const double rand25_bin = binary_accuracy(rand25_state.scorer, test_ds);
  out.require(std::abs(clean_bin - rand25_bin) <= 0.05,
              "binary accuracy gap " + fmt(std::abs(clean_bin - rand25_bin)) +
                  " > 0.05");
  out.note("binary clean " + fmt(clean_bin) + ", rand25 " + fmt(rand25_bin));

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  out.require(seconds < 600.0, "runtime " + fmt(seconds) + "s >= 10min");
  out.note(fmt(seconds) + "s");
  return out;
}

// ---------------------------------------------------------------------------
// 10. Projection against an exhaustive KKT oracle

// Exact projection by enumerating active sets of the chain constraints
// x_{j+1} - x_j >= eps (unique KKT point of a strictly convex QP).
std::vector<double> kkt_projection_oracle(const std::vector<double>& raw,
                                          double eps) {
  const int m = static_cast<int>(raw.size());
  const int constraints = m - 1;
  for (int mask = 0; mask < (1 << constraints); ++mask) {
    std::vector<double> x(m);
    // Blocks of consecutive active constraints share a mean-centred ladder.
    int block_start = 0;
    for (int j = 0; j <= constraints; ++j) {
      const bool active = j < constraints && (mask >> j & 1);
      if (!active) {
        double mean = 0.0;
        for (int i = block_start; i <= j; ++i) {
          mean += raw[i] - eps * (i - block_start);
        }
        mean /= (j - block_start + 1);
        for (int i = block_start; i <= j; ++i) {
          x[i] = mean + eps * (i - block_start);
        }
        block_start = j + 1;
      }
    }
    // Primal feasibility on inactive constraints.
    bool ok = true;
    for (int j = 0; j < constraints && ok; ++j) {
      if (!(mask >> j & 1)) {
        ok = x[j + 1] - x[j] >= eps - 1e-9;
      }
    }
    // Dual feasibility: lambda_t = -2 * prefix-sum of (x - raw) >= 0 on
    // active constraints (prefix sums reset at block boundaries).
    double prefix = 0.0;
    for (int j = 0; j < constraints && ok; ++j) {
      prefix += x[j] - raw[j];
      if (mask >> j & 1) {
        ok = -2.0 * prefix >= -1e-9;
      } else {
        prefix = 0.0;
      }
    }
    if (ok) {
      return x;
    }
  }
  return raw;  // unreachable for valid inputs
}

Outcome criterion_projection() {
  Outcome out;
  rng::Stream s(1001, rng::Purpose::kGeneric, 0);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 2 + static_cast<int>(s.next_below(5));
    std::vector<double> raw(m);
    for (double& x : raw) {
      x = 3.0 * (2.0 * s.next_unit() - 1.0);
    }
    const double eps = 0.02 + 0.3 * s.next_unit();
    const auto got = project_spaced(raw, eps);
    const auto want = kkt_projection_oracle(raw, eps);
    for (int j = 0; j < m; ++j) {
      worst = std::max(worst, std::abs(got[j] - want[j]));
    }
    const auto again = project_spaced(got, eps);
    out.require(again == got, "projection not exactly idempotent");
  }
  out.require(worst <= 1e-6, "max |pava - kkt| = " + fmt(worst) + " > 1e-6");
  out.note("max deviation from KKT oracle " + fmt(worst));
  return out;
}

// ---------------------------------------------------------------------------
// 11. CLI determinism

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ordrm_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(ORDRM_CLI_PATH) + " " + args + " >" +
                          log.string() + " 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_determinism() {
  Outcome out;
  TempDir tmp;
  const fs::path log = tmp.path / "log.txt";

  const json gen_cfg = {
      {"n", 512},
      {"d", 8},
      {"K", 3},
      {"feature_scale", 1.0},
      {"seed", 42},
      {"true_scorer", {{"kind", "linear"}, {"init_seed", 2}}},
      {"true_thresholds",
       {{"K", 3}, {"mode", "symmetric"}, {"zeta", kTrueZeta}}}};
  std::ofstream(tmp.path / "gen.json") << gen_cfg.dump();
  const json train_cfg = {{"loss", "ordinal_nll"}, {"K", 3},
                          {"epochs", 2},           {"batch_size", 64},
                          {"d", 8},                {"lambda", 1.0},
                          {"seed", 7},             {"scorer", "linear"}};
  std::ofstream(tmp.path / "train.json") << train_cfg.dump();

  const std::string gen_base =
      "gen --config " + (tmp.path / "gen.json").string() + " --out ";
  out.require(run_cli(gen_base + (tmp.path / "a.jsonl").string(), log) == 0,
              "gen run 1 failed");
  out.require(run_cli(gen_base + (tmp.path / "b.jsonl").string(), log) == 0,
              "gen run 2 failed");
  out.require(slurp(tmp.path / "a.jsonl") == slurp(tmp.path / "b.jsonl"),
              "gen outputs differ");
  out.require(
      slurp(tmp.path / "a.meta.json") == slurp(tmp.path / "b.meta.json"),
      "gen sidecars differ");

  const std::string train_base =
      "train --config " + (tmp.path / "train.json").string() + " --data " +
      (tmp.path / "a.jsonl").string() + " --out ";
  out.require(run_cli(train_base + (tmp.path / "r1").string(), log) == 0,
              "train run 1 failed");
  out.require(run_cli(train_base + (tmp.path / "r2").string(), log) == 0,
              "train run 2 failed");
  for (const char* name :
       {"model.json", "thresholds.json", "trajectory.csv", "loss.csv"}) {
    out.require(slurp(tmp.path / "r1" / name) == slurp(tmp.path / "r2" / name),
                std::string(name) + " differs between reruns");
  }
  json m1 = io::read_json_file(tmp.path / "r1" / "manifest.json");
  json m2 = io::read_json_file(tmp.path / "r2" / "manifest.json");
  m1.erase("timing");
  m2.erase("timing");
  m1.erase("command");
  m2.erase("command");
  out.require(m1 == m2, "manifests differ beyond timing");

  const std::string eval_base =
      "eval --model " + (tmp.path / "r1" / "model.json").string() +
      " --thresholds " + (tmp.path / "r1" / "thresholds.json").string() +
      " --ordinal --data " + (tmp.path / "a.jsonl").string() + " --out ";
  out.require(run_cli(eval_base + (tmp.path / "e1.json").string(), log) == 0,
              "eval run 1 failed");
  out.require(run_cli(eval_base + (tmp.path / "e2.json").string(), log) == 0,
              "eval run 2 failed");
  out.require(slurp(tmp.path / "e1.json") == slurp(tmp.path / "e2.json"),
              "eval reports differ");
  return out;
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const std::string& name, const Outcome& out) {
    std::printf("[%s] criterion %2d: %s%s%s\n", out.pass ? "PASS" : "FAIL", id,
                name.c_str(), out.detail.empty() ? "" : " -- ",
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  };

  report(1, "gradient suite", criterion_gradients());
  report(2, "probability normalization", criterion_normalization());
  report(3, "scale behavior, both directions", criterion_scaling());
  report(4, "threshold divergence/convergence", criterion_divergence_convergence());

  const RecoveryResult rec = run_recovery();
  report(5, "threshold MLE recovery", criterion_mle_recovery(rec));
  report(6, "symmetry recovery in asymmetric mode", criterion_symmetry_recovery(rec));

  std::vector<JointVsPosthoc> runs;
  for (std::uint64_t seed : {201ull, 202ull, 203ull}) {
    runs.push_back(run_joint_vs_posthoc(seed));
  }
  report(7, "joint training beats post-hoc calibration",
         criterion_joint_beats_posthoc(runs));
  report(8, "error-margin direction", criterion_error_margins(runs));

  report(9, "noise robustness directions", criterion_noise_robustness());
  report(10, "projection vs KKT oracle", criterion_projection());
  report(11, "CLI determinism", criterion_determinism());

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all 11 criteria passed\n");
  return 0;
}
