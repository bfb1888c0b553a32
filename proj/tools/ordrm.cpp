// SPDX-License-Identifier: Apache-2.0
//
// ordrm: synthetic ordinal preference data, reward-model training with
// learned-threshold losses, evaluation, post-hoc calibration, and the
// finite-difference gradient suite. All numeric settings live in JSON config
// files; flags carry only paths, seeds, and overrides.
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ordrm/batch.hpp"
#include "ordrm/common.hpp"
#include "ordrm/data.hpp"
#include "ordrm/eval.hpp"
#include "ordrm/gradcheck.hpp"
#include "ordrm/io.hpp"
#include "ordrm/losses.hpp"
#include "ordrm/rng.hpp"
#include "ordrm/train.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace ordrm;

namespace {

fs::path sidecar_path(const fs::path& dataset_path) {
  fs::path p = dataset_path;
  p.replace_extension(".meta.json");
  return p;
}

std::optional<json> try_read_sidecar(const fs::path& dataset_path) {
  const fs::path meta = sidecar_path(dataset_path);
  if (!fs::exists(meta)) {
    return std::nullopt;
  }
  return io::read_json_file(meta);
}

// K for a dataset: explicit flag first, then the sidecar, then `fallback`.
int resolve_levels(const fs::path& data_path, int flag_levels, int fallback) {
  const std::optional<json> meta = try_read_sidecar(data_path);
  if (meta.has_value() && meta->contains("K")) {
    const int meta_k = (*meta)["K"].get<int>();
    if (flag_levels > 0 && flag_levels != meta_k) {
      throw SchemaError("K=" + std::to_string(flag_levels) +
                        " does not match the dataset sidecar K=" +
                        std::to_string(meta_k));
    }
    if (fallback > 0 && fallback != meta_k) {
      throw SchemaError("config K=" + std::to_string(fallback) +
                        " does not match the dataset sidecar K=" +
                        std::to_string(meta_k));
    }
    return meta_k;
  }
  if (flag_levels > 0) return flag_levels;
  if (fallback > 0) return fallback;
  throw SchemaError("cannot determine K for " + data_path.string() +
                    ": no sidecar found, pass --K");
}

int cmd_gen(const std::string& config_path, const std::string& out_path,
            std::optional<std::uint64_t> seed_override) {
  json config = io::read_json_file(config_path);
  if (seed_override.has_value()) {
    config["seed"] = *seed_override;
  }
  const GenConfig cfg = io::gen_config_from_json(config);
  const Dataset ds = generate(cfg);
  write_jsonl(ds, out_path);

  json meta;
  meta["command"] = "gen";
  meta["tool_version"] = kVersion;
  meta["n"] = cfg.n;
  meta["d"] = cfg.d;
  meta["K"] = cfg.num_levels;
  meta["seed"] = cfg.seed;
  meta["rng"] = rng::kAlgorithmId;
  meta["noise"] = nullptr;
  meta["true_thresholds"] = cfg.true_thresholds.sorted();
  meta["true_scorer_digest"] =
      io::fnv1a_hex(io::scorer_to_json(cfg.true_scorer).dump());
  meta["config_digest"] = io::fnv1a_hex(config.dump());
  io::write_json_atomic(sidecar_path(out_path), meta);
  return 0;
}

int cmd_noise(const std::string& in_path, const std::string& kind, double rate,
              std::uint64_t seed, const std::string& out_path, int flag_levels) {
  if (kind != "shift" && kind != "random") {
    throw UsageError("--kind must be shift or random");
  }
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw UsageError("--rate must lie in [0, 1]");
  }
  const int K = resolve_levels(in_path, flag_levels, 0);
  const Dataset ds = read_jsonl(in_path, K);
  NoiseCounts counts;
  const Dataset noisy = kind == "shift"
                            ? inject_shift_noise(ds, rate, seed, &counts)
                            : inject_random_noise(ds, rate, seed, &counts);
  write_jsonl(noisy, out_path);

  json meta;
  const std::optional<json> in_meta = try_read_sidecar(in_path);
  if (in_meta.has_value()) {
    meta = *in_meta;
  }
  meta["command"] = "noise";
  meta["tool_version"] = kVersion;
  meta["n"] = static_cast<long long>(noisy.size());
  meta["d"] = noisy.dim;
  meta["K"] = K;
  meta["rng"] = rng::kAlgorithmId;
  meta["noise"] = {{"kind", kind},
                   {"rate", rate},
                   {"seed", seed},
                   {"selected", counts.selected},
                   {"changed", counts.changed}};
  io::write_json_atomic(sidecar_path(out_path), meta);
  return 0;
}

void write_train_artifacts(const fs::path& out_dir, const TrainState& state,
                           const TrainReport& report, const json& config,
                           const std::string& data_path,
                           const std::string& argv_echo, double seconds) {
  io::write_json_atomic(out_dir / "model.json", io::scorer_to_json(state.scorer));

  const bool ordinal = state.has_thresholds;
  if (ordinal) {
    io::write_json_atomic(out_dir / "thresholds.json",
                          io::thresholds_to_json(state.current_thresholds()));
    const int K = state.current_thresholds().num_levels();
    std::ostringstream csv;
    csv << "step";
    for (int z = -K; z <= K; ++z) {
      if (z == 0) continue;
      csv << ",zeta_" << z;
    }
    csv << "\n";
    for (const auto& [step, zeta] : state.trajectory) {
      csv << step;
      for (double t : zeta) {
        csv << "," << io::format_double(t);
      }
      csv << "\n";
    }
    io::write_text_atomic(out_dir / "trajectory.csv", csv.str());
  }

  std::ostringstream loss_csv;
  loss_csv << "step,loss\n";
  for (std::size_t i = 0; i < state.loss_history.size(); ++i) {
    loss_csv << i << "," << io::format_double(state.loss_history[i]) << "\n";
  }
  io::write_text_atomic(out_dir / "loss.csv", loss_csv.str());

  json manifest;
  manifest["command"] = argv_echo;
  manifest["tool_version"] = kVersion;
  manifest["config"] = config;
  manifest["config_digest"] = io::fnv1a_hex(config.dump());
  manifest["data_digest"] = io::file_digest(data_path);
  manifest["seed"] = config.value("seed", 0);
  manifest["total_steps"] = report.total_steps;
  manifest["skipped_examples"] = report.skipped_examples;
  manifest["initial_objective"] = report.initial_objective;
  manifest["final_objective"] = report.final_objective;
  if (report.best_step.has_value()) {
    manifest["best_step"] = *report.best_step;
    manifest["best_val_accuracy"] = *report.best_val_accuracy;
  }
  json artifacts = json::array({"model.json", "loss.csv"});
  if (ordinal) {
    artifacts.push_back("thresholds.json");
    artifacts.push_back("trajectory.csv");
  }
  manifest["artifacts"] = artifacts;
  manifest["timing"] = {{"seconds", seconds}};
  io::write_json_atomic(out_dir / "manifest.json", manifest);
}

int cmd_train(const std::string& config_path, const std::string& data_path,
              const std::string& out_dir, std::optional<std::uint64_t> seed_flag,
              const std::vector<std::uint64_t>& seed_list,
              const std::string& val_path, const std::string& argv_echo) {
  json config = io::read_json_file(config_path);
  if (seed_flag.has_value()) {
    config["seed"] = *seed_flag;
  }
  const TrainConfig probe = io::train_config_from_json(config);
  resolve_levels(data_path, 0, probe.num_levels);
  const Dataset ds = read_jsonl(data_path, probe.num_levels);

  std::optional<Dataset> val;
  if (!val_path.empty()) {
    val = read_jsonl(val_path, probe.num_levels);
  }

  auto run_one = [&](const json& cfg_json, const fs::path& dir) {
    const auto start = std::chrono::steady_clock::now();
    const TrainConfig cfg = io::train_config_from_json(cfg_json);
    const auto [state, report] = train(ds, cfg, val ? &*val : nullptr);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    write_train_artifacts(dir, state, report, cfg_json, data_path, argv_echo,
                          seconds);
  };

  if (seed_list.empty()) {
    run_one(config, out_dir);
  } else {
    for (std::uint64_t s : seed_list) {
      json cfg_json = config;
      cfg_json["seed"] = s;
      run_one(cfg_json, fs::path(out_dir) / ("seed-" + std::to_string(s)));
    }
  }
  return 0;
}

json metrics_to_json(const MetricsReport& report) {
  json j;
  j["n"] = report.n;
  if (report.binary_accuracy.has_value()) {
    j["binary_accuracy"] = *report.binary_accuracy;
  }
  j["correct"] = report.correct;
  j["errors"] = report.errors;
  j["ties"] = report.ties;
  j["zero_excluded"] = report.zero_excluded;
  j["degenerate"] = report.degenerate;
  if (report.has_ordinal) {
    j["mae"] = *report.mae;
    j["acc_within"] = {{"0", report.acc_within[0]},
                       {"1", report.acc_within[1]},
                       {"2", report.acc_within[2]}};
    j["confusion"] = report.confusion;
  }
  json margins;
  margins["count"] = report.margins.count;
  margins["mean"] =
      report.margins.mean.has_value() ? json(*report.margins.mean) : json(nullptr);
  margins["max"] =
      report.margins.max.has_value() ? json(*report.margins.max) : json(nullptr);
  margins["bin_width"] = report.margins.bin_width;
  margins["histogram"] = report.margins.histogram;
  j["error_margins"] = margins;
  return j;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& thresholds_path, bool ordinal,
             const std::string& out_path, int flag_levels, bool csv) {
  if (ordinal && thresholds_path.empty()) {
    throw UsageError("--ordinal requires --thresholds");
  }
  const RewardScorer scorer =
      io::scorer_from_json(io::read_json_file(model_path));
  std::optional<Thresholds> th;
  if (!thresholds_path.empty()) {
    th = io::thresholds_from_json(io::read_json_file(thresholds_path));
  }
  const int K = th.has_value()
                    ? resolve_levels(data_path, flag_levels, th->num_levels())
                    : resolve_levels(data_path, flag_levels, 0);
  if (th.has_value() && th->num_levels() != K) {
    throw SchemaError("thresholds K does not match the dataset");
  }
  const Dataset ds = read_jsonl(data_path, K);
  const MetricsReport report = evaluate(scorer, th ? &*th : nullptr, ds);
  json j = metrics_to_json(report);
  j["model_digest"] = io::file_digest(model_path);
  j["data_digest"] = io::file_digest(data_path);

  std::ostringstream table;
  table << "n " << report.n << "\n";
  if (report.binary_accuracy.has_value()) {
    table << "binary_accuracy " << *report.binary_accuracy
          << (report.degenerate ? " (degenerate)" : "") << "\n";
  }
  if (report.has_ordinal) {
    table << "mae " << *report.mae << "\n";
    for (int k = 0; k < 3; ++k) {
      table << "acc@" << k << " " << report.acc_within[k] << "\n";
    }
  }
  table << "error_margin_count " << report.margins.count << "\n";
  if (report.margins.mean.has_value()) {
    table << "error_margin_mean " << *report.margins.mean << "\n";
  }
  std::cout << table.str();

  io::write_json_atomic(out_path, j);

  if (csv) {
    fs::path base = out_path;
    base.replace_extension();
    if (report.has_ordinal) {
      const int levels = (static_cast<int>(report.confusion.size()) - 1) / 2;
      std::ostringstream confusion;
      confusion << "true_level";
      for (int z = -levels; z <= levels; ++z) {
        confusion << ",pred_" << z;
      }
      confusion << "\n";
      for (int t = -levels; t <= levels; ++t) {
        confusion << t;
        for (int p = -levels; p <= levels; ++p) {
          confusion << "," << report.confusion[t + levels][p + levels];
        }
        confusion << "\n";
      }
      io::write_text_atomic(base.string() + ".confusion.csv", confusion.str());
    }
    std::ostringstream hist;
    hist << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < report.margins.histogram.size(); ++b) {
      hist << io::format_double(b * report.margins.bin_width) << ","
           << io::format_double((b + 1) * report.margins.bin_width) << ","
           << report.margins.histogram[b] << "\n";
    }
    io::write_text_atomic(base.string() + ".margins.csv", hist.str());
  }
  return 0;
}

int cmd_calibrate(const std::string& model_path, const std::string& data_path,
                  const std::string& out_path, int flag_levels) {
  const RewardScorer scorer =
      io::scorer_from_json(io::read_json_file(model_path));
  const int K = resolve_levels(data_path, flag_levels, 0);
  const Dataset ds = read_jsonl(data_path, K);
  if (ds.examples.empty()) {
    throw SchemaError("calibrate: dataset is empty");
  }

  std::vector<int> idx(ds.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<double> diffs(ds.size());
  batch::parallel_score_diffs(ds, idx, scorer, diffs);
  std::vector<int> labels;
  labels.reserve(ds.size());
  for (const auto& ex : ds.examples) labels.push_back(ex.z);

  const CalibrationResult result = posthoc_calibrate(diffs, labels, K);
  io::write_json_atomic(out_path, io::thresholds_to_json(result.thresholds));

  json manifest;
  manifest["command"] = "calibrate";
  manifest["tool_version"] = kVersion;
  manifest["frozen_scorer_digest"] = io::file_digest(model_path);
  manifest["data_digest"] = io::file_digest(data_path);
  manifest["K"] = K;
  manifest["low_information"] = result.low_information;
  manifest["objective_initial"] = result.objective_initial;
  manifest["objective_final"] = result.objective_final;
  fs::path manifest_path = out_path;
  manifest_path += ".manifest.json";
  io::write_json_atomic(manifest_path, manifest);
  return 0;
}

int cmd_gradcheck(std::uint64_t seed, int draws) {
  const auto rows = gradcheck::run_all(seed, draws);
  bool all_pass = true;
  std::printf("%-32s %6s %14s %11s  %s\n", "check", "draws", "max_rel_err",
              "worst_draw", "status");
  for (const auto& row : rows) {
    std::printf("%-32s %6d %14.3e %11d  %s\n", row.name.c_str(), row.draws,
                row.max_rel_err, row.worst_draw, row.pass ? "PASS" : "FAIL");
    all_pass = all_pass && row.pass;
  }
  if (!all_pass) {
    throw NumericError("gradient checks failed");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ordinal reward modeling toolkit"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_path, in_path, model_path;
  std::string thresholds_path, val_path, kind, resume_from, seeds_csv;
  double rate = 0.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int draws = 100;
  int flag_levels = 0;
  bool ordinal = false;
  bool csv = false;

  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  gen->add_option("--config", config_path, "GenConfig JSON")->required();
  gen->add_option("--out", out_path, "output JSONL path")->required();
  gen->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
    seed_given = true;
  });

  auto* noise = app.add_subcommand("noise", "inject label noise");
  noise->add_option("--in", in_path, "input JSONL")->required();
  noise->add_option("--kind", kind, "shift|random")->required();
  noise->add_option("--rate", rate, "corruption rate in [0,1]")->required();
  noise->add_option("--seed", seed, "noise seed")->required();
  noise->add_option("--out", out_path, "output JSONL")->required();
  noise->add_option("--K", flag_levels, "levels (when no sidecar)");

  auto* tr = app.add_subcommand("train", "train a reward model");
  tr->add_option("--config", config_path, "TrainConfig JSON")->required();
  tr->add_option("--data", data_path, "training JSONL")->required();
  tr->add_option("--out", out_path, "output directory")->required();
  tr->add_option("--val", val_path, "validation JSONL (checkpoint selection)");
  tr->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
    seed_given = true;
  });
  tr->add_option("--seeds", seeds_csv, "comma-separated seed list, one run each");
  tr->add_option("--resume-from", resume_from, "not supported");

  auto* ev = app.add_subcommand("eval", "evaluate a model on a dataset");
  ev->add_option("--model", model_path, "model JSON")->required();
  ev->add_option("--data", data_path, "dataset JSONL")->required();
  ev->add_option("--thresholds", thresholds_path, "thresholds JSON");
  ev->add_flag("--ordinal", ordinal, "require ordinal metrics");
  ev->add_option("--out", out_path, "report JSON path")->required();
  ev->add_option("--K", flag_levels, "levels (when no sidecar)");
  ev->add_flag("--csv", csv, "also export confusion and margin-histogram CSVs");

  auto* cal = app.add_subcommand("calibrate", "fit thresholds to a frozen model");
  cal->add_option("--model", model_path, "model JSON")->required();
  cal->add_option("--data", data_path, "dataset JSONL")->required();
  cal->add_option("--out", out_path, "thresholds JSON path")->required();
  cal->add_option("--K", flag_levels, "levels (when no sidecar)");

  auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient suite");
  gc->add_option("--seed", seed, "suite seed");
  gc->add_option("--draws", draws, "random draws per check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string argv_echo;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) argv_echo += ' ';
    argv_echo += argv[i];
  }

  try {
    if (gen->parsed()) {
      return cmd_gen(config_path, out_path,
                     seed_given ? std::optional<std::uint64_t>(seed)
                                : std::nullopt);
    }
    if (noise->parsed()) {
      return cmd_noise(in_path, kind, rate, seed, out_path, flag_levels);
    }
    if (tr->parsed()) {
      if (!resume_from.empty()) {
        throw UsageError("--resume-from is not supported; start a fresh run");
      }
      std::vector<std::uint64_t> seed_list;
      if (!seeds_csv.empty()) {
        std::stringstream ss(seeds_csv);
        std::string item;
        while (std::getline(ss, item, ',')) {
          seed_list.push_back(std::stoull(item));
        }
      }
      return cmd_train(config_path, data_path, out_path,
                       seed_given ? std::optional<std::uint64_t>(seed)
                                  : std::nullopt,
                       seed_list, val_path, argv_echo);
    }
    if (ev->parsed()) {
      return cmd_eval(model_path, data_path, thresholds_path, ordinal, out_path,
                      flag_levels, csv);
    }
    if (cal->parsed()) {
      return cmd_calibrate(model_path, data_path, out_path, flag_levels);
    }
    if (gc->parsed()) {
      return cmd_gradcheck(seed, draws);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
