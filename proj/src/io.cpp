// SPDX-License-Identifier: Apache-2.0
#include "ordrm/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ordrm/common.hpp"

namespace ordrm::io {

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const char* what) {
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key())) {
      throw SchemaError(std::string(what) + ": unknown key \"" + item.key() +
                        "\"");
    }
  }
}

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    throw SchemaError(std::string("config: \"") + key + "\" must be a number");
  }
  return j[key].get<double>();
}

long long get_int(const json& j, const char* key, long long fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) {
    throw SchemaError(std::string("config: \"") + key + "\" must be an integer");
  }
  return j[key].get<long long>();
}

std::string get_string(const json& j, const char* key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) {
    throw SchemaError(std::string("config: \"") + key + "\" must be a string");
  }
  return j[key].get<std::string>();
}

bool get_bool(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) {
    throw SchemaError(std::string("config: \"") + key + "\" must be a boolean");
  }
  return j[key].get<bool>();
}

std::vector<double> get_double_array(const json& j) {
  if (!j.is_array()) {
    throw SchemaError("config: expected an array of numbers");
  }
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw SchemaError("config: expected an array of numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

json thresholds_to_json(const Thresholds& th) {
  json j;
  j["K"] = th.num_levels();
  j["mode"] =
      th.mode() == ThresholdMode::kSymmetric ? "symmetric" : "asymmetric";
  j["zeta"] = th.sorted();
  return j;
}

Thresholds thresholds_from_json(const json& j) {
  if (!j.is_object() || !j.contains("K") || !j.contains("mode") ||
      !j.contains("zeta")) {
    throw SchemaError("thresholds json: expected {K, mode, zeta}");
  }
  const int K = static_cast<int>(get_int(j, "K", 0));
  const std::string mode_name = get_string(j, "mode", "");
  ThresholdMode mode;
  if (mode_name == "symmetric") {
    mode = ThresholdMode::kSymmetric;
  } else if (mode_name == "asymmetric") {
    mode = ThresholdMode::kAsymmetric;
  } else {
    throw SchemaError("thresholds json: mode must be symmetric|asymmetric");
  }
  return Thresholds(K, mode, get_double_array(j["zeta"]));
}

json scorer_to_json(const RewardScorer& sc) {
  json j;
  j["kind"] = sc.kind() == ScorerKind::kLinear ? "linear" : "mlp";
  j["d"] = sc.dim();
  j["h"] = sc.hidden();
  j["params"] = sc.params();
  return j;
}

RewardScorer scorer_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("d") ||
      !j.contains("params")) {
    throw SchemaError("scorer json: expected {kind, d, h, params}");
  }
  const std::string kind_name = get_string(j, "kind", "");
  ScorerKind kind;
  if (kind_name == "linear") {
    kind = ScorerKind::kLinear;
  } else if (kind_name == "mlp") {
    kind = ScorerKind::kMlp;
  } else {
    throw SchemaError("scorer json: kind must be linear|mlp");
  }
  return RewardScorer(kind, static_cast<int>(get_int(j, "d", 0)),
                      static_cast<int>(get_int(j, "h", 0)),
                      get_double_array(j["params"]));
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "simple_bt") return LossKind::kSimpleBt;
  if (name == "margin_bt") return LossKind::kMarginBt;
  if (name == "scaled_bt") return LossKind::kScaledBt;
  if (name == "soft_label") return LossKind::kSoftLabel;
  if (name == "ordinal_nll") return LossKind::kOrdinalNll;
  if (name == "ordinal_at") return LossKind::kOrdinalAt;
  if (name == "ordinal_it") return LossKind::kOrdinalIt;
  throw SchemaError("config: unknown loss \"" + name + "\"");
}

std::string loss_kind_to_string(LossKind kind) {
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

TrainConfig train_config_from_json(const json& j) {
  if (!j.is_object()) {
    throw SchemaError("train config: expected a JSON object");
  }
  require_keys(
      j,
      {"loss", "mode", "K", "epochs", "batch_size", "lr_phi", "lr_alpha",
       "sched_phi", "warmup_frac", "lambda", "optimizer", "beta1", "beta2",
       "adam_eps", "async_interval", "threshold_opt", "proj_eps", "seed",
       "init_alpha", "scorer", "d", "h", "freeze_scorer", "initial_scorer",
       "margin_table", "weight_table", "prob_table", "log_interval",
       "parallel"},
      "train config");
  if (!j.contains("loss")) {
    throw SchemaError("train config: missing \"loss\"");
  }

  TrainConfig cfg;
  cfg.num_levels = static_cast<int>(get_int(j, "K", 3));
  const LossKind kind = loss_kind_from_string(get_string(j, "loss", ""));
  cfg.loss = LossSpec::with_defaults(kind, cfg.num_levels);
  if (j.contains("margin_table")) {
    cfg.loss.margin_table = get_double_array(j["margin_table"]);
  }
  if (j.contains("weight_table")) {
    cfg.loss.weight_table = get_double_array(j["weight_table"]);
  }
  if (j.contains("prob_table")) {
    cfg.loss.prob_table = get_double_array(j["prob_table"]);
  }

  const std::string mode_name = get_string(j, "mode", "symmetric");
  if (mode_name == "symmetric") {
    cfg.mode = ThresholdMode::kSymmetric;
  } else if (mode_name == "asymmetric") {
    cfg.mode = ThresholdMode::kAsymmetric;
  } else {
    throw SchemaError("train config: mode must be symmetric|asymmetric");
  }

  cfg.epochs = static_cast<int>(get_int(j, "epochs", 8));
  cfg.batch_size = static_cast<int>(get_int(j, "batch_size", 64));

  const std::string opt_name = get_string(j, "optimizer", "adam");
  if (opt_name == "adam") {
    cfg.optimizer = OptKind::kAdam;
  } else if (opt_name == "sgd") {
    cfg.optimizer = OptKind::kSgd;
  } else {
    throw SchemaError("train config: optimizer must be adam|sgd");
  }
  cfg.lr_phi = get_number(j, "lr_phi",
                          cfg.optimizer == OptKind::kAdam ? 1e-3 : 1e-2);
  cfg.lr_alpha = get_number(j, "lr_alpha", 1e-3);
  cfg.beta1 = get_number(j, "beta1", 0.9);
  cfg.beta2 = get_number(j, "beta2", 0.999);
  cfg.adam_eps = get_number(j, "adam_eps", 1e-8);

  const std::string sched_name = get_string(j, "sched_phi", "cosine_warmup");
  if (sched_name == "cosine_warmup") {
    cfg.sched_phi = SchedKind::kCosineWarmup;
  } else if (sched_name == "constant") {
    cfg.sched_phi = SchedKind::kConstant;
  } else {
    throw SchemaError("train config: sched_phi must be cosine_warmup|constant");
  }
  cfg.warmup_frac = get_number(j, "warmup_frac", 0.1);
  cfg.lambda = get_number(j, "lambda", 1.0);
  cfg.async_interval = static_cast<int>(get_int(j, "async_interval", 1));

  const std::string to_name = get_string(j, "threshold_opt", "reparam");
  if (to_name == "reparam") {
    cfg.threshold_opt = ThresholdOpt::kReparam;
  } else if (to_name == "projected_gd") {
    cfg.threshold_opt = ThresholdOpt::kProjectedGd;
  } else {
    throw SchemaError("train config: threshold_opt must be reparam|projected_gd");
  }
  cfg.proj_eps = get_number(j, "proj_eps", 1e-3);
  cfg.seed = static_cast<std::uint64_t>(get_int(j, "seed", 0));

  if (j.contains("init_alpha") && !j["init_alpha"].is_null()) {
    if (j["init_alpha"].is_string()) {
      if (j["init_alpha"].get<std::string>() != "default") {
        throw SchemaError("train config: init_alpha must be \"default\" or an array");
      }
    } else {
      cfg.init_alpha = get_double_array(j["init_alpha"]);
    }
  }

  const std::string scorer_name = get_string(j, "scorer", "linear");
  if (scorer_name == "linear") {
    cfg.scorer_kind = ScorerKind::kLinear;
  } else if (scorer_name == "mlp") {
    cfg.scorer_kind = ScorerKind::kMlp;
  } else {
    throw SchemaError("train config: scorer must be linear|mlp");
  }
  cfg.dim = static_cast<int>(get_int(j, "d", 16));
  cfg.hidden = static_cast<int>(get_int(j, "h", 32));
  cfg.freeze_scorer = get_bool(j, "freeze_scorer", false);
  if (j.contains("initial_scorer")) {
    cfg.initial_scorer = scorer_from_json(j["initial_scorer"]);
  }
  cfg.log_interval = static_cast<int>(get_int(j, "log_interval", 0));
  cfg.parallel = get_bool(j, "parallel", true);

  cfg.validate();
  return cfg;
}

GenConfig gen_config_from_json(const json& j) {
  if (!j.is_object()) {
    throw SchemaError("gen config: expected a JSON object");
  }
  require_keys(j,
               {"n", "d", "K", "feature_scale", "seed", "true_scorer",
                "true_thresholds"},
               "gen config");
  const int n = static_cast<int>(get_int(j, "n", 0));
  const int d = static_cast<int>(get_int(j, "d", 0));
  const int K = static_cast<int>(get_int(j, "K", 1));

  if (!j.contains("true_scorer")) {
    throw SchemaError("gen config: missing \"true_scorer\"");
  }
  const json& sj = j["true_scorer"];
  RewardScorer scorer = [&]() -> RewardScorer {
    if (sj.is_object() && sj.contains("init_seed")) {
      require_keys(sj, {"kind", "h", "init_seed"}, "gen config true_scorer");
      const std::string kind_name = get_string(sj, "kind", "linear");
      const ScorerKind kind =
          kind_name == "mlp" ? ScorerKind::kMlp : ScorerKind::kLinear;
      if (kind_name != "mlp" && kind_name != "linear") {
        throw SchemaError("gen config: true_scorer kind must be linear|mlp");
      }
      return RewardScorer::random_init(
          kind, d, static_cast<int>(get_int(sj, "h", 32)),
          static_cast<std::uint64_t>(get_int(sj, "init_seed", 0)));
    }
    return scorer_from_json(sj);
  }();

  if (!j.contains("true_thresholds")) {
    throw SchemaError("gen config: missing \"true_thresholds\"");
  }
  const json& tj = j["true_thresholds"];
  Thresholds thresholds = [&]() -> Thresholds {
    if (tj.is_string()) {
      if (tj.get<std::string>() != "uniform") {
        throw SchemaError(
            "gen config: true_thresholds must be \"uniform\" or an object");
      }
      return Thresholds(K, ThresholdMode::kSymmetric, uniform_zeta(K));
    }
    return thresholds_from_json(tj);
  }();

  GenConfig cfg{n,
                d,
                K,
                std::move(scorer),
                std::move(thresholds),
                get_number(j, "feature_scale", 1.0),
                static_cast<std::uint64_t>(get_int(j, "seed", 0))};
  cfg.validate();
  return cfg;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw SchemaError("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& text) {
  const auto parent = path.parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw SchemaError("cannot write " + tmp.string());
    }
    out << text;
    if (!out) {
      throw SchemaError("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buf);
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SchemaError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a_hex(ss.str());
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace ordrm::io
