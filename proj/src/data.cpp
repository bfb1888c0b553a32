// SPDX-License-Identifier: Apache-2.0
#include "ordrm/data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ordrm/common.hpp"
#include "ordrm/io.hpp"
#include "ordrm/losses.hpp"
#include "ordrm/rng.hpp"

namespace ordrm {

using nlohmann::json;

void GenConfig::validate() const {
  if (n <= 0) throw SchemaError("gen config: n must be > 0");
  if (d <= 0) throw SchemaError("gen config: d must be > 0");
  if (num_levels < 1) throw SchemaError("gen config: K must be >= 1");
  if (!(feature_scale > 0)) {
    throw SchemaError("gen config: feature_scale must be > 0");
  }
  if (true_scorer.dim() != d) {
    throw SchemaError("gen config: true_scorer dimension != d");
  }
  if (true_thresholds.num_levels() != num_levels) {
    throw SchemaError("gen config: true_thresholds K mismatch");
  }
}

Dataset generate(const GenConfig& cfg, bool parallel) {
  cfg.validate();
  Dataset ds;
  ds.num_levels = cfg.num_levels;
  ds.dim = cfg.d;
  ds.examples.resize(cfg.n);
  const int K = cfg.num_levels;

#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < cfg.n; ++i) {
    rng::Stream stream(cfg.seed, rng::Purpose::kFeatures,
                       static_cast<std::uint64_t>(i));
    PreferenceExample& ex = ds.examples[i];
    ex.a.resize(cfg.d);
    ex.b.resize(cfg.d);
    for (int j = 0; j < cfg.d; ++j) {
      ex.a[j] = cfg.feature_scale * stream.next_gauss();
    }
    for (int j = 0; j < cfg.d; ++j) {
      ex.b[j] = cfg.feature_scale * stream.next_gauss();
    }
    const double s = cfg.true_scorer.score_diff(ex.a, ex.b);
    const double u = stream.next_unit();
    double cum = 0.0;
    int label = K;
    for (int z = -K; z <= K; ++z) {
      cum += prob_level(s, cfg.true_thresholds, z);
      if (u < cum) {
        label = z;
        break;
      }
    }
    ex.z = label;
    ex.z_clean = label;
  }
  return ds;
}

namespace {

enum class NoiseKind { kShift, kRandom };

Dataset inject_noise(const Dataset& ds, double rate, std::uint64_t seed,
                     NoiseKind kind, NoiseCounts* counts) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw SchemaError("noise: rate must lie in [0, 1]");
  }
  const int K = ds.num_levels;
  Dataset out = ds;
  NoiseCounts local;
  for (std::size_t i = 0; i < out.examples.size(); ++i) {
    rng::Stream stream(seed, rng::Purpose::kNoise, i);
    if (stream.next_unit() >= rate) {
      continue;
    }
    ++local.selected;
    PreferenceExample& ex = out.examples[i];
    if (!ex.z_clean.has_value()) {
      ex.z_clean = ex.z;
    }
    const int before = ex.z;
    if (kind == NoiseKind::kShift) {
      const int delta = stream.next_unit() < 0.5 ? 1 : -1;
      ex.z = std::min(std::max(ex.z + delta, -K), K);
    } else {
      ex.z = static_cast<int>(stream.next_below(2 * K + 1)) - K;
    }
    if (ex.z != before) {
      ++local.changed;
    }
  }
  if (counts != nullptr) {
    *counts = local;
  }
  return out;
}

}  // namespace

Dataset inject_shift_noise(const Dataset& ds, double rate, std::uint64_t seed,
                           NoiseCounts* counts) {
  return inject_noise(ds, rate, seed, NoiseKind::kShift, counts);
}

Dataset inject_random_noise(const Dataset& ds, double rate, std::uint64_t seed,
                            NoiseCounts* counts) {
  return inject_noise(ds, rate, seed, NoiseKind::kRandom, counts);
}

std::pair<PreferenceExample, bool> canonicalize(const PreferenceExample& ex) {
  if (ex.z >= 0) {
    return {ex, false};
  }
  PreferenceExample flipped;
  flipped.a = ex.b;
  flipped.b = ex.a;
  flipped.z = -ex.z;
  if (ex.z_clean.has_value()) {
    flipped.z_clean = -*ex.z_clean;
  }
  return {std::move(flipped), true};
}

namespace {

std::vector<double> parse_feature_array(const json& j, const char* name,
                                        std::size_t line_no) {
  if (!j.is_array()) {
    throw SchemaError("jsonl line " + std::to_string(line_no) + ": \"" + name +
                      "\" must be an array");
  }
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw SchemaError("jsonl line " + std::to_string(line_no) + ": \"" + name +
                        "\" must contain numbers");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      throw SchemaError("jsonl line " + std::to_string(line_no) +
                        ": non-finite feature");
    }
    out.push_back(x);
  }
  return out;
}

int parse_level(const json& j, int K, const char* name, std::size_t line_no) {
  if (!j.is_number_integer()) {
    throw SchemaError("jsonl line " + std::to_string(line_no) + ": \"" + name +
                      "\" must be an integer");
  }
  const int z = j.get<int>();
  if (z < -K || z > K) {
    throw SchemaError("jsonl line " + std::to_string(line_no) + ": \"" + name +
                      "\"=" + std::to_string(z) + " outside [-K, K] with K=" +
                      std::to_string(K));
  }
  return z;
}

}  // namespace

Dataset read_jsonl(const std::string& path, int num_levels) {
  if (num_levels < 1) {
    throw SchemaError("read_jsonl: K must be >= 1");
  }
  std::ifstream in(path);
  if (!in) {
    throw SchemaError("read_jsonl: cannot open " + path);
  }
  Dataset ds;
  ds.num_levels = num_levels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError("jsonl line " + std::to_string(line_no) +
                        ": parse error: " + e.what());
    }
    if (!j.is_object() || !j.contains("a") || !j.contains("b") ||
        !j.contains("z")) {
      throw SchemaError("jsonl line " + std::to_string(line_no) +
                        ": expected object with \"a\", \"b\", \"z\"");
    }
    PreferenceExample ex;
    ex.a = parse_feature_array(j["a"], "a", line_no);
    ex.b = parse_feature_array(j["b"], "b", line_no);
    if (ex.a.size() != ex.b.size()) {
      throw SchemaError("jsonl line " + std::to_string(line_no) +
                        ": feature dimensions differ");
    }
    ex.z = parse_level(j["z"], num_levels, "z", line_no);
    if (j.contains("z_clean") && !j["z_clean"].is_null()) {
      ex.z_clean = parse_level(j["z_clean"], num_levels, "z_clean", line_no);
    }
    if (ds.examples.empty()) {
      ds.dim = static_cast<int>(ex.a.size());
    } else if (static_cast<int>(ex.a.size()) != ds.dim) {
      throw SchemaError("jsonl line " + std::to_string(line_no) +
                        ": dimension " + std::to_string(ex.a.size()) +
                        " inconsistent with " + std::to_string(ds.dim));
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

void write_jsonl(const Dataset& ds, const std::string& path) {
  std::ostringstream out;
  for (const auto& ex : ds.examples) {
    json j;
    j["a"] = ex.a;
    j["b"] = ex.b;
    j["z"] = ex.z;
    j["z_clean"] = ex.z_clean.has_value() ? json(*ex.z_clean) : json(nullptr);
    out << j.dump() << '\n';
  }
  io::write_text_atomic(path, out.str());
}

}  // namespace ordrm
