// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ordrm/data.hpp"
#include "ordrm/losses.hpp"
#include "ordrm/scorer.hpp"
#include "ordrm/thresholds.hpp"
#include "ordrm/train.hpp"

namespace ordrm::io {

using json = nlohmann::json;

// {"K": int, "mode": "symmetric"|"asymmetric", "zeta": [ascending floats]}
json thresholds_to_json(const Thresholds& th);
Thresholds thresholds_from_json(const json& j);

// {"kind": "linear"|"mlp", "d": int, "h": int, "params": [floats]}
json scorer_to_json(const RewardScorer& sc);
RewardScorer scorer_from_json(const json& j);

LossKind loss_kind_from_string(const std::string& name);
std::string loss_kind_to_string(LossKind kind);

// Flat key-value run configs.
TrainConfig train_config_from_json(const json& j);
GenConfig gen_config_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
// Write-to-temp then rename; no partial artifacts on failure.
void write_json_atomic(const std::filesystem::path& path, const json& j);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

// FNV-1a 64-bit, hex string; stable content digests for manifests.
std::string fnv1a_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

// Shortest round-trip decimal form (CSV output).
std::string format_double(double v);

}  // namespace ordrm::io
