/*
 * Copyright 2026 The strawsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "strawsim/device_model.hh"
#include "strawsim/disturbance_model.hh"
#include "strawsim/ftl.hh"
#include "strawsim/sim_engine.hh"
#include "strawsim/types.hh"
#include "strawsim/workload.hh"

namespace strawsim {

/// Bad config file, key or value. what() names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Calibration { Fig2b, Paper };
enum class RptSource { Derived, Paper, Table };

struct RptConfig {
  RptSource source = RptSource::Derived;
  /// Fraction of each group's tolerance floor granted by a derived table.
  double margin = 0.95;
  /// Used when source is Table; erc_max is taken as-is (already scaled).
  std::vector<RptEntry> entries;

  bool operator==(const RptConfig &) const = default;
};

enum class WorkloadKind { Synthetic, Trace };

struct WorkloadConfig {
  WorkloadKind kind = WorkloadKind::Synthetic;
  /// Named profile applied before explicit keys; empty for none.
  std::string preset;
  /// `seed` is filled from RunConfig::seed, not read from the file.
  SyntheticSpec synthetic;
  std::string path;
  std::string device_id;

  bool operator==(const WorkloadConfig &) const = default;
};

struct RunConfig {
  std::string name = "run";
  /// Small geometry, tolerances / 100, OP 0.25, check interval / 100.
  bool desk_scale = false;
  Calibration calibration = Calibration::Fig2b;
  uint64_t seed = 1;
  uint32_t initial_pec = 1000;
  Geometry geometry;
  TimingParams timing;
  /// `seed` is derived from RunConfig::seed.
  ReliabilityConfig reliability;
  RptConfig rpt;
  RrPolicyConfig rr;
  FtlConfig ftl;
  WorkloadConfig workload;
  ReplayConfig replay;
  std::string output;

  bool operator==(const RunConfig &) const = default;
};

/// Builds a config from JSON. Presets (desk_scale, calibration,
/// workload.preset) are applied first; every explicit key then overrides.
/// Unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json &j);

/// Fully resolved JSON; config_from_json(config_to_json(c)) == c.
nlohmann::json config_to_json(const RunConfig &c);

/// Sets `dotted.key` in `j`. The value is parsed as JSON when it parses,
/// else taken as a string.
void apply_override(nlohmann::json &j, std::string_view assignment);

/// Reads `path`, applies overrides in order, then STRAWSIM_SEED if set
/// and `use_env`.
RunConfig load_config(const std::string &path,
                      const std::vector<std::string> &overrides,
                      bool use_env = true);

/// Cross-field checks that need the whole config (footprint fits, RPT
/// builds, FTL sizing). Throws ConfigError.
void validate_config(const RunConfig &c);

/// Non-fatal issues worth printing (RPT audit, oversized SS tables).
std::vector<std::string> config_warnings(const RunConfig &c);

Rpt build_rpt(const RunConfig &c);

/// Spec fed to the generator, with the seed and footprint resolved.
SyntheticSpec resolved_synthetic(const RunConfig &c);

/// FNV-1a over the canonical workload description (plus trace bytes).
std::string workload_hash(const RunConfig &c);

}  // namespace strawsim
