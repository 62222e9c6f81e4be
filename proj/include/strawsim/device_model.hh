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
#include <iosfwd>
#include <span>
#include <vector>

#include "strawsim/types.hh"

namespace strawsim {

enum class ToleranceDistribution { Uniform, TruncatedNormal };

/// Tolerance multiplier for blocks whose PEC is <= pec_limit (and above the
/// previous entry's limit). PECs past the last entry use the last factor.
struct PecScale {
  uint32_t pec_limit = 0;
  double factor = 1.0;

  bool operator==(const PecScale &) const = default;
};

/// Parameters of the hidden per-WL reliability physics.
///
/// Tolerances are expressed in effective reads (one non-adjacent read = 1) at
/// the lowest PEC bucket, before division by `scale`. Each block's WLs are
/// drawn by stratified sampling: a quarter of the WLs land in each quartile of
/// the configured distribution, and the quartile a WL lands in is its group.
struct ReliabilityConfig {
  uint64_t tolerance_min = 403'000;
  uint64_t tolerance_max = 962'000;
  double alpha_mean = 8.4;
  /// Relative half-width: alpha is drawn from alpha_mean * (1 +/- spread).
  double alpha_spread = 0.10;
  ToleranceDistribution distribution = ToleranceDistribution::Uniform;
  uint64_t seed = 1;
  bool symmetric_mode = false;
  std::vector<PecScale> pec_degradation = {{1000, 1.0}, {2000, 0.85}};
  /// Divisor applied to every tolerance (desk-scale runs use 100).
  uint32_t scale = 1;

  /// Calibration whose group floors sit above the paper-anchored RPT.
  static ReliabilityConfig paper_anchored();

  void validate() const;

  /// Scaled base tolerance at cumulative probability p in [0, 1].
  double tolerance_quantile(double p) const;
  /// Median scaled base tolerance; every WL gets this in symmetric mode.
  uint64_t median_tolerance() const;
  double pec_factor(uint32_t pec) const;
  /// Lowest tolerance any WL of `g` can have at `pec`.
  uint64_t group_floor(WlGroup g, uint32_t pec) const;
  /// Largest alpha the sampler can produce.
  Alpha max_alpha() const;

  bool operator==(const ReliabilityConfig &) const = default;
};

/// Hidden state of one WL. `stress` only accrues while the WL holds
/// programmed data; an erased WL has no charge to disturb.
struct WlGroundTruth {
  WlGroup group = WlGroup::Worst;
  uint64_t base_tolerance = 0;
  uint64_t tolerance = 0;
  Alpha alpha;
  EffectiveReads stress;
  bool programmed = false;

  bool corrupted() const {
    return stress > EffectiveReads::from_reads(tolerance);
  }
};

/// Samples the ground truth for one block. Deterministic in
/// (cfg.seed, block_id); tolerances are scaled for `pec`.
std::vector<WlGroundTruth> init_block_ground_truth(BlockId block_id,
                                                   uint32_t wls_per_block,
                                                   const ReliabilityConfig &cfg,
                                                   uint32_t pec);

/// Ground-truth reliability state of one block.
class BlockReliability {
 public:
  BlockReliability(std::vector<WlGroundTruth> wls, uint32_t pec,
                   const ReliabilityConfig &cfg);

  /// Adds one read's V_pass stress to every programmed WL except `target`:
  /// alpha for the two neighbours, 1 for the rest. WLs whose stress crosses
  /// their tolerance on this read are appended to `newly_corrupted`.
  void apply_read_stress(WlIndex target,
                         std::vector<WlIndex> *newly_corrupted = nullptr);

  /// WLs whose stress exceeds tolerance.
  std::vector<WlIndex> check_integrity() const;

  /// Resets stress, bumps PEC and rescales tolerances for the new PEC.
  void erase();

  void mark_programmed(WlIndex wl) { wls_[wl].programmed = true; }
  void program_all();

  uint32_t pec() const { return pec_; }
  uint32_t size() const { return static_cast<uint32_t>(wls_.size()); }
  const WlGroundTruth &wl(WlIndex i) const { return wls_[i]; }
  std::span<const WlGroundTruth> wls() const { return wls_; }
  /// Test hook.
  WlGroundTruth &mutable_wl(WlIndex i) { return wls_[i]; }

 private:
  std::vector<WlGroundTruth> wls_;
  uint32_t pec_;
  const ReliabilityConfig *cfg_;
};

/// Ground truth for every block of the device.
class DeviceModel {
 public:
  DeviceModel(const Geometry &geometry, const ReliabilityConfig &cfg,
              uint32_t initial_pec);
  // Blocks keep a pointer to cfg_.
  DeviceModel(const DeviceModel &) = delete;
  DeviceModel &operator=(const DeviceModel &) = delete;

  const Geometry &geometry() const { return geometry_; }
  const ReliabilityConfig &reliability() const { return cfg_; }
  BlockReliability &block(BlockId b) { return blocks_[b]; }
  const BlockReliability &block(BlockId b) const { return blocks_[b]; }

  /// CSV columns: block,wl,group,tolerance,alpha
  void dump_ground_truth_csv(std::ostream &out) const;

 private:
  Geometry geometry_;
  ReliabilityConfig cfg_;
  std::vector<BlockReliability> blocks_;
};

}  // namespace strawsim
