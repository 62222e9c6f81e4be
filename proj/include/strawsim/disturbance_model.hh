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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "strawsim/device_model.hh"
#include "strawsim/types.hh"

namespace strawsim {

/// One cell of the read-reclaim parameter table.
struct RptEntry {
  uint32_t pec_bucket = 0;
  WlGroup group = WlGroup::Worst;
  /// Effective reads the weakest WL of the group tolerates.
  uint64_t erc_max = 0;
  Alpha alpha;

  bool operator==(const RptEntry &) const = default;
};

/// Read-reclaim parameter table: (PEC bucket, WL group) -> (ERC_max, alpha).
/// Immutable once built; share freely across simulations.
class Rpt {
 public:
  struct Params {
    uint64_t erc_max = 0;
    Alpha alpha;
  };

  /// Validates completeness and monotonicity. Errors are
  /// std::invalid_argument with messages prefixed "rpt:".
  static Rpt from_entries(std::vector<RptEntry> entries);

  /// Entry of the smallest bucket >= pec, or the largest bucket when pec is
  /// past every boundary.
  Params lookup(uint32_t pec, WlGroup group) const;

  const std::vector<uint32_t> &buckets() const { return buckets_; }
  std::vector<RptEntry> entries() const;

 private:
  Rpt() = default;
  size_t bucket_index(uint32_t pec) const;

  std::vector<uint32_t> buckets_;
  std::vector<std::array<Params, kNumGroups>> params_;
};

/// Default table built from the ground-truth calibration: ERC_max is
/// `margin` times each group's tolerance floor at the bucket's PEC, and alpha
/// is the largest alpha the ground truth can produce.
Rpt derive_rpt(const ReliabilityConfig &cfg, double margin = 0.95);

/// Table holding the published anchors (Good@2K = 767K / 9.0, Best alpha 8.7,
/// Worst@2K chosen so ERC_max / alpha = 54,560). Cells not published are
/// interpolated. ERC_max values are divided by `scale`.
Rpt paper_anchored_rpt(uint32_t scale = 1);

/// r_nonadj + alpha * r_adj. Throws std::overflow_error if the result does
/// not fit.
EffectiveReads effective_read_count(uint64_t r_adj, uint64_t r_nonadj,
                                    Alpha alpha);

/// True iff erc + alpha * interval >= erc_max: the WL could reach its budget
/// before the next check even if every read in between hits a neighbour.
bool is_heavily_disturbed(EffectiveReads erc, uint64_t erc_max, Alpha alpha,
                          uint64_t interval);

/// Block read threshold safe under the all-adjacent worst case:
/// min over the largest bucket's groups of floor(ERC_max / alpha), minus
/// `margin_reads` (floored at 1).
uint64_t derive_block_threshold(const Rpt &rpt, uint64_t margin_reads = 0);

/// Cells where the table promises more than the ground truth can deliver
/// (ERC_max above a group's tolerance floor, or alpha below the largest
/// sampled alpha). Empty when the table is safe for `cfg`.
std::vector<std::string> audit_rpt(const Rpt &rpt, const ReliabilityConfig &cfg);

}  // namespace strawsim
