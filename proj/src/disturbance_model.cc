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

#include "strawsim/disturbance_model.hh"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

namespace strawsim {

Rpt Rpt::from_entries(std::vector<RptEntry> entries) {
  if (entries.empty()) {
    throw std::invalid_argument("rpt: table is empty");
  }
  std::map<uint32_t, std::array<std::optional<Params>, kNumGroups>> cells;
  for (const auto &e : entries) {
    auto &slot = cells[e.pec_bucket][static_cast<int>(e.group)];
    if (slot) {
      throw std::invalid_argument("rpt: duplicate entry for bucket " +
                                  std::to_string(e.pec_bucket) + " group " +
                                  std::string(to_string(e.group)));
    }
    if (e.alpha.tenths() < 10) {
      throw std::invalid_argument("rpt: alpha must be >= 1 (bucket " +
                                  std::to_string(e.pec_bucket) + ")");
    }
    if (e.erc_max == 0) {
      throw std::invalid_argument("rpt: erc_max must be >= 1 (bucket " +
                                  std::to_string(e.pec_bucket) + ")");
    }
    slot = Params{e.erc_max, e.alpha};
  }

  Rpt rpt;
  for (const auto &[bucket, groups] : cells) {
    std::array<Params, kNumGroups> row;
    for (int g = 0; g < kNumGroups; ++g) {
      if (!groups[g]) {
        throw std::invalid_argument(
            "rpt: bucket " + std::to_string(bucket) + " is missing group " +
            std::string(to_string(static_cast<WlGroup>(g))));
      }
      row[g] = *groups[g];
      if (g > 0 && row[g].erc_max < row[g - 1].erc_max) {
        throw std::invalid_argument(
            "rpt: bucket " + std::to_string(bucket) + ": erc_max of " +
            std::string(to_string(static_cast<WlGroup>(g))) +
            " is below that of " +
            std::string(to_string(static_cast<WlGroup>(g - 1))));
      }
      if (!rpt.params_.empty() &&
          row[g].erc_max > rpt.params_.back()[g].erc_max) {
        throw std::invalid_argument(
            "rpt: erc_max of " +
            std::string(to_string(static_cast<WlGroup>(g))) +
            " increases from bucket " + std::to_string(rpt.buckets_.back()) +
            " to " + std::to_string(bucket));
      }
    }
    rpt.buckets_.push_back(bucket);
    rpt.params_.push_back(row);
  }
  return rpt;
}

size_t Rpt::bucket_index(uint32_t pec) const {
  auto it = std::lower_bound(buckets_.begin(), buckets_.end(), pec);
  if (it == buckets_.end()) {
    return buckets_.size() - 1;
  }
  return static_cast<size_t>(it - buckets_.begin());
}

Rpt::Params Rpt::lookup(uint32_t pec, WlGroup group) const {
  return params_[bucket_index(pec)][static_cast<int>(group)];
}

std::vector<RptEntry> Rpt::entries() const {
  std::vector<RptEntry> out;
  for (size_t b = 0; b < buckets_.size(); ++b) {
    for (int g = 0; g < kNumGroups; ++g) {
      out.push_back({buckets_[b], static_cast<WlGroup>(g), params_[b][g].erc_max,
                     params_[b][g].alpha});
    }
  }
  return out;
}

Rpt derive_rpt(const ReliabilityConfig &cfg, double margin) {
  if (!(margin > 0.0 && margin <= 1.0)) {
    throw std::invalid_argument("rpt: margin must be in (0, 1]");
  }
  std::vector<RptEntry> entries;
  const Alpha alpha = cfg.max_alpha();
  for (const auto &bucket : cfg.pec_degradation) {
    for (int g = 0; g < kNumGroups; ++g) {
      const auto group = static_cast<WlGroup>(g);
      const double floor_tol =
          static_cast<double>(cfg.group_floor(group, bucket.pec_limit));
      const auto erc_max = static_cast<uint64_t>(std::floor(margin * floor_tol));
      entries.push_back(
          {bucket.pec_limit, group, std::max<uint64_t>(1, erc_max), alpha});
    }
  }
  return Rpt::from_entries(std::move(entries));
}

Rpt paper_anchored_rpt(uint32_t scale) {
  if (scale < 1) {
    throw std::invalid_argument("rpt: scale must be >= 1");
  }
  struct Cell {
    uint32_t bucket;
    WlGroup group;
    uint64_t erc_max;
    uint32_t alpha_tenths;
  };
  // 2K row: Good and the Best alpha are published; Worst is pinned so that
  // ERC_max / alpha = 54,560 reads. 1K row is the 2K row divided by 0.85.
  static constexpr Cell kCells[] = {
      {1000, WlGroup::Worst, 558'437, 87},  {1000, WlGroup::Bad, 729'411, 89},
      {1000, WlGroup::Good, 902'352, 90},   {1000, WlGroup::Best, 1'058'823, 87},
      {2000, WlGroup::Worst, 474'672, 87},  {2000, WlGroup::Bad, 620'000, 89},
      {2000, WlGroup::Good, 767'000, 90},   {2000, WlGroup::Best, 900'000, 87},
  };
  std::vector<RptEntry> entries;
  for (const auto &c : kCells) {
    entries.push_back({c.bucket, c.group, std::max<uint64_t>(1, c.erc_max / scale),
                       Alpha::from_tenths(c.alpha_tenths)});
  }
  return Rpt::from_entries(std::move(entries));
}

EffectiveReads effective_read_count(uint64_t r_adj, uint64_t r_nonadj,
                                    Alpha alpha) {
  uint64_t adj = 0;
  uint64_t nonadj = 0;
  uint64_t sum = 0;
  if (__builtin_mul_overflow(r_adj, uint64_t{alpha.tenths()}, &adj) ||
      __builtin_mul_overflow(r_nonadj, uint64_t{10}, &nonadj) ||
      __builtin_add_overflow(adj, nonadj, &sum)) {
    throw std::overflow_error("effective read count overflow");
  }
  return EffectiveReads::from_tenths(sum);
}

bool is_heavily_disturbed(EffectiveReads erc, uint64_t erc_max, Alpha alpha,
                          uint64_t interval) {
  // Saturating: anything that overflows is certainly past the budget.
  uint64_t headroom = 0;
  uint64_t projected = 0;
  uint64_t budget = 0;
  if (__builtin_mul_overflow(interval, uint64_t{alpha.tenths()}, &headroom) ||
      __builtin_add_overflow(erc.tenths(), headroom, &projected)) {
    return true;
  }
  if (__builtin_mul_overflow(erc_max, uint64_t{10}, &budget)) {
    return false;
  }
  return projected >= budget;
}

uint64_t derive_block_threshold(const Rpt &rpt, uint64_t margin_reads) {
  const uint32_t last = rpt.buckets().back();
  uint64_t best = std::numeric_limits<uint64_t>::max();
  for (int g = 0; g < kNumGroups; ++g) {
    const auto p = rpt.lookup(last, static_cast<WlGroup>(g));
    best = std::min(best, p.erc_max * 10 / p.alpha.tenths());
  }
  return best > margin_reads ? std::max<uint64_t>(1, best - margin_reads) : 1;
}

std::vector<std::string> audit_rpt(const Rpt &rpt, const ReliabilityConfig &cfg) {
  std::vector<std::string> issues;
  const Alpha max_alpha = cfg.max_alpha();
  const auto &buckets = rpt.buckets();
  for (size_t b = 0; b < buckets.size(); ++b) {
    // The last bucket also serves every PEC beyond it.
    uint32_t pec = buckets[b];
    if (b + 1 == buckets.size()) {
      pec = std::max(pec, cfg.pec_degradation.back().pec_limit + 1);
    }
    for (int g = 0; g < kNumGroups; ++g) {
      const auto group = static_cast<WlGroup>(g);
      const auto p = rpt.lookup(buckets[b], group);
      const uint64_t floor_tol = cfg.group_floor(group, pec);
      if (p.erc_max > floor_tol) {
        issues.push_back("bucket " + std::to_string(buckets[b]) + " group " +
                         std::string(to_string(group)) + ": erc_max " +
                         std::to_string(p.erc_max) + " exceeds tolerance floor " +
                         std::to_string(floor_tol));
      }
      if (p.alpha < max_alpha) {
        issues.push_back("bucket " + std::to_string(buckets[b]) + " group " +
                         std::string(to_string(group)) + ": alpha " +
                         to_string(p.alpha) +
                         " is below the largest device alpha " +
                         to_string(max_alpha));
      }
    }
  }
  return issues;
}

}  // namespace strawsim
