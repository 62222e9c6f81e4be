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
#include <span>
#include <variant>
#include <vector>

#include "strawsim/types.hh"

namespace strawsim {

enum class CounterBackend { Exact, SpaceSaving };

/// Counts are kept in full-width integers but must fit the 3-byte counters
/// the footprint model assumes.
inline constexpr uint64_t kCounterLimit = (uint64_t{1} << 24) - 1;

/// One counter per WL plus the block total.
class ExactRec {
 public:
  explicit ExactRec(uint32_t wls_per_block) : wl_rc_(wls_per_block, 0) {}

  void record(WlIndex wl);
  uint64_t query_wl(WlIndex wl) const { return wl_rc_[wl]; }
  /// Exact, so the lower bound is the count itself.
  uint64_t lower_bound_wl(WlIndex wl) const { return wl_rc_[wl]; }
  uint64_t query_block() const { return block_rc_; }
  void reset();

  std::span<const uint64_t> counts() const { return wl_rc_; }

 private:
  uint64_t block_rc_ = 0;
  std::vector<uint64_t> wl_rc_;
};

/// Space-Saving summary over the WL indices read since the last erase.
///
/// Estimates never undercount and overcount by at most block_rc / m.
/// Replacement picks the minimum-count entry, lowest slot on ties.
class SpaceSavingRec {
 public:
  static constexpr uint16_t kUnassigned = 0xFFFF;

  struct Entry {
    uint16_t wl = kUnassigned;
    uint64_t count = 0;
  };

  explicit SpaceSavingRec(uint32_t entries);

  void record(WlIndex wl);
  /// Entry count if tracked. An untracked WL gets the minimum entry count
  /// once an entry has been replaced, and 0 before that.
  uint64_t query_wl(WlIndex wl) const;
  /// A count the true value is known to be at least. Until the first
  /// replacement every entry is exact; after that only 0 is certain.
  uint64_t lower_bound_wl(WlIndex wl) const;
  uint64_t query_block() const { return block_rc_; }
  void reset();

  std::span<const Entry> entries() const { return entries_; }
  bool replaced() const { return replaced_; }

 private:
  uint64_t block_rc_ = 0;
  bool replaced_ = false;
  std::vector<Entry> entries_;
};

using Rec = std::variant<ExactRec, SpaceSavingRec>;

Rec make_rec(CounterBackend backend, uint32_t wls_per_block,
             uint32_t entries_per_block);

void rec_record_read(Rec &rec, WlIndex wl);
uint64_t rec_query_wl(const Rec &rec, WlIndex wl);
uint64_t rec_lower_bound_wl(const Rec &rec, WlIndex wl);
uint64_t rec_query_block(const Rec &rec);
void rec_reset(Rec &rec);

/// Modeled counter DRAM in bytes (3-byte counts, 2-byte SS WL index):
/// exact = blocks * (W * 3 + 3), space-saving = blocks * (m * 5 + 3).
uint64_t rec_memory_footprint(const Geometry &geometry, CounterBackend backend,
                              uint32_t entries_per_block);

/// Per-WL counting over a whole drive when one counter covers
/// `bytes_per_counter` of capacity.
uint64_t per_wl_counter_bytes(uint64_t capacity_bytes, uint64_t bytes_per_counter,
                              uint32_t counter_bytes = 3);

}  // namespace strawsim
