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

#include "strawsim/rec.hh"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace strawsim {

namespace {

void check_limit(uint64_t v) {
  if (v > kCounterLimit) {
    throw std::overflow_error("read counter exceeded 24-bit range");
  }
}

}  // namespace

void ExactRec::record(WlIndex wl) {
  ++block_rc_;
  ++wl_rc_[wl];
  check_limit(block_rc_);
}

void ExactRec::reset() {
  block_rc_ = 0;
  std::fill(wl_rc_.begin(), wl_rc_.end(), 0);
}

SpaceSavingRec::SpaceSavingRec(uint32_t entries) : entries_(entries) {
  if (entries == 0) {
    throw std::invalid_argument("counters.entries_per_block must be >= 1");
  }
}

void SpaceSavingRec::record(WlIndex wl) {
  ++block_rc_;
  check_limit(block_rc_);
  const auto key = static_cast<uint16_t>(wl);

  size_t free_slot = entries_.size();
  size_t min_slot = 0;
  for (size_t i = 0; i < entries_.size(); ++i) {
    auto &e = entries_[i];
    if (e.wl == key) {
      ++e.count;
      return;
    }
    if (e.wl == kUnassigned) {
      if (free_slot == entries_.size()) {
        free_slot = i;
      }
    } else if (e.count < entries_[min_slot].count ||
               entries_[min_slot].wl == kUnassigned) {
      min_slot = i;
    }
  }
  if (free_slot != entries_.size()) {
    entries_[free_slot] = {key, 1};
    return;
  }
  auto &victim = entries_[min_slot];
  victim.wl = key;
  ++victim.count;
  replaced_ = true;
}

uint64_t SpaceSavingRec::query_wl(WlIndex wl) const {
  uint64_t min_count = std::numeric_limits<uint64_t>::max();
  for (const auto &e : entries_) {
    if (e.wl == wl) {
      return e.count;
    }
    min_count = std::min(min_count, e.wl == kUnassigned ? 0 : e.count);
  }
  // Without an eviction every WL ever read still has its own slot.
  return replaced_ ? min_count : 0;
}

uint64_t SpaceSavingRec::lower_bound_wl(WlIndex wl) const {
  return replaced_ ? 0 : query_wl(wl);
}

void SpaceSavingRec::reset() {
  block_rc_ = 0;
  replaced_ = false;
  std::fill(entries_.begin(), entries_.end(), Entry{});
}

Rec make_rec(CounterBackend backend, uint32_t wls_per_block,
             uint32_t entries_per_block) {
  if (backend == CounterBackend::Exact) {
    return ExactRec(wls_per_block);
  }
  return SpaceSavingRec(entries_per_block);
}

void rec_record_read(Rec &rec, WlIndex wl) {
  std::visit([wl](auto &r) { r.record(wl); }, rec);
}

uint64_t rec_query_wl(const Rec &rec, WlIndex wl) {
  return std::visit([wl](const auto &r) { return r.query_wl(wl); }, rec);
}

uint64_t rec_lower_bound_wl(const Rec &rec, WlIndex wl) {
  return std::visit([wl](const auto &r) { return r.lower_bound_wl(wl); }, rec);
}

uint64_t rec_query_block(const Rec &rec) {
  return std::visit([](const auto &r) { return r.query_block(); }, rec);
}

void rec_reset(Rec &rec) {
  std::visit([](auto &r) { r.reset(); }, rec);
}

uint64_t rec_memory_footprint(const Geometry &geometry, CounterBackend backend,
                              uint32_t entries_per_block) {
  constexpr uint64_t kCount = 3;
  constexpr uint64_t kIndex = 2;
  const uint64_t per_block =
      backend == CounterBackend::Exact
          ? uint64_t{geometry.wls_per_block} * kCount + kCount
          : uint64_t{entries_per_block} * (kIndex + kCount) + kCount;
  return geometry.blocks() * per_block;
}

uint64_t per_wl_counter_bytes(uint64_t capacity_bytes, uint64_t bytes_per_counter,
                              uint32_t counter_bytes) {
  return capacity_bytes * counter_bytes / bytes_per_counter;
}

}  // namespace strawsim
