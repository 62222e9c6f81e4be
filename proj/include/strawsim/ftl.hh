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
#include <deque>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "strawsim/device_model.hh"
#include "strawsim/disturbance_model.hh"
#include "strawsim/rec.hh"
#include "strawsim/types.hh"

namespace strawsim {

enum class RrPolicy { Block, Straw };

std::string_view to_string(RrPolicy p);
std::string_view to_string(CounterBackend b);

struct RrPolicyConfig {
  RrPolicy policy = RrPolicy::Straw;
  CounterBackend backend = CounterBackend::Exact;
  /// 0 selects derive_block_threshold(rpt).
  uint64_t block_rr_threshold = 0;
  uint64_t check_interval = 1000;
  uint32_t entries_per_block = 32;

  bool operator==(const RrPolicyConfig &) const = default;
};

struct FtlConfig {
  double over_provisioning = 0.07;
  /// Free-block floor per plane, as a fraction of blocks_per_plane (min 1).
  double gc_watermark = 0.02;

  bool operator==(const FtlConfig &) const = default;
};

enum class RrCause { BlockRr, WlRr, Gc };
std::string_view to_string(RrCause c);

struct RrEvent {
  RrCause cause = RrCause::WlRr;
  BlockId block = 0;
  std::optional<WlIndex> wl;
  uint64_t pages_copied = 0;
  double timestamp_us = 0;
  /// Block read count when the event fired.
  uint64_t block_reads = 0;
};

/// CSV columns: timestamp_us,cause,block,wl,pages_copied (wl empty unless
/// the cause is wl_rr).
void write_events_csv(std::ostream &out, const std::vector<RrEvent> &events);

enum class OpKind : uint8_t { Read, Program, Erase };
enum class OpSource : uint8_t { Host, Gc, Rr };

/// A flash command for the timing engine. A copy is a Read whose data is
/// then programmed on `then_program_die`.
struct FlashOp {
  OpKind kind = OpKind::Read;
  OpSource source = OpSource::Host;
  uint32_t die = 0;
  std::optional<uint32_t> then_program_die;
};

using OpBatch = std::vector<FlashOp>;

/// No free block left after garbage collection.
class DeviceFullError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FtlCounters {
  uint64_t host_reads = 0;
  uint64_t host_writes = 0;
  uint64_t unmapped_reads = 0;
  uint64_t programs = 0;
  uint64_t gc_copies = 0;
  uint64_t block_rr_copies = 0;
  uint64_t wl_rr_copies = 0;
  uint64_t block_reclaims = 0;
  uint64_t wl_reclaims = 0;
  uint64_t rr_checks = 0;
  uint64_t erases = 0;
  uint64_t corruption_events = 0;
};

/// Page-level FTL with greedy GC and pluggable read reclaim.
///
/// LPNs are striped statically over planes; every relocation (GC or RR)
/// stays in the source plane and goes through the plane's append point.
/// State changes happen at command arrival; the ops it returns are what the
/// timing engine charges for.
class Ftl {
 public:
  Ftl(const Geometry &geometry, const FtlConfig &ftl_cfg,
      const RrPolicyConfig &rr_cfg, const Rpt &rpt, DeviceModel &device);

  /// Host-visible pages for this shape. Throws std::invalid_argument when
  /// the spare area cannot hold the GC watermark plus one block per plane.
  static uint64_t logical_capacity(const Geometry &geometry,
                                   const FtlConfig &cfg);
  /// Free blocks per plane below which GC runs.
  static size_t gc_watermark_blocks(const Geometry &geometry,
                                    const FtlConfig &cfg);

  uint64_t logical_pages() const { return logical_pages_; }
  uint64_t block_threshold() const { return block_threshold_; }
  const RrPolicyConfig &policy() const { return rr_cfg_; }

  /// Writes LPNs [0, count) sequentially with no timing or statistics.
  void prefill(Lpn count);

  void host_read(Lpn lpn, double now_us, OpBatch &ops);
  void host_write(Lpn lpn, double now_us, OpBatch &ops);

  /// Valid WLs of `block` whose estimated effective read count, plus one
  /// interval of all-adjacent headroom, reaches their group's ERC_max.
  std::vector<WlIndex> identify_disturbed_wls(BlockId block) const;

  RrEvent reclaim_wl(BlockId block, WlIndex wl, OpBatch &ops);
  RrEvent reclaim_block(BlockId block, OpBatch &ops);
  /// Reclaims every disturbed WL, then erases the block if nothing valid is
  /// left in it.
  std::vector<RrEvent> rr_check(BlockId block, OpBatch &ops);

  std::optional<Ppn> lookup(Lpn lpn) const;
  const Rec &rec(BlockId block) const { return recs_[block]; }
  uint32_t valid_pages(BlockId block) const { return blocks_[block].valid; }
  uint32_t valid_pages_in_wl(BlockId block, WlIndex wl) const {
    return blocks_[block].wl_valid[wl];
  }
  bool is_active(BlockId block) const;
  /// Fully written (or sealed) and eligible as a GC victim.
  bool is_closed(BlockId block) const;
  size_t free_blocks(uint32_t plane) const { return planes_[plane].free.size(); }
  uint32_t plane_of_lpn(Lpn lpn) const;

  const FtlCounters &counters() const { return counters_; }
  const std::vector<RrEvent> &events() const { return events_; }
  bool failed() const { return counters_.corruption_events > 0; }

  /// Throws std::logic_error if l2p/p2l or the valid counts disagree.
  void verify_mapping() const;

 private:
  enum class BlockState : uint8_t { Free, Active, Closed };

  struct BlockMeta {
    BlockState state = BlockState::Free;
    uint32_t write_ptr = 0;
    uint32_t valid = 0;
    std::vector<uint32_t> wl_valid;
    std::vector<bool> corruption_reported;
    uint64_t next_check = 0;
  };

  struct PlaneState {
    std::deque<BlockId> free;
    std::optional<BlockId> active;
  };

  Ppn allocate(uint32_t plane);
  void seal_if_active(BlockId block);
  void invalidate(Ppn ppn);
  void place(Lpn lpn, Ppn ppn);
  /// Moves one valid page to the plane's append point.
  void relocate(Ppn from, OpSource source, OpBatch &ops);
  void erase(BlockId block, OpSource source, OpBatch &ops);
  void collect_garbage(uint32_t plane, OpBatch &ops);
  std::optional<BlockId> select_victim(uint32_t plane) const;
  void report_corruption(BlockId block, WlIndex wl);
  void after_read(BlockId block, OpBatch &ops);

  Geometry geometry_;
  FtlConfig ftl_cfg_;
  RrPolicyConfig rr_cfg_;
  const Rpt &rpt_;
  DeviceModel &device_;

  uint64_t logical_pages_ = 0;
  uint64_t block_threshold_ = 0;
  size_t gc_watermark_ = 1;
  double now_us_ = 0;

  std::vector<Ppn> l2p_;
  std::vector<Lpn> p2l_;
  std::vector<BlockMeta> blocks_;
  std::vector<PlaneState> planes_;
  std::vector<uint32_t> stripe_to_plane_;
  std::vector<Rec> recs_;

  FtlCounters counters_;
  std::vector<RrEvent> events_;
  std::vector<WlIndex> crossed_;
};

}  // namespace strawsim
