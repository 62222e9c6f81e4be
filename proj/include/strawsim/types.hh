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

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace strawsim {

using BlockId = uint32_t;
using WlIndex = uint32_t;
using Lpn = uint64_t;
using Ppn = uint64_t;

inline constexpr uint64_t kUnmapped = std::numeric_limits<uint64_t>::max();

/// Flash array shape. Defaults describe the 2-TiB evaluation SSD
/// (8 ch x 4 dies x 4 planes, 141 blocks/plane, 321 WLs x 24 pages).
struct Geometry {
  uint32_t channels = 8;
  uint32_t dies_per_channel = 4;
  uint32_t planes_per_die = 4;
  uint32_t blocks_per_plane = 141;
  uint32_t wls_per_block = 321;
  uint32_t pages_per_wl = 24;
  uint32_t page_size = 16384;

  /// Scaled-down shape used for quick experiments.
  static Geometry desk();

  uint64_t dies() const { return uint64_t{channels} * dies_per_channel; }
  uint64_t planes() const { return dies() * planes_per_die; }
  uint64_t blocks() const { return planes() * blocks_per_plane; }
  uint64_t pages_per_block() const {
    return uint64_t{wls_per_block} * pages_per_wl;
  }
  uint64_t pages_per_plane() const {
    return pages_per_block() * blocks_per_plane;
  }
  uint64_t total_pages() const { return blocks() * pages_per_block(); }
  uint64_t capacity_bytes() const { return total_pages() * page_size; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  bool operator==(const Geometry &) const = default;
};

/// Location of one physical page.
struct PhysAddr {
  uint32_t channel = 0;
  uint32_t die = 0;
  uint32_t plane = 0;
  uint32_t block = 0;
  uint32_t wl = 0;
  uint32_t page = 0;

  bool operator==(const PhysAddr &) const = default;
};

/// Blocks are numbered channel-major: ((ch * D + die) * P + plane) * B + blk.
/// Within a block, page index = wl * pages_per_wl + page (program order).
PhysAddr to_phys_addr(const Geometry &g, Ppn ppn);
Ppn to_ppn(const Geometry &g, const PhysAddr &a);

inline BlockId block_of(const Geometry &g, Ppn ppn) {
  return static_cast<BlockId>(ppn / g.pages_per_block());
}
inline uint32_t page_in_block(const Geometry &g, Ppn ppn) {
  return static_cast<uint32_t>(ppn % g.pages_per_block());
}
inline uint32_t plane_of_block(const Geometry &g, BlockId b) {
  return b / g.blocks_per_plane;
}
inline uint32_t die_of_block(const Geometry &g, BlockId b) {
  return static_cast<uint32_t>(b / (uint64_t{g.planes_per_die} * g.blocks_per_plane));
}

struct TimingParams {
  double t_read_us = 40;
  double t_prog_us = 380;
  double t_erase_us = 3500;
  // MiB/s.
  double channel_bw_mbps = 2000;
  double host_bw_mbps = 8000;

  void validate() const;

  /// Time to move `bytes` over one flash channel, rounded up to whole ns.
  uint64_t channel_transfer_ns(uint64_t bytes) const;

  bool operator==(const TimingParams &) const = default;
};

/// Disturbance rate carried as tenths (8.7 -> 87) so ERC arithmetic is exact.
class Alpha {
 public:
  constexpr Alpha() = default;
  static constexpr Alpha from_tenths(uint32_t t) { return Alpha(t); }
  /// Rounds to the nearest tenth.
  static Alpha from_double(double v);

  constexpr uint32_t tenths() const { return tenths_; }
  double value() const { return tenths_ / 10.0; }

  constexpr auto operator<=>(const Alpha &) const = default;

 private:
  constexpr explicit Alpha(uint32_t t) : tenths_(t) {}
  uint32_t tenths_ = 10;
};

/// "8.7"
std::string to_string(Alpha a);

/// Disturbance-weighted read count, in tenths of a non-adjacent read.
class EffectiveReads {
 public:
  constexpr EffectiveReads() = default;
  static constexpr EffectiveReads from_tenths(uint64_t t) {
    return EffectiveReads(t);
  }
  static constexpr EffectiveReads from_reads(uint64_t reads) {
    return EffectiveReads(reads * 10);
  }

  constexpr uint64_t tenths() const { return tenths_; }
  double reads() const { return tenths_ / 10.0; }

  constexpr auto operator<=>(const EffectiveReads &) const = default;

 private:
  constexpr explicit EffectiveReads(uint64_t t) : tenths_(t) {}
  uint64_t tenths_ = 0;
};

/// Read-disturbance tolerance class of a WL. Ordered weakest first.
enum class WlGroup : uint8_t { Worst = 0, Bad = 1, Good = 2, Best = 3 };
inline constexpr int kNumGroups = 4;

std::string_view to_string(WlGroup g);
/// Throws std::invalid_argument on unknown names.
WlGroup parse_wl_group(std::string_view s);

}  // namespace strawsim
