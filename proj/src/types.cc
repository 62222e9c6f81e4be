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

#include "strawsim/types.hh"

#include <cmath>
#include <stdexcept>

namespace strawsim {

Geometry Geometry::desk() {
  Geometry g;
  g.channels = 2;
  g.dies_per_channel = 1;
  g.planes_per_die = 2;
  g.blocks_per_plane = 8;
  g.wls_per_block = 48;
  g.pages_per_wl = 4;
  return g;
}

void Geometry::validate() const {
  auto require = [](uint32_t v, const char *name) {
    if (v < 1) {
      throw std::invalid_argument(std::string("geometry.") + name +
                                  " must be >= 1");
    }
  };
  require(channels, "channels");
  require(dies_per_channel, "dies_per_channel");
  require(planes_per_die, "planes_per_die");
  require(blocks_per_plane, "blocks_per_plane");
  require(wls_per_block, "wls_per_block");
  require(pages_per_wl, "pages_per_wl");
  require(page_size, "page_size");
  // SS entries carry a 2-byte WL index with 0xFFFF reserved.
  if (wls_per_block >= 0xFFFF) {
    throw std::invalid_argument("geometry.wls_per_block must be < 65535");
  }
}

PhysAddr to_phys_addr(const Geometry &g, Ppn ppn) {
  PhysAddr a;
  const uint64_t ppb = g.pages_per_block();
  uint64_t blk = ppn / ppb;
  const uint64_t off = ppn % ppb;
  a.wl = static_cast<uint32_t>(off / g.pages_per_wl);
  a.page = static_cast<uint32_t>(off % g.pages_per_wl);
  a.block = static_cast<uint32_t>(blk % g.blocks_per_plane);
  blk /= g.blocks_per_plane;
  a.plane = static_cast<uint32_t>(blk % g.planes_per_die);
  blk /= g.planes_per_die;
  a.die = static_cast<uint32_t>(blk % g.dies_per_channel);
  a.channel = static_cast<uint32_t>(blk / g.dies_per_channel);
  return a;
}

Ppn to_ppn(const Geometry &g, const PhysAddr &a) {
  uint64_t blk = a.channel;
  blk = blk * g.dies_per_channel + a.die;
  blk = blk * g.planes_per_die + a.plane;
  blk = blk * g.blocks_per_plane + a.block;
  return (blk * g.wls_per_block + a.wl) * g.pages_per_wl + a.page;
}

void TimingParams::validate() const {
  if (!(t_read_us > 0) || !(t_prog_us > 0) || !(t_erase_us > 0)) {
    throw std::invalid_argument("timing: latencies must be positive");
  }
  if (!(channel_bw_mbps > 0) || !(host_bw_mbps > 0)) {
    throw std::invalid_argument("timing: bandwidths must be positive");
  }
}

uint64_t TimingParams::channel_transfer_ns(uint64_t bytes) const {
  const double bytes_per_ns = channel_bw_mbps * 1048576.0 / 1e9;
  return static_cast<uint64_t>(std::ceil(static_cast<double>(bytes) / bytes_per_ns));
}

Alpha Alpha::from_double(double v) {
  if (!(v >= 0) || v > 1e8) {
    throw std::invalid_argument("alpha out of range");
  }
  return Alpha(static_cast<uint32_t>(std::llround(v * 10.0)));
}

std::string to_string(Alpha a) {
  return std::to_string(a.tenths() / 10) + "." + std::to_string(a.tenths() % 10);
}

std::string_view to_string(WlGroup g) {
  switch (g) {
    case WlGroup::Worst:
      return "Worst";
    case WlGroup::Bad:
      return "Bad";
    case WlGroup::Good:
      return "Good";
    case WlGroup::Best:
      return "Best";
  }
  return "?";
}

WlGroup parse_wl_group(std::string_view s) {
  if (s == "Worst") return WlGroup::Worst;
  if (s == "Bad") return WlGroup::Bad;
  if (s == "Good") return WlGroup::Good;
  if (s == "Best") return WlGroup::Best;
  throw std::invalid_argument("unknown WL group '" + std::string(s) + "'");
}

}  // namespace strawsim
