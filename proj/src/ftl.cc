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

#include "strawsim/ftl.hh"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

namespace strawsim {

std::string_view to_string(RrPolicy p) {
  return p == RrPolicy::Block ? "BLOCK" : "STRAW";
}

std::string_view to_string(CounterBackend b) {
  return b == CounterBackend::Exact ? "exact" : "space_saving";
}

std::string_view to_string(RrCause c) {
  switch (c) {
    case RrCause::BlockRr:
      return "block_rr";
    case RrCause::WlRr:
      return "wl_rr";
    case RrCause::Gc:
      return "gc";
  }
  return "?";
}

void write_events_csv(std::ostream &out, const std::vector<RrEvent> &events) {
  out << "timestamp_us,cause,block,wl,pages_copied\n";
  for (const auto &e : events) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), e.timestamp_us);
    out << std::string_view(buf, r.ptr - buf) << ',' << to_string(e.cause) << ',' << e.block << ',';
    if (e.wl) {
      out << *e.wl;
    }
    out << ',' << e.pages_copied << '\n';
  }
}

Ftl::Ftl(const Geometry &geometry, const FtlConfig &ftl_cfg,
         const RrPolicyConfig &rr_cfg, const Rpt &rpt, DeviceModel &device)
    : geometry_(geometry),
      ftl_cfg_(ftl_cfg),
      rr_cfg_(rr_cfg),
      rpt_(rpt),
      device_(device) {
  geometry_.validate();
  if (rr_cfg_.check_interval < 1) {
    throw std::invalid_argument("rr.check_interval must be >= 1");
  }
  gc_watermark_ = gc_watermark_blocks(geometry_, ftl_cfg_);
  logical_pages_ = logical_capacity(geometry_, ftl_cfg_);

  block_threshold_ = rr_cfg_.block_rr_threshold != 0
                         ? rr_cfg_.block_rr_threshold
                         : derive_block_threshold(rpt_);

  l2p_.assign(logical_pages_, kUnmapped);
  p2l_.assign(geometry_.total_pages(), kUnmapped);

  const uint64_t nblocks = geometry_.blocks();
  blocks_.resize(nblocks);
  recs_.reserve(nblocks);
  for (auto &b : blocks_) {
    b.wl_valid.assign(geometry_.wls_per_block, 0);
    b.corruption_reported.assign(geometry_.wls_per_block, false);
    b.next_check = rr_cfg_.check_interval;
    recs_.push_back(make_rec(rr_cfg_.backend, geometry_.wls_per_block,
                             rr_cfg_.entries_per_block));
  }

  planes_.resize(geometry_.planes());
  for (uint32_t p = 0; p < planes_.size(); ++p) {
    for (uint32_t i = 0; i < geometry_.blocks_per_plane; ++i) {
      planes_[p].free.push_back(p * geometry_.blocks_per_plane + i);
    }
  }

  // Consecutive stripes walk channels first, then dies, then planes.
  const uint32_t C = geometry_.channels;
  const uint32_t D = geometry_.dies_per_channel;
  const uint32_t P = geometry_.planes_per_die;
  stripe_to_plane_.resize(geometry_.planes());
  for (uint32_t i = 0; i < stripe_to_plane_.size(); ++i) {
    const uint32_t ch = i % C;
    const uint32_t die = (i / C) % D;
    const uint32_t pl = i / (C * D);
    stripe_to_plane_[i] = (ch * D + die) * P + pl;
  }
}

size_t Ftl::gc_watermark_blocks(const Geometry &geometry,
                                const FtlConfig &cfg) {
  if (!(cfg.gc_watermark >= 0.0 && cfg.gc_watermark < 1.0)) {
    throw std::invalid_argument("ftl.gc_watermark must be in [0, 1)");
  }
  return std::max<size_t>(
      1, static_cast<size_t>(
             std::llround(cfg.gc_watermark * geometry.blocks_per_plane)));
}

uint64_t Ftl::logical_capacity(const Geometry &geometry, const FtlConfig &cfg) {
  if (!(cfg.over_provisioning > 0.0 && cfg.over_provisioning < 1.0)) {
    throw std::invalid_argument("ftl.over_provisioning must be in (0, 1)");
  }
  const uint64_t ppb = geometry.pages_per_block();
  const uint64_t per_plane = static_cast<uint64_t>(
      std::floor(static_cast<double>(geometry.pages_per_plane()) *
                 (1.0 - cfg.over_provisioning)));
  const uint64_t spare = geometry.pages_per_plane() - per_plane;
  if (per_plane == 0 ||
      spare < (gc_watermark_blocks(geometry, cfg) + 1) * ppb) {
    throw std::invalid_argument(
        "ftl.over_provisioning leaves fewer than gc_watermark + 1 spare "
        "blocks per plane");
  }
  return per_plane * geometry.planes();
}

uint32_t Ftl::plane_of_lpn(Lpn lpn) const {
  return stripe_to_plane_[lpn % stripe_to_plane_.size()];
}

std::optional<Ppn> Ftl::lookup(Lpn lpn) const {
  if (lpn >= l2p_.size() || l2p_[lpn] == kUnmapped) {
    return std::nullopt;
  }
  return l2p_[lpn];
}

bool Ftl::is_active(BlockId block) const {
  return blocks_[block].state == BlockState::Active;
}

bool Ftl::is_closed(BlockId block) const {
  return blocks_[block].state == BlockState::Closed;
}

Ppn Ftl::allocate(uint32_t plane) {
  auto &ps = planes_[plane];
  const uint64_t ppb = geometry_.pages_per_block();
  if (ps.active && blocks_[*ps.active].write_ptr >= ppb) {
    blocks_[*ps.active].state = BlockState::Closed;
    ps.active.reset();
  }
  if (!ps.active) {
    if (ps.free.empty()) {
      throw DeviceFullError("device full: plane " + std::to_string(plane) +
                            " has no free block after garbage collection");
    }
    ps.active = ps.free.front();
    ps.free.pop_front();
    blocks_[*ps.active].state = BlockState::Active;
  }
  auto &meta = blocks_[*ps.active];
  return uint64_t{*ps.active} * ppb + meta.write_ptr++;
}

void Ftl::seal_if_active(BlockId block) {
  auto &meta = blocks_[block];
  if (meta.state != BlockState::Active) {
    return;
  }
  meta.state = BlockState::Closed;
  planes_[plane_of_block(geometry_, block)].active.reset();
}

void Ftl::invalidate(Ppn ppn) {
  const BlockId b = block_of(geometry_, ppn);
  const WlIndex wl = page_in_block(geometry_, ppn) / geometry_.pages_per_wl;
  p2l_[ppn] = kUnmapped;
  --blocks_[b].valid;
  --blocks_[b].wl_valid[wl];
}

void Ftl::place(Lpn lpn, Ppn ppn) {
  const BlockId b = block_of(geometry_, ppn);
  const WlIndex wl = page_in_block(geometry_, ppn) / geometry_.pages_per_wl;
  l2p_[lpn] = ppn;
  p2l_[ppn] = lpn;
  ++blocks_[b].valid;
  ++blocks_[b].wl_valid[wl];
  auto &br = device_.block(b);
  br.mark_programmed(wl);
  // Data landing on an already-disturbed, partly programmed WL is lost.
  if (br.wl(wl).corrupted()) {
    report_corruption(b, wl);
  }
}

void Ftl::relocate(Ppn from, OpSource source, OpBatch &ops) {
  const Lpn lpn = p2l_[from];
  const uint32_t plane = plane_of_block(geometry_, block_of(geometry_, from));
  invalidate(from);
  const Ppn to = allocate(plane);
  place(lpn, to);
  ++counters_.programs;
  ops.push_back({OpKind::Read, source,
                 die_of_block(geometry_, block_of(geometry_, from)),
                 die_of_block(geometry_, block_of(geometry_, to))});
}

void Ftl::erase(BlockId block, OpSource source, OpBatch &ops) {
  auto &meta = blocks_[block];
  meta.state = BlockState::Free;
  meta.write_ptr = 0;
  meta.valid = 0;
  std::fill(meta.wl_valid.begin(), meta.wl_valid.end(), 0);
  std::fill(meta.corruption_reported.begin(), meta.corruption_reported.end(),
            false);
  meta.next_check = rr_cfg_.check_interval;
  device_.block(block).erase();
  rec_reset(recs_[block]);
  planes_[plane_of_block(geometry_, block)].free.push_back(block);
  ++counters_.erases;
  ops.push_back({OpKind::Erase, source, die_of_block(geometry_, block), {}});
}

std::optional<BlockId> Ftl::select_victim(uint32_t plane) const {
  std::optional<BlockId> best;
  const uint64_t ppb = geometry_.pages_per_block();
  const BlockId first = plane * geometry_.blocks_per_plane;
  for (BlockId b = first; b < first + geometry_.blocks_per_plane; ++b) {
    const auto &m = blocks_[b];
    if (m.state != BlockState::Closed || m.valid >= ppb) {
      continue;
    }
    if (!best || m.valid < blocks_[*best].valid) {
      best = b;
    }
  }
  return best;
}

void Ftl::collect_garbage(uint32_t plane, OpBatch &ops) {
  const uint64_t ppb = geometry_.pages_per_block();
  while (planes_[plane].free.size() < gc_watermark_) {
    const auto victim = select_victim(plane);
    if (!victim) {
      return;
    }
    const Ppn base = uint64_t{*victim} * ppb;
    uint64_t copied = 0;
    for (uint64_t off = 0; off < ppb; ++off) {
      if (p2l_[base + off] != kUnmapped) {
        relocate(base + off, OpSource::Gc, ops);
        ++copied;
      }
    }
    counters_.gc_copies += copied;
    events_.push_back({RrCause::Gc, *victim, std::nullopt, copied, now_us_,
                       rec_query_block(recs_[*victim])});
    erase(*victim, OpSource::Gc, ops);
  }
}

void Ftl::report_corruption(BlockId block, WlIndex wl) {
  auto &meta = blocks_[block];
  if (meta.corruption_reported[wl] || meta.wl_valid[wl] == 0) {
    return;
  }
  meta.corruption_reported[wl] = true;
  ++counters_.corruption_events;
}

void Ftl::prefill(Lpn count) {
  count = std::min<Lpn>(count, logical_pages_);
  for (Lpn lpn = 0; lpn < count; ++lpn) {
    if (l2p_[lpn] != kUnmapped) {
      invalidate(l2p_[lpn]);
    }
    place(lpn, allocate(plane_of_lpn(lpn)));
  }
}

void Ftl::host_read(Lpn lpn, double now_us, OpBatch &ops) {
  now_us_ = now_us;
  ++counters_.host_reads;
  const auto ppn = lookup(lpn);
  if (!ppn) {
    ++counters_.unmapped_reads;
    return;
  }
  const BlockId b = block_of(geometry_, *ppn);
  const WlIndex wl = page_in_block(geometry_, *ppn) / geometry_.pages_per_wl;
  ops.push_back({OpKind::Read, OpSource::Host, die_of_block(geometry_, b), {}});

  auto &br = device_.block(b);
  if (br.wl(wl).corrupted()) {
    report_corruption(b, wl);
  }
  crossed_.clear();
  br.apply_read_stress(wl, &crossed_);
  for (WlIndex w : crossed_) {
    report_corruption(b, w);
  }
  rec_record_read(recs_[b], wl);
  after_read(b, ops);
}

void Ftl::after_read(BlockId block, OpBatch &ops) {
  const uint64_t rc = rec_query_block(recs_[block]);
  const uint32_t plane = plane_of_block(geometry_, block);
  if (rr_cfg_.policy == RrPolicy::Block) {
    if (rc >= block_threshold_) {
      reclaim_block(block, ops);
      collect_garbage(plane, ops);
    }
    return;
  }
  auto &meta = blocks_[block];
  if (rc >= meta.next_check) {
    meta.next_check = rc + rr_cfg_.check_interval;
    rr_check(block, ops);
    collect_garbage(plane, ops);
  }
}

void Ftl::host_write(Lpn lpn, double now_us, OpBatch &ops) {
  now_us_ = now_us;
  if (lpn >= logical_pages_) {
    throw std::out_of_range("lpn " + std::to_string(lpn) +
                            " beyond logical capacity");
  }
  ++counters_.host_writes;
  const uint32_t plane = plane_of_lpn(lpn);
  if (l2p_[lpn] != kUnmapped) {
    invalidate(l2p_[lpn]);
  }
  const Ppn ppn = allocate(plane);
  place(lpn, ppn);
  ++counters_.programs;
  ops.push_back({OpKind::Program, OpSource::Host,
                 die_of_block(geometry_, block_of(geometry_, ppn)), {}});
  collect_garbage(plane, ops);
}

std::vector<WlIndex> Ftl::identify_disturbed_wls(BlockId block) const {
  std::vector<WlIndex> out;
  const auto &meta = blocks_[block];
  const auto &rec = recs_[block];
  const auto &br = device_.block(block);
  const uint64_t total = rec_query_block(rec);
  const uint32_t n = geometry_.wls_per_block;
  for (WlIndex i = 0; i < n; ++i) {
    if (meta.wl_valid[i] == 0) {
      continue;
    }
    const uint64_t prev = i > 0 ? rec_query_wl(rec, i - 1) : 0;
    const uint64_t next = i + 1 < n ? rec_query_wl(rec, i + 1) : 0;
    // The own-count term lowers r_nonadj, so it must not be overestimated.
    const uint64_t own = rec_lower_bound_wl(rec, i);
    const uint64_t r_adj = prev + next;
    const uint64_t sub = prev + own + next;
    const uint64_t r_nonadj = total > sub ? total - sub : 0;
    const auto params = rpt_.lookup(br.pec(), br.wl(i).group);
    const auto erc = effective_read_count(r_adj, r_nonadj, params.alpha);
    if (is_heavily_disturbed(erc, params.erc_max, params.alpha,
                             rr_cfg_.check_interval)) {
      out.push_back(i);
    }
  }
  return out;
}

RrEvent Ftl::reclaim_wl(BlockId block, WlIndex wl, OpBatch &ops) {
  RrEvent ev{RrCause::WlRr, block, wl, 0, now_us_,
             rec_query_block(recs_[block])};
  if (blocks_[block].wl_valid[wl] == 0) {
    return ev;
  }
  seal_if_active(block);
  const Ppn base = uint64_t{block} * geometry_.pages_per_block() +
                   uint64_t{wl} * geometry_.pages_per_wl;
  for (uint32_t p = 0; p < geometry_.pages_per_wl; ++p) {
    if (p2l_[base + p] != kUnmapped) {
      relocate(base + p, OpSource::Rr, ops);
      ++ev.pages_copied;
    }
  }
  counters_.wl_rr_copies += ev.pages_copied;
  ++counters_.wl_reclaims;
  events_.push_back(ev);
  return ev;
}

RrEvent Ftl::reclaim_block(BlockId block, OpBatch &ops) {
  RrEvent ev{RrCause::BlockRr, block, std::nullopt, 0, now_us_,
             rec_query_block(recs_[block])};
  seal_if_active(block);
  const uint64_t ppb = geometry_.pages_per_block();
  const Ppn base = uint64_t{block} * ppb;
  for (uint64_t off = 0; off < ppb; ++off) {
    if (p2l_[base + off] != kUnmapped) {
      relocate(base + off, OpSource::Rr, ops);
      ++ev.pages_copied;
    }
  }
  erase(block, OpSource::Rr, ops);
  counters_.block_rr_copies += ev.pages_copied;
  ++counters_.block_reclaims;
  events_.push_back(ev);
  return ev;
}

std::vector<RrEvent> Ftl::rr_check(BlockId block, OpBatch &ops) {
  ++counters_.rr_checks;
  std::vector<RrEvent> out;
  for (WlIndex wl : identify_disturbed_wls(block)) {
    out.push_back(reclaim_wl(block, wl, ops));
  }
  if (blocks_[block].valid == 0 && blocks_[block].state == BlockState::Closed) {
    erase(block, OpSource::Rr, ops);
  }
  return out;
}

void Ftl::verify_mapping() const {
  uint64_t live = 0;
  for (Lpn lpn = 0; lpn < l2p_.size(); ++lpn) {
    if (l2p_[lpn] == kUnmapped) {
      continue;
    }
    ++live;
    if (p2l_[l2p_[lpn]] != lpn) {
      throw std::logic_error("l2p/p2l mismatch at lpn " + std::to_string(lpn));
    }
  }
  const uint64_t ppb = geometry_.pages_per_block();
  uint64_t valid_total = 0;
  for (BlockId b = 0; b < blocks_.size(); ++b) {
    uint64_t valid = 0;
    std::vector<uint32_t> per_wl(geometry_.wls_per_block, 0);
    for (uint64_t off = 0; off < ppb; ++off) {
      const Lpn lpn = p2l_[uint64_t{b} * ppb + off];
      if (lpn == kUnmapped) {
        continue;
      }
      if (lpn >= l2p_.size() || l2p_[lpn] != uint64_t{b} * ppb + off) {
        throw std::logic_error("p2l entry without matching l2p in block " +
                               std::to_string(b));
      }
      ++valid;
      ++per_wl[off / geometry_.pages_per_wl];
    }
    if (valid != blocks_[b].valid || per_wl != blocks_[b].wl_valid) {
      throw std::logic_error("valid count mismatch in block " +
                             std::to_string(b));
    }
    valid_total += valid;
  }
  if (valid_total != live) {
    throw std::logic_error("valid pages do not match live lpn count");
  }
}

}  // namespace strawsim
