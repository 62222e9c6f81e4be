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

#include "strawsim/sim_engine.hh"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <stdexcept>
#include <string>

namespace strawsim {

void LatencyStats::record(double us) {
  ++count_;
  sum_ += us;
  max_ = std::max(max_, us);
  if (binned_) {
    ++bins_[static_cast<uint64_t>(us)];
    return;
  }
  samples_.push_back(us);
  sorted_ = false;
  if (samples_.size() >= kExactLimit) {
    spill();
  }
}

void LatencyStats::spill() {
  for (double s : samples_) {
    ++bins_[static_cast<uint64_t>(s)];
  }
  samples_.clear();
  samples_.shrink_to_fit();
  binned_ = true;
}

std::optional<double> LatencyStats::mean() const {
  if (count_ == 0) {
    return std::nullopt;
  }
  return sum_ / static_cast<double>(count_);
}

std::optional<double> LatencyStats::max() const {
  if (count_ == 0) {
    return std::nullopt;
  }
  return max_;
}

std::optional<double> LatencyStats::percentile(double q) const {
  if (count_ == 0) {
    return std::nullopt;
  }
  if (!(q > 0.0 && q <= 100.0)) {
    throw std::invalid_argument("percentile q must be in (0, 100]");
  }
  auto rank = static_cast<uint64_t>(std::ceil(q / 100.0 * static_cast<double>(count_)));
  rank = std::clamp<uint64_t>(rank, 1, count_);
  if (!binned_) {
    if (!sorted_) {
      std::sort(samples_.begin(), samples_.end());
      sorted_ = true;
    }
    return samples_[rank - 1];
  }
  uint64_t seen = 0;
  for (const auto &[bin, n] : bins_) {
    seen += n;
    if (seen >= rank) {
      return static_cast<double>(bin);
    }
  }
  return max_;
}

std::string_view to_string(ReplayMode m) {
  return m == ReplayMode::Open ? "open" : "closed";
}

ReplayMode parse_replay_mode(std::string_view s) {
  if (s == "open") return ReplayMode::Open;
  if (s == "closed") return ReplayMode::Closed;
  throw std::invalid_argument("unknown replay mode '" + std::string(s) + "'");
}

namespace {

constexpr uint8_t kCompletion = 0;
constexpr uint8_t kArrival = 1;
constexpr uint64_t kNoRequest = ~uint64_t{0};

struct Event {
  uint64_t t;
  uint8_t kind;
  uint64_t seq;
  uint64_t id;

  bool operator>(const Event &o) const {
    if (t != o.t) return t > o.t;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

struct Cmd {
  OpKind kind;
  std::optional<uint32_t> then_program_die;
  uint64_t request = kNoRequest;
};

struct Die {
  std::deque<Cmd> queue;
  bool busy = false;
  Cmd current{};
};

uint64_t to_ns(double us) { return static_cast<uint64_t>(std::llround(us * 1000.0)); }

class Engine {
 public:
  Engine(Ftl &ftl, const Geometry &g, const TimingParams &timing,
         const std::vector<TraceRecord> &records, const ReplayConfig &cfg)
      : ftl_(ftl),
        geometry_(g),
        records_(records),
        cfg_(cfg),
        t_read_(to_ns(timing.t_read_us)),
        t_prog_(to_ns(timing.t_prog_us)),
        t_erase_(to_ns(timing.t_erase_us)),
        t_xfer_(timing.channel_transfer_ns(g.page_size)),
        dies_(g.dies()),
        channel_free_(g.channels, 0),
        pending_(records.size(), 0),
        arrival_(records.size(), 0) {
    if (cfg_.mode == ReplayMode::Closed && cfg_.queue_depth < 1) {
      throw std::invalid_argument("replay.queue_depth must be >= 1");
    }
  }

  ReplayResult run() {
    if (cfg_.mode == ReplayMode::Open) {
      if (!records_.empty()) {
        push(to_ns(records_[0].timestamp_us), kArrival, 0);
      }
      next_ = 1;
    } else {
      const size_t n = std::min<size_t>(cfg_.queue_depth, records_.size());
      for (size_t i = 0; i < n; ++i) {
        push(0, kArrival, i);
      }
      next_ = n;
    }
    while (!events_.empty()) {
      const Event ev = events_.top();
      events_.pop();
      now_ = ev.t;
      if (ev.kind == kArrival) {
        arrive(ev.id);
      } else {
        complete(static_cast<uint32_t>(ev.id));
      }
    }
    result_.end_time_us = static_cast<double>(last_completion_) / 1000.0;
    return std::move(result_);
  }

 private:
  void push(uint64_t t, uint8_t kind, uint64_t id) {
    events_.push({t, kind, seq_++, id});
  }

  void arrive(uint64_t idx) {
    const auto &rec = records_[idx];
    ++result_.requests;
    arrival_[idx] = now_;
    if (cfg_.mode == ReplayMode::Open && next_ < records_.size()) {
      push(std::max(now_, to_ns(records_[next_].timestamp_us)), kArrival, next_);
      ++next_;
    }
    const double now_us = static_cast<double>(now_) / 1000.0;
    const uint64_t logical = ftl_.logical_pages();
    for (uint32_t i = 0; i < rec.length; ++i) {
      const Lpn lpn = (rec.offset + i) % logical;
      batch_.clear();
      if (rec.op == IoOp::Read) {
        ftl_.host_read(lpn, now_us, batch_);
      } else {
        ftl_.host_write(lpn, now_us, batch_);
      }
      for (const auto &op : batch_) {
        const bool host = op.source == OpSource::Host;
        if (host) {
          ++pending_[idx];
        }
        enqueue(op.die, {op.kind, op.then_program_die, host ? idx : kNoRequest});
      }
    }
    if (pending_[idx] == 0) {
      finish(idx);
    }
    for (uint32_t d = 0; d < dies_.size(); ++d) {
      dispatch(d);
    }
  }

  void enqueue(uint32_t die, const Cmd &cmd) {
    dies_[die].queue.push_back(cmd);
  }

  void dispatch(uint32_t d) {
    auto &die = dies_[d];
    if (die.busy || die.queue.empty()) {
      return;
    }
    die.current = die.queue.front();
    die.queue.pop_front();
    die.busy = true;
    uint64_t &chan = channel_free_[d / geometry_.dies_per_channel];
    uint64_t done = 0;
    switch (die.current.kind) {
      case OpKind::Read: {
        const uint64_t xfer = std::max(now_ + t_read_, chan);
        chan = xfer + t_xfer_;
        done = chan;
        ++result_.flash_reads;
        break;
      }
      case OpKind::Program: {
        const uint64_t xfer = std::max(now_, chan);
        chan = xfer + t_xfer_;
        done = chan + t_prog_;
        ++result_.flash_programs;
        break;
      }
      case OpKind::Erase:
        done = now_ + t_erase_;
        ++result_.flash_erases;
        break;
    }
    push(done, kCompletion, d);
  }

  void complete(uint32_t d) {
    auto &die = dies_[d];
    const Cmd cmd = die.current;
    die.busy = false;
    last_completion_ = std::max(last_completion_, now_);
    if (cmd.then_program_die) {
      enqueue(*cmd.then_program_die, {OpKind::Program, std::nullopt, kNoRequest});
      dispatch(*cmd.then_program_die);
    }
    if (cmd.request != kNoRequest && --pending_[cmd.request] == 0) {
      finish(cmd.request);
    }
    dispatch(d);
  }

  void finish(uint64_t idx) {
    const double us = static_cast<double>(now_ - arrival_[idx]) / 1000.0;
    if (records_[idx].op == IoOp::Read) {
      result_.read_latency.record(us);
    } else {
      result_.write_latency.record(us);
    }
    if (cfg_.mode == ReplayMode::Closed && next_ < records_.size()) {
      push(now_, kArrival, next_);
      ++next_;
    }
  }

  Ftl &ftl_;
  const Geometry &geometry_;
  const std::vector<TraceRecord> &records_;
  ReplayConfig cfg_;
  uint64_t t_read_;
  uint64_t t_prog_;
  uint64_t t_erase_;
  uint64_t t_xfer_;

  std::vector<Die> dies_;
  std::vector<uint64_t> channel_free_;
  std::vector<uint32_t> pending_;
  std::vector<uint64_t> arrival_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  OpBatch batch_;
  uint64_t now_ = 0;
  uint64_t seq_ = 0;
  size_t next_ = 0;
  uint64_t last_completion_ = 0;
  ReplayResult result_;
};

}  // namespace

ReplayResult replay(Ftl &ftl, const Geometry &geometry,
                    const TimingParams &timing,
                    const std::vector<TraceRecord> &records,
                    const ReplayConfig &cfg) {
  return Engine(ftl, geometry, timing, records, cfg).run();
}

}  // namespace strawsim
