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
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "strawsim/ftl.hh"
#include "strawsim/types.hh"
#include "strawsim/workload.hh"

namespace strawsim {

/// Latency samples in microseconds. Samples are kept exactly up to
/// kExactLimit, after which everything moves into 1 us bins.
class LatencyStats {
 public:
  static constexpr size_t kExactLimit = 10'000'000;

  void record(double us);

  uint64_t count() const { return count_; }
  std::optional<double> mean() const;
  std::optional<double> max() const;
  /// Nearest rank: the ceil(q / 100 * N)-th smallest sample, q in (0, 100].
  /// nullopt when nothing was recorded.
  std::optional<double> percentile(double q) const;

 private:
  void spill();

  uint64_t count_ = 0;
  double sum_ = 0;
  double max_ = 0;
  mutable std::vector<double> samples_;
  mutable bool sorted_ = true;
  bool binned_ = false;
  std::map<uint64_t, uint64_t> bins_;
};

enum class ReplayMode { Open, Closed };

std::string_view to_string(ReplayMode m);
ReplayMode parse_replay_mode(std::string_view s);

struct ReplayConfig {
  /// Open: requests arrive at their timestamps. Closed: queue_depth
  /// requests stay outstanding and timestamps are ignored.
  ReplayMode mode = ReplayMode::Open;
  uint32_t queue_depth = 32;

  bool operator==(const ReplayConfig &) const = default;
};

struct ReplayResult {
  LatencyStats read_latency;
  LatencyStats write_latency;
  /// Completion time of the last flash command.
  double end_time_us = 0;
  uint64_t requests = 0;
  uint64_t flash_reads = 0;
  uint64_t flash_programs = 0;
  uint64_t flash_erases = 0;
};

/// Discrete-event replay of `records` against `ftl`.
///
/// Each die serves a FIFO queue, one command at a time; transfers are
/// serialized per channel. A read holds its die for t_read plus the transfer
/// out, a program for the transfer in plus t_prog. FTL work triggered by a
/// request is queued right behind that request's own commands. Time is kept
/// in integer nanoseconds, so results are reproducible bit for bit.
ReplayResult replay(Ftl &ftl, const Geometry &geometry,
                    const TimingParams &timing,
                    const std::vector<TraceRecord> &records,
                    const ReplayConfig &cfg);

}  // namespace strawsim
