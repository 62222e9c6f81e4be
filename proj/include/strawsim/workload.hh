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
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "strawsim/types.hh"

namespace strawsim {

enum class IoOp : uint8_t { Read, Write };

struct TraceRecord {
  double timestamp_us = 0;
  IoOp op = IoOp::Read;
  Lpn offset = 0;
  uint32_t length = 1;

  bool operator==(const TraceRecord &) const = default;
};

enum class AccessPattern { Sequential, Random, Mixed, Hotspot };

std::string_view to_string(AccessPattern p);
/// Throws std::invalid_argument on unknown names.
AccessPattern parse_access_pattern(std::string_view s);

struct SyntheticSpec {
  AccessPattern pattern = AccessPattern::Random;
  double read_ratio = 1.0;
  /// Pages; 0 means the whole logical capacity.
  uint64_t footprint = 0;
  uint64_t op_count = 100'000;
  uint32_t request_size = 1;
  /// Mixed: probability that a request continues the sequential run.
  double mix_ratio = 0.5;
  /// Hotspot: reads hit [hot_offset, hot_offset + hot_pages) with
  /// probability hot_fraction, else a uniform page of the footprint.
  uint64_t hot_offset = 0;
  uint64_t hot_pages = 1;
  double hot_fraction = 1.0;
  uint64_t seed = 1;
  /// Spacing of synthesized timestamps; 0 for back-to-back.
  double interarrival_us = 0;

  bool operator==(const SyntheticSpec &) const = default;
};

/// Named access profiles: Syn1, Syn2, Ali121, Ali124, Ali188, Ali206.
/// Only pattern and read_ratio are set.
std::optional<SyntheticSpec> synthetic_preset(std::string_view name);
std::vector<std::string> synthetic_preset_names();

/// Throws std::invalid_argument if the spec is inconsistent or the footprint
/// exceeds `logical_pages`.
void validate_synthetic(const SyntheticSpec &spec, uint64_t logical_pages);

std::vector<TraceRecord> generate_synthetic(const SyntheticSpec &spec,
                                            uint64_t logical_pages);

/// Trace CSV thrown on malformed input; what() carries the line number.
class TraceParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceFormat {
  uint32_t page_size = 16384;
  /// Logical capacity in pages; offsets wrap modulo this.
  uint64_t logical_pages = 0;
  /// Keep only rows of this device; empty keeps everything.
  std::string device_id;
};

struct ParsedTrace {
  std::vector<TraceRecord> records;
  std::vector<std::string> warnings;
};

/// Reads CSV with a header naming device_id, opcode, offset_bytes,
/// length_bytes and timestamp_us in any order. Offsets round down to a page,
/// lengths round up. Out-of-order timestamps are stable-sorted with a
/// warning.
ParsedTrace parse_trace(std::istream &in, const TraceFormat &fmt);

/// Writes records in the format parse_trace reads, device_id "0".
void serialize_trace(std::ostream &out, const std::vector<TraceRecord> &records,
                     uint32_t page_size);

}  // namespace strawsim
