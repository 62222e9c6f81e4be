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

#include "strawsim/workload.hh"

#include <algorithm>
#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

#include "strawsim/random.hh"

namespace strawsim {

namespace {

struct Preset {
  const char *name;
  AccessPattern pattern;
  double read_ratio;
};

constexpr std::array<Preset, 6> kPresets = {{
    {"Syn1", AccessPattern::Random, 1.0},
    {"Syn2", AccessPattern::Mixed, 1.0},
    {"Ali121", AccessPattern::Sequential, 0.55},
    {"Ali124", AccessPattern::Mixed, 0.98},
    {"Ali188", AccessPattern::Sequential, 0.85},
    {"Ali206", AccessPattern::Random, 0.99},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && s.front() == ' ') {
    s.remove_prefix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

template <typename T>
bool parse_number(std::string_view s, T &out) {
  const auto *end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end && !s.empty();
}

}  // namespace

std::string_view to_string(AccessPattern p) {
  switch (p) {
    case AccessPattern::Sequential:
      return "sequential";
    case AccessPattern::Random:
      return "random";
    case AccessPattern::Mixed:
      return "mixed";
    case AccessPattern::Hotspot:
      return "hotspot";
  }
  return "?";
}

AccessPattern parse_access_pattern(std::string_view s) {
  if (s == "sequential") return AccessPattern::Sequential;
  if (s == "random") return AccessPattern::Random;
  if (s == "mixed") return AccessPattern::Mixed;
  if (s == "hotspot") return AccessPattern::Hotspot;
  throw std::invalid_argument("unknown access pattern '" + std::string(s) + "'");
}

std::optional<SyntheticSpec> synthetic_preset(std::string_view name) {
  for (const auto &p : kPresets) {
    if (name == p.name) {
      SyntheticSpec s;
      s.pattern = p.pattern;
      s.read_ratio = p.read_ratio;
      return s;
    }
  }
  return std::nullopt;
}

std::vector<std::string> synthetic_preset_names() {
  std::vector<std::string> out;
  for (const auto &p : kPresets) {
    out.emplace_back(p.name);
  }
  return out;
}

void validate_synthetic(const SyntheticSpec &spec, uint64_t logical_pages) {
  const uint64_t fp = spec.footprint == 0 ? logical_pages : spec.footprint;
  if (fp > logical_pages) {
    throw std::invalid_argument("workload.footprint exceeds logical capacity (" +
                                std::to_string(logical_pages) + " pages)");
  }
  if (spec.request_size < 1 || spec.request_size > fp) {
    throw std::invalid_argument(
        "workload.request_size must be in [1, footprint]");
  }
  if (!(spec.read_ratio >= 0.0 && spec.read_ratio <= 1.0)) {
    throw std::invalid_argument("workload.read_ratio must be in [0, 1]");
  }
  if (!(spec.mix_ratio >= 0.0 && spec.mix_ratio <= 1.0)) {
    throw std::invalid_argument("workload.mix_ratio must be in [0, 1]");
  }
  if (!(spec.hot_fraction >= 0.0 && spec.hot_fraction <= 1.0)) {
    throw std::invalid_argument("workload.hot_fraction must be in [0, 1]");
  }
  if (spec.pattern == AccessPattern::Hotspot &&
      (spec.hot_pages < spec.request_size ||
       spec.hot_offset + spec.hot_pages > fp)) {
    throw std::invalid_argument(
        "workload.hot_offset + hot_pages must lie within the footprint and "
        "hold one request");
  }
  if (!(spec.interarrival_us >= 0.0)) {
    throw std::invalid_argument("workload.interarrival_us must be >= 0");
  }
}

std::vector<TraceRecord> generate_synthetic(const SyntheticSpec &spec,
                                            uint64_t logical_pages) {
  validate_synthetic(spec, logical_pages);
  const uint64_t fp = spec.footprint == 0 ? logical_pages : spec.footprint;
  const uint64_t k = spec.request_size;
  // Separate streams keep the op mix independent of the offset draws.
  std::mt19937_64 op_rng(derive_seed(spec.seed, 1));
  std::mt19937_64 off_rng(derive_seed(spec.seed, 2));

  auto random_start = [&](uint64_t base, uint64_t span) {
    return base + uniform_index(off_rng, span - k + 1);
  };

  std::vector<TraceRecord> out;
  out.reserve(spec.op_count);
  uint64_t cursor = 0;
  for (uint64_t i = 0; i < spec.op_count; ++i) {
    TraceRecord r;
    r.timestamp_us = static_cast<double>(i) * spec.interarrival_us;
    r.op = unit_double(op_rng) < spec.read_ratio ? IoOp::Read : IoOp::Write;
    r.length = static_cast<uint32_t>(k);
    switch (spec.pattern) {
      case AccessPattern::Sequential:
        if (cursor + k > fp) {
          cursor = 0;
        }
        r.offset = cursor;
        cursor += k;
        break;
      case AccessPattern::Random:
        r.offset = random_start(0, fp);
        break;
      case AccessPattern::Mixed:
        if (unit_double(off_rng) >= spec.mix_ratio) {
          cursor = random_start(0, fp);
        } else if (cursor + k > fp) {
          cursor = 0;
        }
        r.offset = cursor;
        cursor += k;
        break;
      case AccessPattern::Hotspot:
        if (r.op == IoOp::Read && unit_double(off_rng) < spec.hot_fraction) {
          r.offset = random_start(spec.hot_offset, spec.hot_pages);
        } else {
          r.offset = random_start(0, fp);
        }
        break;
    }
    out.push_back(r);
  }
  return out;
}

ParsedTrace parse_trace(std::istream &in, const TraceFormat &fmt) {
  if (fmt.page_size == 0 || fmt.logical_pages == 0) {
    throw std::invalid_argument("trace format needs page_size and capacity");
  }
  ParsedTrace out;
  std::string line;
  size_t line_no = 0;

  constexpr std::array<const char *, 5> kColumns = {
      "device_id", "opcode", "offset_bytes", "length_bytes", "timestamp_us"};
  std::array<size_t, 5> col{};
  bool have_header = false;
  size_t width = 0;
  bool sorted = true;

  auto fail = [&](const std::string &msg) {
    throw TraceParseError("trace line " + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty()) {
      continue;
    }
    const auto fields = split_csv(view);
    if (!have_header) {
      for (size_t c = 0; c < kColumns.size(); ++c) {
        const auto it = std::find(fields.begin(), fields.end(), kColumns[c]);
        if (it == fields.end()) {
          fail(std::string("header is missing column '") + kColumns[c] + "'");
        }
        col[c] = static_cast<size_t>(it - fields.begin());
      }
      width = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != width) {
      fail("expected " + std::to_string(width) + " fields, got " +
           std::to_string(fields.size()));
    }
    if (!fmt.device_id.empty() && fields[col[0]] != fmt.device_id) {
      continue;
    }
    TraceRecord r;
    const auto opcode = fields[col[1]];
    if (opcode == "R") {
      r.op = IoOp::Read;
    } else if (opcode == "W") {
      r.op = IoOp::Write;
    } else {
      fail("opcode must be R or W, got '" + std::string(opcode) + "'");
    }
    uint64_t offset = 0;
    uint64_t length = 0;
    if (!parse_number(fields[col[2]], offset)) {
      fail("bad offset_bytes '" + std::string(fields[col[2]]) + "'");
    }
    if (!parse_number(fields[col[3]], length) || length == 0) {
      fail("bad length_bytes '" + std::string(fields[col[3]]) + "'");
    }
    if (!parse_number(fields[col[4]], r.timestamp_us) || r.timestamp_us < 0) {
      fail("bad timestamp_us '" + std::string(fields[col[4]]) + "'");
    }
    r.offset = offset / fmt.page_size % fmt.logical_pages;
    const uint64_t pages = (length + fmt.page_size - 1) / fmt.page_size;
    if (pages > fmt.logical_pages) {
      fail("request longer than the logical capacity");
    }
    r.length = static_cast<uint32_t>(pages);
    if (!out.records.empty() && r.timestamp_us < out.records.back().timestamp_us) {
      sorted = false;
    }
    out.records.push_back(r);
  }
  if (!sorted) {
    out.warnings.push_back("trace timestamps are not monotone; records sorted");
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const TraceRecord &a, const TraceRecord &b) {
                       return a.timestamp_us < b.timestamp_us;
                     });
  }
  return out;
}

void serialize_trace(std::ostream &out, const std::vector<TraceRecord> &records,
                     uint32_t page_size) {
  out << "device_id,opcode,offset_bytes,length_bytes,timestamp_us\n";
  std::array<char, 64> buf{};
  for (const auto &r : records) {
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(),
                                   r.timestamp_us);
    out << "0," << (r.op == IoOp::Read ? 'R' : 'W') << ','
        << r.offset * page_size << ',' << uint64_t{r.length} * page_size << ','
        << std::string_view(buf.data(), static_cast<size_t>(res.ptr - buf.data()))
        << '\n';
  }
}

}  // namespace strawsim
