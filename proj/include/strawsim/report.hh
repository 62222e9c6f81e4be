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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "strawsim/config.hh"
#include "strawsim/ftl.hh"

namespace strawsim {

struct LatencySummary {
  std::optional<double> p50;
  std::optional<double> p99;
  std::optional<double> p999;
  std::optional<double> max;
  std::optional<double> mean;
};

struct SimReport {
  std::string name;
  std::string workload_hash;
  nlohmann::json config;

  uint64_t total_reads = 0;
  uint64_t total_writes = 0;
  uint64_t block_rr_copies = 0;
  uint64_t wl_rr_copies = 0;
  uint64_t gc_page_copies = 0;
  uint64_t erases = 0;
  uint64_t corruption_events = 0;
  LatencySummary read_latency_us;
  uint64_t counter_footprint_bytes = 0;
  bool failed = false;

  // Secondary figures, reported under "extras".
  uint64_t requests = 0;
  uint64_t unmapped_reads = 0;
  uint64_t block_reclaims = 0;
  uint64_t wl_reclaims = 0;
  uint64_t rr_checks = 0;
  uint64_t block_rr_threshold = 0;
  uint64_t logical_pages = 0;
  uint64_t prefilled_pages = 0;
  double sim_time_us = 0;
  LatencySummary write_latency_us;

  uint64_t rr_page_copies() const { return block_rr_copies + wl_rr_copies; }
};

nlohmann::json report_to_json(const SimReport &r);
/// Throws ConfigError on missing or mistyped keys.
SimReport report_from_json(const nlohmann::json &j);

struct SimOutput {
  SimReport report;
  std::vector<RrEvent> events;
};

/// Builds the device, prefills the footprint, replays the workload and
/// collects the report. Throws ConfigError for bad configs or traces and
/// DeviceFullError if GC cannot keep up.
SimOutput run_simulation(const RunConfig &config);

/// Same, with an already materialized workload.
SimOutput run_simulation(const RunConfig &config,
                         const std::vector<TraceRecord> &records);

/// Workload records for `config` (synthetic or parsed trace).
std::vector<TraceRecord> load_workload(const RunConfig &config,
                                       std::vector<std::string> *warnings);

struct CompareRow {
  std::string config_name;
  std::optional<double> rr_copies_ratio;
  std::optional<double> p999_ratio;
  uint64_t corruption_events = 0;
};

/// Ratios against reports[0]. Throws ConfigError when workload hashes
/// differ or fewer than two reports are given.
std::vector<CompareRow> compare_reports(const std::vector<SimReport> &reports);

}  // namespace strawsim
