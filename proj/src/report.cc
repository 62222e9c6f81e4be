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

#include "strawsim/report.hh"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "strawsim/device_model.hh"
#include "strawsim/disturbance_model.hh"
#include "strawsim/rec.hh"
#include "strawsim/sim_engine.hh"

namespace strawsim {

using nlohmann::json;

namespace {

json opt(const std::optional<double> &v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> opt_from(const json &j) {
  if (j.is_null()) {
    return std::nullopt;
  }
  return j.get<double>();
}

json latency_json(const LatencySummary &s) {
  return {{"p50", opt(s.p50)},
          {"p99", opt(s.p99)},
          {"p999", opt(s.p999)},
          {"max", opt(s.max)},
          {"mean", opt(s.mean)}};
}

LatencySummary latency_from(const json &j) {
  LatencySummary s;
  s.p50 = opt_from(j.at("p50"));
  s.p99 = opt_from(j.at("p99"));
  s.p999 = opt_from(j.at("p999"));
  s.max = opt_from(j.at("max"));
  s.mean = opt_from(j.at("mean"));
  return s;
}

LatencySummary summarize(const LatencyStats &st) {
  return {st.percentile(50), st.percentile(99), st.percentile(99.9), st.max(),
          st.mean()};
}

std::optional<double> ratio(double value, double base) {
  if (base == 0) {
    return value == 0 ? std::optional<double>(1.0) : std::nullopt;
  }
  return value / base;
}

}  // namespace

json report_to_json(const SimReport &r) {
  json j;
  j["name"] = r.name;
  j["workload_hash"] = r.workload_hash;
  j["config"] = r.config;
  j["total_reads"] = r.total_reads;
  j["total_writes"] = r.total_writes;
  j["rr_page_copies"] = {{"block_rr", r.block_rr_copies},
                         {"wl_rr", r.wl_rr_copies}};
  j["gc_page_copies"] = r.gc_page_copies;
  j["erases"] = r.erases;
  j["corruption_events"] = r.corruption_events;
  j["read_latency_us"] = latency_json(r.read_latency_us);
  j["counter_footprint_bytes"] = r.counter_footprint_bytes;
  j["failed"] = r.failed;
  j["extras"] = {{"requests", r.requests},
                 {"unmapped_reads", r.unmapped_reads},
                 {"block_reclaims", r.block_reclaims},
                 {"wl_reclaims", r.wl_reclaims},
                 {"rr_checks", r.rr_checks},
                 {"block_rr_threshold", r.block_rr_threshold},
                 {"logical_pages", r.logical_pages},
                 {"prefilled_pages", r.prefilled_pages},
                 {"sim_time_us", r.sim_time_us},
                 {"write_latency_us", latency_json(r.write_latency_us)}};
  return j;
}

SimReport report_from_json(const json &j) {
  SimReport r;
  try {
    r.name = j.at("name").get<std::string>();
    r.workload_hash = j.at("workload_hash").get<std::string>();
    r.config = j.at("config");
    r.total_reads = j.at("total_reads").get<uint64_t>();
    r.total_writes = j.at("total_writes").get<uint64_t>();
    r.block_rr_copies = j.at("rr_page_copies").at("block_rr").get<uint64_t>();
    r.wl_rr_copies = j.at("rr_page_copies").at("wl_rr").get<uint64_t>();
    r.gc_page_copies = j.at("gc_page_copies").get<uint64_t>();
    r.erases = j.at("erases").get<uint64_t>();
    r.corruption_events = j.at("corruption_events").get<uint64_t>();
    r.read_latency_us = latency_from(j.at("read_latency_us"));
    r.counter_footprint_bytes = j.at("counter_footprint_bytes").get<uint64_t>();
    r.failed = j.at("failed").get<bool>();
    if (j.contains("extras")) {
      const auto &x = j.at("extras");
      r.requests = x.value("requests", uint64_t{0});
      r.unmapped_reads = x.value("unmapped_reads", uint64_t{0});
      r.block_reclaims = x.value("block_reclaims", uint64_t{0});
      r.wl_reclaims = x.value("wl_reclaims", uint64_t{0});
      r.rr_checks = x.value("rr_checks", uint64_t{0});
      r.block_rr_threshold = x.value("block_rr_threshold", uint64_t{0});
      r.logical_pages = x.value("logical_pages", uint64_t{0});
      r.prefilled_pages = x.value("prefilled_pages", uint64_t{0});
      r.sim_time_us = x.value("sim_time_us", 0.0);
      if (x.contains("write_latency_us")) {
        r.write_latency_us = latency_from(x.at("write_latency_us"));
      }
    }
  } catch (const json::exception &e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::vector<TraceRecord> load_workload(const RunConfig &config,
                                       std::vector<std::string> *warnings) {
  const uint64_t logical = Ftl::logical_capacity(config.geometry, config.ftl);
  if (config.workload.kind == WorkloadKind::Synthetic) {
    return generate_synthetic(resolved_synthetic(config), logical);
  }
  std::ifstream in(config.workload.path);
  if (!in) {
    throw ConfigError("cannot open trace '" + config.workload.path + "'");
  }
  TraceFormat fmt;
  fmt.page_size = config.geometry.page_size;
  fmt.logical_pages = logical;
  fmt.device_id = config.workload.device_id;
  auto parsed = parse_trace(in, fmt);
  if (warnings) {
    for (auto &w : parsed.warnings) {
      warnings->push_back(std::move(w));
    }
  }
  return std::move(parsed.records);
}

SimOutput run_simulation(const RunConfig &config) {
  validate_config(config);
  return run_simulation(config, load_workload(config, nullptr));
}

SimOutput run_simulation(const RunConfig &config,
                         const std::vector<TraceRecord> &records) {
  validate_config(config);
  DeviceModel device(config.geometry, config.reliability, config.initial_pec);
  const Rpt rpt = build_rpt(config);
  Ftl ftl(config.geometry, config.ftl, config.rr, rpt, device);

  uint64_t prefill = 0;
  if (config.workload.kind == WorkloadKind::Synthetic) {
    prefill = resolved_synthetic(config).footprint;
  } else {
    for (const auto &r : records) {
      prefill = std::max<uint64_t>(prefill, r.offset + r.length);
    }
  }
  prefill = std::min(prefill, ftl.logical_pages());
  ftl.prefill(prefill);

  auto result = replay(ftl, config.geometry, config.timing, records, config.replay);

  const auto &c = ftl.counters();
  if (c.programs != c.host_writes + c.gc_copies + c.block_rr_copies + c.wl_rr_copies) {
    throw std::logic_error("accounting closure violated: programs != host "
                           "writes + GC copies + RR copies");
  }

  SimOutput out;
  auto &r = out.report;
  r.name = config.name;
  r.workload_hash = workload_hash(config);
  r.config = config_to_json(config);
  r.total_reads = c.host_reads;
  r.total_writes = c.host_writes;
  r.block_rr_copies = c.block_rr_copies;
  r.wl_rr_copies = c.wl_rr_copies;
  r.gc_page_copies = c.gc_copies;
  r.erases = c.erases;
  r.corruption_events = c.corruption_events;
  r.read_latency_us = summarize(result.read_latency);
  r.counter_footprint_bytes =
      config.rr.policy == RrPolicy::Block
          ? config.geometry.blocks() * 3
          : rec_memory_footprint(config.geometry, config.rr.backend,
                                 config.rr.entries_per_block);
  r.failed = ftl.failed();
  r.requests = result.requests;
  r.unmapped_reads = c.unmapped_reads;
  r.block_reclaims = c.block_reclaims;
  r.wl_reclaims = c.wl_reclaims;
  r.rr_checks = c.rr_checks;
  r.block_rr_threshold = ftl.block_threshold();
  r.logical_pages = ftl.logical_pages();
  r.prefilled_pages = prefill;
  r.sim_time_us = result.end_time_us;
  r.write_latency_us = summarize(result.write_latency);
  out.events = ftl.events();
  return out;
}

std::vector<CompareRow> compare_reports(const std::vector<SimReport> &reports) {
  if (reports.size() < 2) {
    throw ConfigError("compare needs at least two reports");
  }
  const auto &base = reports.front();
  for (const auto &r : reports) {
    if (r.workload_hash != base.workload_hash) {
      throw ConfigError("workload hash mismatch: '" + r.name + "' (" +
                        r.workload_hash + ") vs baseline '" + base.name +
                        "' (" + base.workload_hash + ")");
    }
  }
  std::vector<CompareRow> rows;
  for (const auto &r : reports) {
    CompareRow row;
    row.config_name = r.name;
    row.rr_copies_ratio = ratio(static_cast<double>(r.rr_page_copies()),
                                static_cast<double>(base.rr_page_copies()));
    if (r.read_latency_us.p999 && base.read_latency_us.p999) {
      row.p999_ratio = ratio(*r.read_latency_us.p999, *base.read_latency_us.p999);
    }
    row.corruption_events = r.corruption_events;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace strawsim
