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

#include "strawsim/cli.hh"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "strawsim/config.hh"
#include "strawsim/device_model.hh"
#include "strawsim/report.hh"
#include "strawsim/workload.hh"

namespace strawsim {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr size_t kSweepCap = 64;

struct CommonArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
};

void add_common(CLI::App *cmd, CommonArgs &a) {
  cmd->add_option("--config", a.config, "Run config (JSON)");
  cmd->add_option("--override", a.overrides, "Patch a config key: key=value")
      ->allow_extra_args(false);
}

RunConfig load_checked(const CommonArgs &a, std::ostream &err) {
  RunConfig c = load_config(a.config, a.overrides);
  validate_config(c);
  for (const auto &w : config_warnings(c)) {
    err << "warning: " << w << '\n';
  }
  return c;
}

void write_file(const std::string &path, const std::string &data) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw ConfigError("cannot write '" + path + "'");
  }
  f << data;
}

std::string fmt_opt(const std::optional<double> &v) {
  if (!v) {
    return "";
  }
  std::ostringstream s;
  s << std::setprecision(10) << *v;
  return s.str();
}

SimOutput run_with_warnings(const RunConfig &c, std::ostream &err) {
  std::vector<std::string> warnings;
  auto records = load_workload(c, &warnings);
  for (const auto &w : warnings) {
    err << "warning: " << w << '\n';
  }
  return run_simulation(c, records);
}

int cmd_run(const CommonArgs &a, const std::string &events_path,
            std::ostream &out, std::ostream &err) {
  const RunConfig c = load_checked(a, err);
  const auto result = run_with_warnings(c, err);
  const std::string text = report_to_json(result.report).dump(2) + "\n";
  const std::string path = !a.out.empty() ? a.out : c.output;
  if (path.empty()) {
    out << text;
  } else {
    write_file(path, text);
  }
  if (!events_path.empty()) {
    std::ostringstream csv;
    write_events_csv(csv, result.events);
    write_file(events_path, csv.str());
  }
  if (result.report.failed) {
    err << "FAILED: " << result.report.corruption_events
        << " corruption event(s)\n";
    return kExitFailedRun;
  }
  return kExitOk;
}

struct Axis {
  std::string key;
  std::vector<std::string> values;
};

Axis parse_axis(const std::string &spec, std::ostream &err) {
  const size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw ConfigError("axis '" + spec + "' must look like key=v1,v2");
  }
  Axis axis;
  axis.key = spec.substr(0, eq);
  std::stringstream ss(spec.substr(eq + 1));
  std::string v;
  while (std::getline(ss, v, ',')) {
    if (std::find(axis.values.begin(), axis.values.end(), v) != axis.values.end()) {
      err << "warning: duplicate value '" << v << "' on axis " << axis.key
          << " dropped\n";
      continue;
    }
    axis.values.push_back(v);
  }
  return axis;
}

std::string sanitize(std::string s) {
  for (char &ch : s) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' &&
        ch != '_' && ch != '.') {
      ch = '_';
    }
  }
  return s;
}

int cmd_sweep(const CommonArgs &a, const std::vector<std::string> &axis_specs,
              unsigned jobs, std::ostream &out, std::ostream &err) {
  if (a.out.empty()) {
    throw ConfigError("sweep needs --out DIR");
  }
  std::vector<Axis> axes;
  size_t cells = 1;
  for (const auto &s : axis_specs) {
    axes.push_back(parse_axis(s, err));
    cells *= axes.back().values.size();
    if (cells > kSweepCap) {
      throw ConfigError("sweep has more than " + std::to_string(kSweepCap) +
                        " cells");
    }
  }

  struct Cell {
    std::vector<std::string> assignment;
    RunConfig config;
    std::string file;
    std::optional<SimReport> report;
    std::string error;
  };
  std::vector<Cell> grid(cells);
  for (size_t i = 0; i < cells; ++i) {
    size_t rest = i;
    auto overrides = a.overrides;
    std::string suffix;
    for (size_t k = axes.size(); k-- > 0;) {
      const auto &ax = axes[k];
      const auto &v = ax.values[rest % ax.values.size()];
      rest /= ax.values.size();
      grid[i].assignment.insert(grid[i].assignment.begin(), v);
    }
    for (size_t k = 0; k < axes.size(); ++k) {
      overrides.push_back(axes[k].key + "=" + grid[i].assignment[k]);
      suffix += "_" + axes[k].key + "=" + grid[i].assignment[k];
    }
    RunConfig c = load_config(a.config, overrides);
    c.name += suffix;
    validate_config(c);
    grid[i].config = c;
    grid[i].file = std::to_string(i) + "_" + sanitize(c.name) + ".json";
  }

  fs::create_directories(a.out);
  std::atomic<size_t> next{0};
  std::mutex err_mu;
  auto worker = [&] {
    for (size_t i = next++; i < grid.size(); i = next++) {
      auto &cell = grid[i];
      try {
        auto result = run_simulation(cell.config);
        write_file((fs::path(a.out) / cell.file).string(),
                   report_to_json(result.report).dump(2) + "\n");
        cell.report = std::move(result.report);
      } catch (const std::exception &e) {
        cell.error = e.what();
      }
      std::lock_guard<std::mutex> lock(err_mu);
      err << "[" << (i + 1) << "/" << grid.size() << "] " << cell.config.name
          << (cell.error.empty() ? "" : " error: " + cell.error) << '\n';
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, grid.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back(worker);
  }
  for (auto &t : pool) {
    t.join();
  }

  std::ostringstream csv;
  csv << "cell,name";
  for (const auto &ax : axes) {
    csv << ',' << ax.key;
  }
  csv << ",workload_hash,total_reads,total_writes,block_rr_copies,"
         "wl_rr_copies,rr_page_copies,gc_page_copies,erases,"
         "corruption_events,read_p50_us,read_p99_us,read_p999_us,"
         "read_max_us,read_mean_us,counter_footprint_bytes,failed,error\n";
  bool any_failed = false;
  bool any_error = false;
  for (size_t i = 0; i < grid.size(); ++i) {
    const auto &cell = grid[i];
    csv << i << ',' << cell.config.name;
    for (const auto &v : cell.assignment) {
      csv << ',' << v;
    }
    if (!cell.report) {
      any_error = true;
      std::string msg = cell.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      csv << ",,,,,,,,,,,,,,,,," << msg << '\n';
      continue;
    }
    const auto &r = *cell.report;
    any_failed = any_failed || r.failed;
    csv << ',' << r.workload_hash << ',' << r.total_reads << ','
        << r.total_writes << ',' << r.block_rr_copies << ',' << r.wl_rr_copies
        << ',' << r.rr_page_copies() << ',' << r.gc_page_copies << ','
        << r.erases << ',' << r.corruption_events << ','
        << fmt_opt(r.read_latency_us.p50) << ',' << fmt_opt(r.read_latency_us.p99)
        << ',' << fmt_opt(r.read_latency_us.p999) << ','
        << fmt_opt(r.read_latency_us.max) << ','
        << fmt_opt(r.read_latency_us.mean) << ',' << r.counter_footprint_bytes
        << ',' << (r.failed ? "true" : "false") << ",\n";
  }
  write_file((fs::path(a.out) / "summary.csv").string(), csv.str());
  out << "wrote " << grid.size() << " report(s) and summary.csv to " << a.out
      << '\n';
  if (any_error) {
    return kExitUsage;
  }
  return any_failed ? kExitFailedRun : kExitOk;
}

int cmd_compare(const std::vector<std::string> &paths, const std::string &csv_out,
                std::ostream &out) {
  std::vector<SimReport> reports;
  for (const auto &p : paths) {
    std::ifstream in(p);
    if (!in) {
      throw ConfigError("cannot open report '" + p + "'");
    }
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error &e) {
      throw ConfigError("report '" + p + "' is not valid JSON: " + e.what());
    }
    reports.push_back(report_from_json(j));
  }
  const auto rows = compare_reports(reports);

  std::ostringstream csv;
  csv << "config_name,rr_copies_ratio,p999_ratio,corruption_events\n";
  for (const auto &r : rows) {
    csv << r.config_name << ',' << fmt_opt(r.rr_copies_ratio) << ','
        << fmt_opt(r.p999_ratio) << ',' << r.corruption_events << '\n';
  }
  if (!csv_out.empty()) {
    write_file(csv_out, csv.str());
  }

  size_t width = std::string("config_name").size();
  for (const auto &r : rows) {
    width = std::max(width, r.config_name.size());
  }
  auto cell = [](const std::optional<double> &v) {
    return v ? fmt_opt(v) : std::string("n/a");
  };
  out << std::left << std::setw(static_cast<int>(width) + 2) << "config_name"
      << std::setw(18) << "rr_copies_ratio" << std::setw(14) << "p999_ratio"
      << "corruption_events\n";
  for (const auto &r : rows) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << r.config_name
        << std::setw(18) << cell(r.rr_copies_ratio) << std::setw(14)
        << cell(r.p999_ratio) << r.corruption_events << '\n';
  }
  out << "(baseline: " << rows.front().config_name << ")\n";
  return kExitOk;
}

int cmd_gen_trace(const CommonArgs &a, std::ostream &out, std::ostream &err) {
  const RunConfig c = load_checked(a, err);
  if (c.workload.kind != WorkloadKind::Synthetic) {
    throw ConfigError("gen-trace needs a synthetic workload");
  }
  const auto records = load_workload(c, nullptr);
  std::ostringstream csv;
  serialize_trace(csv, records, c.geometry.page_size);
  if (a.out.empty()) {
    out << csv.str();
  } else {
    write_file(a.out, csv.str());
  }
  return kExitOk;
}

int cmd_dump_ground_truth(const CommonArgs &a, std::ostream &out,
                          std::ostream &err) {
  const RunConfig c = load_checked(a, err);
  DeviceModel device(c.geometry, c.reliability, c.initial_pec);
  std::ostringstream csv;
  device.dump_ground_truth_csv(csv);
  if (a.out.empty()) {
    out << csv.str();
  } else {
    write_file(a.out, csv.str());
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out,
            std::ostream &err) {
  CLI::App app{"Trace-driven SSD simulator for read-disturbance management"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string events_path;
  auto *run = app.add_subcommand("run", "Run one simulation and write a report");
  add_common(run, run_args);
  run->add_option("--out", run_args.out, "Report path (default: stdout)");
  run->add_option("--events", events_path, "Write the RR/GC event log as CSV");

  CommonArgs sweep_args;
  std::vector<std::string> axes;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto *sweep = app.add_subcommand("sweep", "Run a cross-product of overrides");
  add_common(sweep, sweep_args);
  sweep->add_option("--axis", axes, "key=v1,v2,... (repeatable)")
      ->required()
      ->allow_extra_args(false);
  sweep->add_option("--jobs", jobs, "Parallel simulations")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_args.out, "Output directory")->required();

  std::vector<std::string> reports;
  std::string compare_out;
  auto *compare = app.add_subcommand("compare", "Normalize reports to the first");
  compare->add_option("reports", reports, "Report JSON files")->required();
  compare->add_option("--out", compare_out, "Also write the table as CSV");

  CommonArgs trace_args;
  auto *gen = app.add_subcommand("gen-trace", "Export the synthetic workload as CSV");
  add_common(gen, trace_args);
  gen->add_option("--out", trace_args.out, "Trace path (default: stdout)");

  CommonArgs gt_args;
  auto *gt = app.add_subcommand("dump-ground-truth",
                                "Write per-WL tolerance and alpha as CSV");
  add_common(gt, gt_args);
  gt->add_option("--out", gt_args.out, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_args, events_path, out, err);
    if (*sweep) return cmd_sweep(sweep_args, axes, jobs, out, err);
    if (*compare) {
      if (reports.size() < 2) {
        throw ConfigError("compare needs at least two reports");
      }
      return cmd_compare(reports, compare_out, out);
    }
    if (*gen) return cmd_gen_trace(trace_args, out, err);
    if (*gt) return cmd_dump_ground_truth(gt_args, out, err);
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TraceParseError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace strawsim
