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

#include "strawsim/config.hh"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "strawsim/random.hh"
#include "strawsim/rec.hh"

namespace strawsim {

using nlohmann::json;

namespace {

constexpr uint32_t kDeskScale = 100;
constexpr uint64_t kWorkloadStream = 0x776f726b6c6f6164ull;

// Reads the keys of one JSON object, remembering which ones it knows so that
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json &j, std::string prefix)
      : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) {
      throw ConfigError("config key '" + name("") + "' must be an object");
    }
  }

  bool has(const char *key) {
    known_.insert(key);
    return j_.contains(key);
  }

  const json &at(const char *key) { return j_.at(key); }

  std::string name(const char *key) const {
    if (prefix_.empty()) return key;
    if (*key == '\0') return prefix_;
    return prefix_ + "." + key;
  }

  void get(const char *key, uint64_t &out) {
    if (!has(key)) return;
    const auto &v = j_.at(key);
    // Programmatic JSON stores small literals as signed integers.
    if (!v.is_number_integer() ||
        (!v.is_number_unsigned() && v.get<int64_t>() < 0)) {
      fail(key, "must be a non-negative integer");
    }
    out = v.get<uint64_t>();
  }

  void get(const char *key, uint32_t &out) {
    uint64_t v = out;
    get(key, v);
    if (v > 0xFFFFFFFFull) {
      fail(key, "is too large");
    }
    out = static_cast<uint32_t>(v);
  }

  void get(const char *key, double &out) {
    if (!has(key)) return;
    const auto &v = j_.at(key);
    if (!v.is_number()) {
      fail(key, "must be a number");
    }
    out = v.get<double>();
  }

  void get(const char *key, bool &out) {
    if (!has(key)) return;
    const auto &v = j_.at(key);
    if (!v.is_boolean()) {
      fail(key, "must be true or false");
    }
    out = v.get<bool>();
  }

  void get(const char *key, std::string &out) {
    if (!has(key)) return;
    const auto &v = j_.at(key);
    if (!v.is_string()) {
      fail(key, "must be a string");
    }
    out = v.get<std::string>();
  }

  template <typename E, typename Parse>
  void get_enum(const char *key, E &out, Parse parse) {
    std::string s;
    if (!has(key)) return;
    get(key, s);
    try {
      out = parse(s);
    } catch (const std::invalid_argument &e) {
      fail(key, e.what());
    }
  }

  [[noreturn]] void fail(const char *key, const std::string &msg) const {
    throw ConfigError("config key '" + name(key) + "' " + msg);
  }

  void finish() const {
    for (const auto &item : j_.items()) {
      if (!known_.count(item.key())) {
        throw ConfigError("unknown config key '" + name(item.key().c_str()) +
                          "'");
      }
    }
  }

 private:
  const json &j_;
  std::string prefix_;
  std::set<std::string> known_;
};

Calibration parse_calibration(std::string_view s) {
  if (s == "fig2b") return Calibration::Fig2b;
  if (s == "paper") return Calibration::Paper;
  throw std::invalid_argument("must be \"fig2b\" or \"paper\"");
}

std::string_view to_string(Calibration c) {
  return c == Calibration::Fig2b ? "fig2b" : "paper";
}

RptSource parse_rpt_source(std::string_view s) {
  if (s == "derived") return RptSource::Derived;
  if (s == "paper") return RptSource::Paper;
  if (s == "table") return RptSource::Table;
  throw std::invalid_argument("must be \"derived\", \"paper\" or \"table\"");
}

std::string_view to_string(RptSource s) {
  switch (s) {
    case RptSource::Derived:
      return "derived";
    case RptSource::Paper:
      return "paper";
    case RptSource::Table:
      return "table";
  }
  return "?";
}

RrPolicy parse_policy(std::string_view s) {
  if (s == "BLOCK") return RrPolicy::Block;
  if (s == "STRAW") return RrPolicy::Straw;
  throw std::invalid_argument("must be \"BLOCK\" or \"STRAW\"");
}

CounterBackend parse_backend(std::string_view s) {
  if (s == "exact") return CounterBackend::Exact;
  if (s == "space_saving") return CounterBackend::SpaceSaving;
  throw std::invalid_argument("must be \"exact\" or \"space_saving\"");
}

ToleranceDistribution parse_distribution(std::string_view s) {
  if (s == "uniform") return ToleranceDistribution::Uniform;
  if (s == "normal") return ToleranceDistribution::TruncatedNormal;
  throw std::invalid_argument("must be \"uniform\" or \"normal\"");
}

std::string_view to_string(ToleranceDistribution d) {
  return d == ToleranceDistribution::Uniform ? "uniform" : "normal";
}

WorkloadKind parse_workload_kind(std::string_view s) {
  if (s == "synthetic") return WorkloadKind::Synthetic;
  if (s == "trace") return WorkloadKind::Trace;
  throw std::invalid_argument("must be \"synthetic\" or \"trace\"");
}

std::string_view to_string(WorkloadKind k) {
  return k == WorkloadKind::Synthetic ? "synthetic" : "trace";
}

void apply_calibration(RunConfig &c) {
  if (c.calibration == Calibration::Paper) {
    c.reliability = ReliabilityConfig::paper_anchored();
    c.rpt.source = RptSource::Paper;
  }
}

void apply_desk(RunConfig &c) {
  c.geometry = Geometry::desk();
  c.reliability.scale = kDeskScale;
  c.ftl.over_provisioning = 0.25;
  c.rr.check_interval = std::max<uint64_t>(1, c.rr.check_interval / kDeskScale);
}

void read_geometry(ObjectReader &r, Geometry &g) {
  r.get("channels", g.channels);
  r.get("dies_per_channel", g.dies_per_channel);
  r.get("planes_per_die", g.planes_per_die);
  r.get("blocks_per_plane", g.blocks_per_plane);
  r.get("wls_per_block", g.wls_per_block);
  r.get("pages_per_wl", g.pages_per_wl);
  r.get("page_size", g.page_size);
  r.finish();
}

void read_timing(ObjectReader &r, TimingParams &t) {
  r.get("t_read_us", t.t_read_us);
  r.get("t_prog_us", t.t_prog_us);
  r.get("t_erase_us", t.t_erase_us);
  r.get("channel_bw_mbps", t.channel_bw_mbps);
  r.get("host_bw_mbps", t.host_bw_mbps);
  r.finish();
}

void read_reliability(ObjectReader &r, ReliabilityConfig &rel) {
  r.get("tolerance_min", rel.tolerance_min);
  r.get("tolerance_max", rel.tolerance_max);
  r.get("alpha_mean", rel.alpha_mean);
  r.get("alpha_spread", rel.alpha_spread);
  r.get_enum("distribution", rel.distribution, parse_distribution);
  r.get("symmetric_mode", rel.symmetric_mode);
  r.get("scale", rel.scale);
  if (r.has("pec_degradation")) {
    const auto &arr = r.at("pec_degradation");
    if (!arr.is_array()) {
      r.fail("pec_degradation", "must be an array");
    }
    rel.pec_degradation.clear();
    for (size_t i = 0; i < arr.size(); ++i) {
      ObjectReader e(arr[i], r.name("pec_degradation") + "[" +
                                 std::to_string(i) + "]");
      PecScale p;
      e.get("pec", p.pec_limit);
      e.get("factor", p.factor);
      e.finish();
      rel.pec_degradation.push_back(p);
    }
  }
  r.finish();
}

void read_rpt(ObjectReader &r, RptConfig &rpt) {
  r.get_enum("source", rpt.source, parse_rpt_source);
  r.get("margin", rpt.margin);
  if (r.has("entries")) {
    const auto &arr = r.at("entries");
    if (!arr.is_array()) {
      r.fail("entries", "must be an array");
    }
    rpt.entries.clear();
    for (size_t i = 0; i < arr.size(); ++i) {
      ObjectReader e(arr[i], r.name("entries") + "[" + std::to_string(i) + "]");
      RptEntry entry;
      e.get("pec_bucket", entry.pec_bucket);
      e.get_enum("group", entry.group, parse_wl_group);
      e.get("erc_max", entry.erc_max);
      double alpha = entry.alpha.value();
      e.get("alpha", alpha);
      try {
        entry.alpha = Alpha::from_double(alpha);
      } catch (const std::invalid_argument &ex) {
        e.fail("alpha", ex.what());
      }
      e.finish();
      rpt.entries.push_back(entry);
    }
  }
  r.finish();
}

void read_rr(ObjectReader &r, RrPolicyConfig &rr) {
  r.get("block_rr_threshold", rr.block_rr_threshold);
  r.get("check_interval", rr.check_interval);
  r.finish();
}

void read_counters(ObjectReader &r, RrPolicyConfig &rr) {
  r.get_enum("backend", rr.backend, parse_backend);
  r.get("entries_per_block", rr.entries_per_block);
  r.finish();
}

void read_ftl(ObjectReader &r, FtlConfig &f) {
  r.get("over_provisioning", f.over_provisioning);
  r.get("gc_watermark", f.gc_watermark);
  r.finish();
}

void read_workload(ObjectReader &r, WorkloadConfig &w) {
  auto &s = w.synthetic;
  r.get_enum("kind", w.kind, parse_workload_kind);
  r.get("preset", w.preset);
  r.get_enum("pattern", s.pattern, parse_access_pattern);
  r.get("read_ratio", s.read_ratio);
  r.get("footprint", s.footprint);
  r.get("op_count", s.op_count);
  r.get("request_size", s.request_size);
  r.get("mix_ratio", s.mix_ratio);
  r.get("hot_offset", s.hot_offset);
  r.get("hot_pages", s.hot_pages);
  r.get("hot_fraction", s.hot_fraction);
  r.get("interarrival_us", s.interarrival_us);
  r.get("path", w.path);
  r.get("device_id", w.device_id);
  r.finish();
}

void read_replay(ObjectReader &r, ReplayConfig &rp) {
  r.get_enum("mode", rp.mode, parse_replay_mode);
  r.get("queue_depth", rp.queue_depth);
  r.finish();
}

template <typename Fn>
void section(ObjectReader &top, const char *key, Fn fn) {
  if (top.has(key)) {
    ObjectReader r(top.at(key), key);
    fn(r);
  }
}

uint64_t fnv1a(std::string_view data, uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

RunConfig config_from_json(const json &j) {
  RunConfig c;
  ObjectReader top(j, "");

  // Presets first so explicit keys win.
  top.get("desk_scale", c.desk_scale);
  top.get_enum("calibration", c.calibration, parse_calibration);
  apply_calibration(c);
  if (c.desk_scale) {
    apply_desk(c);
  }
  if (top.has("workload") && j.at("workload").is_object() &&
      j.at("workload").contains("preset")) {
    const auto &p = j.at("workload").at("preset");
    if (!p.is_string()) {
      throw ConfigError("config key 'workload.preset' must be a string");
    }
    const auto preset = synthetic_preset(p.get<std::string>());
    if (!preset) {
      std::string names;
      for (const auto &n : synthetic_preset_names()) {
        names += (names.empty() ? "" : ", ") + n;
      }
      throw ConfigError("config key 'workload.preset' must be one of " + names);
    }
    c.workload.synthetic.pattern = preset->pattern;
    c.workload.synthetic.read_ratio = preset->read_ratio;
  }

  top.get("name", c.name);
  top.get("seed", c.seed);
  top.get("initial_pec", c.initial_pec);
  top.get_enum("policy", c.rr.policy, parse_policy);
  top.get("output", c.output);
  section(top, "geometry", [&](ObjectReader &r) { read_geometry(r, c.geometry); });
  section(top, "timing", [&](ObjectReader &r) { read_timing(r, c.timing); });
  section(top, "reliability",
          [&](ObjectReader &r) { read_reliability(r, c.reliability); });
  section(top, "rpt", [&](ObjectReader &r) { read_rpt(r, c.rpt); });
  section(top, "rr", [&](ObjectReader &r) { read_rr(r, c.rr); });
  section(top, "counters", [&](ObjectReader &r) { read_counters(r, c.rr); });
  section(top, "ftl", [&](ObjectReader &r) { read_ftl(r, c.ftl); });
  section(top, "workload", [&](ObjectReader &r) { read_workload(r, c.workload); });
  section(top, "replay", [&](ObjectReader &r) { read_replay(r, c.replay); });
  top.finish();

  c.reliability.seed = c.seed;
  c.workload.synthetic.seed = derive_seed(c.seed, kWorkloadStream);
  return c;
}

json config_to_json(const RunConfig &c) {
  json j;
  j["name"] = c.name;
  j["desk_scale"] = c.desk_scale;
  j["calibration"] = to_string(c.calibration);
  j["seed"] = c.seed;
  j["initial_pec"] = c.initial_pec;
  j["policy"] = to_string(c.rr.policy);
  j["output"] = c.output;

  const auto &g = c.geometry;
  j["geometry"] = {{"channels", g.channels},
                   {"dies_per_channel", g.dies_per_channel},
                   {"planes_per_die", g.planes_per_die},
                   {"blocks_per_plane", g.blocks_per_plane},
                   {"wls_per_block", g.wls_per_block},
                   {"pages_per_wl", g.pages_per_wl},
                   {"page_size", g.page_size}};

  const auto &t = c.timing;
  j["timing"] = {{"t_read_us", t.t_read_us},
                 {"t_prog_us", t.t_prog_us},
                 {"t_erase_us", t.t_erase_us},
                 {"channel_bw_mbps", t.channel_bw_mbps},
                 {"host_bw_mbps", t.host_bw_mbps}};

  const auto &rel = c.reliability;
  json degr = json::array();
  for (const auto &p : rel.pec_degradation) {
    degr.push_back({{"pec", p.pec_limit}, {"factor", p.factor}});
  }
  j["reliability"] = {{"tolerance_min", rel.tolerance_min},
                      {"tolerance_max", rel.tolerance_max},
                      {"alpha_mean", rel.alpha_mean},
                      {"alpha_spread", rel.alpha_spread},
                      {"distribution", to_string(rel.distribution)},
                      {"symmetric_mode", rel.symmetric_mode},
                      {"scale", rel.scale},
                      {"pec_degradation", degr}};

  json entries = json::array();
  for (const auto &e : c.rpt.entries) {
    entries.push_back({{"pec_bucket", e.pec_bucket},
                       {"group", to_string(e.group)},
                       {"erc_max", e.erc_max},
                       {"alpha", e.alpha.value()}});
  }
  j["rpt"] = {{"source", to_string(c.rpt.source)},
              {"margin", c.rpt.margin},
              {"entries", entries}};

  j["rr"] = {{"block_rr_threshold", c.rr.block_rr_threshold},
             {"check_interval", c.rr.check_interval}};
  j["counters"] = {{"backend", to_string(c.rr.backend)},
                   {"entries_per_block", c.rr.entries_per_block}};
  j["ftl"] = {{"over_provisioning", c.ftl.over_provisioning},
              {"gc_watermark", c.ftl.gc_watermark}};

  const auto &w = c.workload;
  const auto &s = w.synthetic;
  j["workload"] = {{"kind", to_string(w.kind)},
                   {"preset", w.preset},
                   {"pattern", to_string(s.pattern)},
                   {"read_ratio", s.read_ratio},
                   {"footprint", s.footprint},
                   {"op_count", s.op_count},
                   {"request_size", s.request_size},
                   {"mix_ratio", s.mix_ratio},
                   {"hot_offset", s.hot_offset},
                   {"hot_pages", s.hot_pages},
                   {"hot_fraction", s.hot_fraction},
                   {"interarrival_us", s.interarrival_us},
                   {"path", w.path},
                   {"device_id", w.device_id}};
  if (w.preset.empty()) {
    j["workload"].erase("preset");
  }
  j["replay"] = {{"mode", to_string(c.replay.mode)},
                 {"queue_depth", c.replay.queue_depth}};
  return j;
}

void apply_override(json &j, std::string_view assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) +
                      "' must look like key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) {
    value = raw;
  }
  json *node = &j;
  size_t start = 0;
  while (true) {
    const size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) {
      throw ConfigError("override key '" + key + "' has an empty component");
    }
    if (!node->is_object()) {
      throw ConfigError("override key '" + key + "' walks into a non-object");
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) {
      *node = json::object();
    }
    start = dot + 1;
  }
}

RunConfig load_config(const std::string &path,
                      const std::vector<std::string> &overrides, bool use_env) {
  json j = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) {
      throw ConfigError("cannot open config file '" + path + "'");
    }
    try {
      j = json::parse(in);
    } catch (const json::parse_error &e) {
      throw ConfigError("config file '" + path + "' is not valid JSON: " +
                        e.what());
    }
  }
  for (const auto &o : overrides) {
    apply_override(j, o);
  }
  if (use_env) {
    if (const char *env = std::getenv("STRAWSIM_SEED"); env && *env) {
      char *end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (*end != '\0') {
        throw ConfigError("STRAWSIM_SEED must be an unsigned integer");
      }
      j["seed"] = static_cast<uint64_t>(v);
    }
  }
  return config_from_json(j);
}

Rpt build_rpt(const RunConfig &c) {
  switch (c.rpt.source) {
    case RptSource::Derived:
      return derive_rpt(c.reliability, c.rpt.margin);
    case RptSource::Paper:
      return paper_anchored_rpt(c.reliability.scale);
    case RptSource::Table:
      return Rpt::from_entries(c.rpt.entries);
  }
  throw ConfigError("rpt: unknown source");
}

void validate_config(const RunConfig &c) {
  try {
    c.geometry.validate();
    c.timing.validate();
    c.reliability.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  if (!(c.rpt.margin > 0.0 && c.rpt.margin <= 1.0)) {
    throw ConfigError("config key 'rpt.margin' must be in (0, 1]");
  }
  if (c.rpt.source != RptSource::Table && !c.rpt.entries.empty()) {
    throw ConfigError("config key 'rpt.entries' needs rpt.source \"table\"");
  }
  try {
    build_rpt(c);
  } catch (const std::invalid_argument &e) {
    const std::string msg = e.what();
    throw ConfigError(msg.rfind("rpt", 0) == 0 ? msg : "rpt: " + msg);
  }
  if (c.rr.check_interval < 1) {
    throw ConfigError("config key 'rr.check_interval' must be >= 1");
  }
  if (c.rr.entries_per_block < 1) {
    throw ConfigError("config key 'counters.entries_per_block' must be >= 1");
  }
  if (c.replay.queue_depth < 1) {
    throw ConfigError("config key 'replay.queue_depth' must be >= 1");
  }
  uint64_t logical = 0;
  try {
    logical = Ftl::logical_capacity(c.geometry, c.ftl);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  if (c.workload.kind == WorkloadKind::Synthetic) {
    try {
      validate_synthetic(c.workload.synthetic, logical);
    } catch (const std::invalid_argument &e) {
      throw ConfigError(e.what());
    }
  } else if (c.workload.path.empty()) {
    throw ConfigError("config key 'workload.path' is required for traces");
  }
}

std::vector<std::string> config_warnings(const RunConfig &c) {
  std::vector<std::string> out;
  for (auto &issue : audit_rpt(build_rpt(c), c.reliability)) {
    out.push_back("rpt audit: " + issue);
  }
  if (c.rr.policy == RrPolicy::Straw &&
      c.rr.backend == CounterBackend::SpaceSaving &&
      c.rr.entries_per_block >= c.geometry.wls_per_block) {
    out.push_back(
        "counters.entries_per_block >= wls_per_block; space-saving costs more "
        "than exact counting here");
  }
  return out;
}

SyntheticSpec resolved_synthetic(const RunConfig &c) {
  SyntheticSpec s = c.workload.synthetic;
  if (s.footprint == 0) {
    s.footprint = Ftl::logical_capacity(c.geometry, c.ftl);
  }
  return s;
}

std::string workload_hash(const RunConfig &c) {
  json id;
  id["workload"] = config_to_json(c)["workload"];
  id["replay"] = config_to_json(c)["replay"];
  id["page_size"] = c.geometry.page_size;
  if (c.workload.kind == WorkloadKind::Synthetic) {
    id["seed"] = c.seed;
    id["workload"]["footprint"] = resolved_synthetic(c).footprint;
  } else {
    id["workload"].erase("op_count");
  }
  uint64_t h = fnv1a(id.dump());
  if (c.workload.kind == WorkloadKind::Trace) {
    std::ifstream in(c.workload.path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    h = fnv1a(buf.str(), h);
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace strawsim
