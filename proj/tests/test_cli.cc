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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "strawsim/cli.hh"

namespace strawsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kDeskConfig = std::string(STRAWSIM_SOURCE_DIR) + "/configs/desk.json";

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "strawsim");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("strawsim_cli_" + std::string(::testing::UnitTest::GetInstance()
                                              ->current_test_info()
                                              ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string &name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kShort = "workload.op_count=20000";

TEST_F(CliTest, RunWritesAReport) {
  const auto r = cli({"run", "--config", kDeskConfig, "--override", kShort, "--out",
                      path("r.json"), "--events", path("e.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(slurp(path("r.json")));
  EXPECT_EQ(j["failed"], false);
  EXPECT_EQ(j["total_reads"], 20000);
  for (const char *key : {"total_writes", "rr_page_copies", "gc_page_copies", "erases",
                          "corruption_events", "read_latency_us",
                          "counter_footprint_bytes", "workload_hash", "config"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(slurp(path("e.csv")).rfind("timestamp_us,cause,block,wl,pages_copied\n", 0),
            0u);
}

TEST_F(CliTest, RunPrintsToStdoutByDefault) {
  const auto r = cli({"run", "--config", kDeskConfig, "--override", kShort});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["name"], "desk-syn1");
}

TEST_F(CliTest, StrawCopiesNoMoreThanBlock) {
  ASSERT_EQ(cli({"run", "--config", kDeskConfig, "--override", kShort, "--override",
                 "policy=BLOCK", "--out", path("block.json")})
                .code,
            kExitOk);
  ASSERT_EQ(cli({"run", "--config", kDeskConfig, "--override", kShort, "--override",
                 "policy=STRAW", "--out", path("straw.json")})
                .code,
            kExitOk);
  const json b = json::parse(slurp(path("block.json")));
  const json s = json::parse(slurp(path("straw.json")));
  const auto copies = [](const json &j) {
    return j["rr_page_copies"]["block_rr"].get<uint64_t>() +
           j["rr_page_copies"]["wl_rr"].get<uint64_t>();
  };
  EXPECT_GT(copies(b), 0u);
  EXPECT_LE(copies(s), copies(b));
  EXPECT_EQ(b["workload_hash"], s["workload_hash"]);
}

TEST_F(CliTest, CorruptingRunExitsTwo) {
  // An RPT that promises far more than the cells tolerate.
  json entries = json::array();
  for (const char *g : {"Worst", "Bad", "Good", "Best"}) {
    entries.push_back(
        {{"pec_bucket", 3000}, {"group", g}, {"erc_max", 100'000'000}, {"alpha", 1.0}});
  }
  const auto r = cli({"run", "--config", kDeskConfig, "--override", kShort, "--override",
                      "policy=BLOCK", "--override", "rpt.source=table", "--override",
                      "rpt.entries=" + entries.dump(), "--override",
                      "workload.pattern=hotspot", "--out", path("bad.json")});
  EXPECT_EQ(r.code, kExitFailedRun) << r.err;
  EXPECT_EQ(json::parse(slurp(path("bad.json")))["failed"], true);
}

TEST_F(CliTest, CompareAgainstItselfIsOne) {
  ASSERT_EQ(cli({"run", "--config", kDeskConfig, "--override", kShort, "--out",
                 path("a.json")})
                .code,
            kExitOk);
  const auto r = cli({"compare", path("a.json"), path("a.json"), "--out", path("c.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("(baseline: desk-syn1)"), std::string::npos);
  const std::string csv = slurp(path("c.csv"));
  EXPECT_EQ(csv.rfind("config_name,rr_copies_ratio,p999_ratio,corruption_events\n", 0), 0u);
  EXPECT_NE(csv.find("desk-syn1,1,1,0\n"), std::string::npos) << csv;
}

TEST_F(CliTest, CompareRefusesDifferentWorkloads) {
  ASSERT_EQ(cli({"run", "--config", kDeskConfig, "--override", kShort, "--out",
                 path("a.json")})
                .code,
            kExitOk);
  ASSERT_EQ(cli({"run", "--config", kDeskConfig, "--override", kShort, "--override",
                 "seed=99", "--out", path("b.json")})
                .code,
            kExitOk);
  const auto r = cli({"compare", path("a.json"), path("b.json")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("hash"), std::string::npos) << r.err;
}

TEST_F(CliTest, CompareMissingFileFails) {
  EXPECT_NE(cli({"compare", path("none.json"), path("none.json")}).code, kExitOk);
}

TEST_F(CliTest, SweepWritesEveryCellAndASummary) {
  const auto r = cli({"sweep", "--config", kDeskConfig, "--override",
                      "workload.op_count=5000", "--axis", "policy=BLOCK,STRAW", "--axis",
                      "counters.backend=exact,space_saving,exact", "--jobs", "2", "--out",
                      path("sw")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("duplicate"), std::string::npos);
  size_t reports = 0;
  for (const auto &e : fs::directory_iterator(path("sw"))) {
    reports += e.path().extension() == ".json";
  }
  EXPECT_EQ(reports, 4u);
  const std::string csv = slurp(path("sw") + "/summary.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_EQ(csv.rfind("cell,name,policy,counters.backend,", 0), 0u);
}

TEST_F(CliTest, SweepCapIsEnforced) {
  const auto r = cli({"sweep", "--config", kDeskConfig, "--axis",
                      "seed=1,2,3,4,5,6,7,8,9", "--axis", "rr.check_interval=1,2,3,4,5,6,7,8",
                      "--out", path("cap")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("64"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "--config", path("missing.json")}).code, kExitUsage);
  const auto bad = cli({"run", "--config", kDeskConfig, "--override", "rr.typo=1"});
  EXPECT_EQ(bad.code, kExitUsage);
  EXPECT_NE(bad.err.find("rr.typo"), std::string::npos);
  EXPECT_EQ(cli({"sweep", "--config", kDeskConfig, "--out", path("x")}).code, kExitUsage);
}

TEST_F(CliTest, GenTraceReplaysToTheSameReport) {
  ASSERT_EQ(cli({"gen-trace", "--config", kDeskConfig, "--override", kShort, "--out",
                 path("t.csv")})
                .code,
            kExitOk);
  const auto syn = cli({"run", "--config", kDeskConfig, "--override", kShort});
  const auto tr = cli({"run", "--config", kDeskConfig, "--override", kShort, "--override",
                       "workload.kind=trace", "--override", "workload.path=" + path("t.csv")});
  ASSERT_EQ(tr.code, kExitOk) << tr.err;
  const json a = json::parse(syn.out);
  const json b = json::parse(tr.out);
  EXPECT_EQ(a["total_reads"], b["total_reads"]);
  EXPECT_EQ(a["rr_page_copies"], b["rr_page_copies"]);
  EXPECT_EQ(a["read_latency_us"], b["read_latency_us"]);
}

TEST_F(CliTest, DumpGroundTruth) {
  const auto r = cli({"dump-ground-truth", "--config", kDeskConfig});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("block,wl,group,tolerance,alpha\n", 0), 0u);
  // 32 blocks of 48 WLs plus the header.
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 32 * 48 + 1);
}

}  // namespace
}  // namespace strawsim
