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

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "strawsim/device_model.hh"
#include "strawsim/random.hh"

namespace strawsim {
namespace {

BlockReliability programmed_block(const ReliabilityConfig &cfg, uint32_t wls,
                                  uint32_t pec, BlockId id = 0) {
  BlockReliability b(init_block_ground_truth(id, wls, cfg, pec), pec, cfg);
  b.program_all();
  return b;
}

TEST(GroundTruth, ReadStressesNeighboursByAlphaAndOthersByOne) {
  ReliabilityConfig cfg;
  auto b = programmed_block(cfg, 48, 1000);
  const auto a34 = b.wl(34).alpha.tenths();
  const auto a36 = b.wl(36).alpha.tenths();
  b.apply_read_stress(35);
  EXPECT_EQ(b.wl(34).stress.tenths(), a34);
  EXPECT_EQ(b.wl(36).stress.tenths(), a36);
  EXPECT_EQ(b.wl(35).stress.tenths(), 0u);
  EXPECT_EQ(b.wl(0).stress.tenths(), 10u);
  EXPECT_EQ(b.wl(47).stress.tenths(), 10u);
}

TEST(GroundTruth, EdgeReadHasOneNeighbour) {
  ReliabilityConfig cfg;
  auto b = programmed_block(cfg, 8, 1000);
  b.apply_read_stress(0);
  EXPECT_EQ(b.wl(1).stress.tenths(), b.wl(1).alpha.tenths());
  for (WlIndex j = 2; j < 8; ++j) {
    EXPECT_EQ(b.wl(j).stress.tenths(), 10u);
  }
}

TEST(GroundTruth, ErasedWlsAccrueNothing) {
  ReliabilityConfig cfg;
  BlockReliability b(init_block_ground_truth(0, 8, cfg, 1000), 1000, cfg);
  b.mark_programmed(0);
  b.mark_programmed(1);
  b.apply_read_stress(0);
  EXPECT_GT(b.wl(1).stress.tenths(), 0u);
  EXPECT_EQ(b.wl(2).stress.tenths(), 0u);
  EXPECT_EQ(b.wl(5).stress.tenths(), 0u);
}

// Brute-force oracle: stress of WL j is alpha_j * (reads to j-1 or j+1)
// plus 1 * (reads to any other WL except j).
TEST(GroundTruth, StressMatchesCountingOracle) {
  ReliabilityConfig cfg;
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const uint32_t wls = 2 + static_cast<uint32_t>(uniform_index(rng, 60));
    auto b = programmed_block(cfg, wls, 1000, trial);
    std::vector<uint64_t> reads(wls, 0);
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
      // Skewed so some WLs are hot.
      const WlIndex t = static_cast<WlIndex>(
          uniform_index(rng, 4) == 0 ? uniform_index(rng, 3) : uniform_index(rng, wls));
      ++reads[t];
      b.apply_read_stress(t);
    }
    for (WlIndex j = 0; j < wls; ++j) {
      const uint64_t adj = (j > 0 ? reads[j - 1] : 0) + (j + 1 < wls ? reads[j + 1] : 0);
      const uint64_t other = n - adj - reads[j];
      EXPECT_EQ(b.wl(j).stress.tenths(), adj * b.wl(j).alpha.tenths() + other * 10)
          << "wl " << j;
    }
  }
}

TEST(GroundTruth, CrossingIsReportedOnce) {
  ReliabilityConfig cfg;
  auto b = programmed_block(cfg, 4, 1000);
  b.mutable_wl(1).tolerance = 3;
  b.mutable_wl(1).alpha = Alpha::from_tenths(10);
  std::vector<WlIndex> crossed;
  for (int i = 0; i < 3; ++i) {
    b.apply_read_stress(3, &crossed);
  }
  EXPECT_TRUE(crossed.empty());
  EXPECT_FALSE(b.wl(1).corrupted());
  b.apply_read_stress(3, &crossed);
  ASSERT_EQ(crossed.size(), 1u);
  EXPECT_EQ(crossed[0], 1u);
  crossed.clear();
  b.apply_read_stress(3, &crossed);
  EXPECT_TRUE(crossed.empty());
  EXPECT_EQ(b.check_integrity(), std::vector<WlIndex>{1});
}

TEST(GroundTruth, GroupsAreBalancedAndBanded) {
  ReliabilityConfig cfg;
  for (BlockId id = 0; id < 50; ++id) {
    const auto wls = init_block_ground_truth(id, 48, cfg, 1000);
    std::array<int, kNumGroups> count{};
    for (const auto &w : wls) {
      const int g = static_cast<int>(w.group);
      ++count[g];
      EXPECT_GE(w.base_tolerance, cfg.group_floor(w.group, 1000));
      EXPECT_LE(static_cast<double>(w.base_tolerance),
                cfg.tolerance_quantile((g + 1) / 4.0));
      EXPECT_EQ(w.tolerance, w.base_tolerance);
      EXPECT_GE(w.alpha.tenths(), 76u);  // 8.4 * 0.9 rounded
      EXPECT_LE(w.alpha, cfg.max_alpha());
    }
    for (int c : count) {
      EXPECT_EQ(c, 12);
    }
  }
}

TEST(GroundTruth, DeterministicPerSeedAndBlock) {
  ReliabilityConfig cfg;
  const auto a = init_block_ground_truth(3, 48, cfg, 1000);
  const auto b = init_block_ground_truth(3, 48, cfg, 1000);
  const auto c = init_block_ground_truth(4, 48, cfg, 1000);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].tolerance, b[i].tolerance);
    EXPECT_EQ(a[i].alpha, b[i].alpha);
    differs = differs || a[i].tolerance != c[i].tolerance;
  }
  EXPECT_TRUE(differs);
}

TEST(GroundTruth, PecDegradationScalesTolerance) {
  ReliabilityConfig cfg;
  const auto at1k = init_block_ground_truth(9, 48, cfg, 1000);
  const auto at2k = init_block_ground_truth(9, 48, cfg, 2000);
  for (size_t i = 0; i < at1k.size(); ++i) {
    EXPECT_EQ(at2k[i].tolerance,
              static_cast<uint64_t>(std::floor(at1k[i].base_tolerance * 0.85)));
  }
  EXPECT_EQ(cfg.pec_factor(0), 1.0);
  EXPECT_EQ(cfg.pec_factor(1000), 1.0);
  EXPECT_EQ(cfg.pec_factor(1001), 0.85);
  EXPECT_EQ(cfg.pec_factor(5000), 0.85);
}

TEST(GroundTruth, EraseResetsStressAndAdvancesPec) {
  ReliabilityConfig cfg;
  auto b = programmed_block(cfg, 48, 1000);
  for (int i = 0; i < 100; ++i) b.apply_read_stress(10);
  b.erase();
  EXPECT_EQ(b.pec(), 1001u);
  for (const auto &w : b.wls()) {
    EXPECT_EQ(w.stress.tenths(), 0u);
    EXPECT_FALSE(w.programmed);
    EXPECT_EQ(w.tolerance,
              static_cast<uint64_t>(std::floor(w.base_tolerance * 0.85)));
  }
}

TEST(GroundTruth, SymmetricModeIsUniform) {
  ReliabilityConfig cfg;
  cfg.symmetric_mode = true;
  const auto wls = init_block_ground_truth(0, 48, cfg, 1000);
  for (const auto &w : wls) {
    EXPECT_EQ(w.tolerance, (403'000u + 962'000u) / 2);
    EXPECT_EQ(w.alpha.tenths(), 10u);
  }
}

TEST(GroundTruth, ScaleDividesTolerances) {
  ReliabilityConfig cfg;
  cfg.scale = 100;
  for (const auto &w : init_block_ground_truth(0, 48, cfg, 1000)) {
    EXPECT_GE(w.tolerance, 4030u);
    EXPECT_LE(w.tolerance, 9620u);
  }
}

TEST(GroundTruth, NormalQuantileIsSymmetricAndBounded) {
  ReliabilityConfig cfg;
  cfg.distribution = ToleranceDistribution::TruncatedNormal;
  EXPECT_NEAR(cfg.tolerance_quantile(0.5), (403'000 + 962'000) / 2.0, 1.0);
  EXPECT_NEAR(cfg.tolerance_quantile(0.0), 403'000, 1.0);
  EXPECT_NEAR(cfg.tolerance_quantile(1.0), 962'000, 1.0);
  const double lo = cfg.tolerance_quantile(0.25);
  const double hi = cfg.tolerance_quantile(0.75);
  EXPECT_NEAR((lo + hi) / 2, 682'500, 1.0);
  // Normal mass concentrates near the mean compared with uniform.
  EXPECT_GT(lo, 403'000 + 0.25 * (962'000 - 403'000));
}

TEST(GroundTruth, ValidateRejectsBadValues) {
  ReliabilityConfig cfg;
  cfg.tolerance_min = 10;
  cfg.tolerance_max = 5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = ReliabilityConfig{};
  cfg.pec_degradation = {{2000, 0.8}, {1000, 1.0}};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = ReliabilityConfig{};
  cfg.alpha_mean = 0.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(DeviceModel, DumpHasOneRowPerWl) {
  Geometry g = Geometry::desk();
  ReliabilityConfig cfg;
  DeviceModel dev(g, cfg, 1000);
  std::ostringstream out;
  dev.dump_ground_truth_csv(out);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("block,wl,group,tolerance,alpha\n", 0), 0u);
  EXPECT_EQ(static_cast<uint64_t>(std::count(s.begin(), s.end(), '\n')),
            g.blocks() * g.wls_per_block + 1);
}

}  // namespace
}  // namespace strawsim
