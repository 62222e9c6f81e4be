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

#include <random>

#include "strawsim/disturbance_model.hh"
#include "strawsim/random.hh"

namespace strawsim {
namespace {

std::vector<RptEntry> single_bucket(uint64_t erc_max, uint32_t alpha_tenths) {
  std::vector<RptEntry> e;
  for (int g = 0; g < kNumGroups; ++g) {
    e.push_back({1000, static_cast<WlGroup>(g), erc_max,
                 Alpha::from_tenths(alpha_tenths)});
  }
  return e;
}

std::string error_of(std::vector<RptEntry> entries) {
  try {
    Rpt::from_entries(std::move(entries));
  } catch (const std::invalid_argument &e) {
    return e.what();
  }
  return "";
}

TEST(Erc, WeightsAdjacentReadsByAlpha) {
  // 100 adjacent reads at 8.7 plus 50 others.
  EXPECT_EQ(effective_read_count(100, 50, Alpha::from_tenths(87)).tenths(),
            8700u + 500u);
  EXPECT_EQ(effective_read_count(0, 0, Alpha::from_tenths(87)).tenths(), 0u);
  EXPECT_THROW(effective_read_count(~uint64_t{0} / 2, 0, Alpha::from_tenths(87)),
               std::overflow_error);
}

TEST(Erc, HeavilyDisturbedIncludesOneIntervalOfHeadroom) {
  const auto a = Alpha::from_tenths(90);
  // 1,000 - 10 * 9 = 910 is exactly at the budget.
  EXPECT_TRUE(is_heavily_disturbed(EffectiveReads::from_reads(910), 1000, a, 10));
  EXPECT_FALSE(is_heavily_disturbed(EffectiveReads::from_reads(909), 1000, a, 10));
  EXPECT_TRUE(is_heavily_disturbed(EffectiveReads::from_tenths(9105), 1000, a, 10));
  EXPECT_FALSE(is_heavily_disturbed(EffectiveReads::from_tenths(9095), 1000, a, 10));
  EXPECT_FALSE(is_heavily_disturbed(EffectiveReads(), 1000, a, 1));
  EXPECT_TRUE(is_heavily_disturbed(EffectiveReads(), 1000, a, ~uint64_t{0}));
}

TEST(Rpt, PaperAnchorsGiveTheWorstCaseThreshold) {
  const Rpt rpt = paper_anchored_rpt();
  EXPECT_EQ(derive_block_threshold(rpt), 54'560u);
  const auto good = rpt.lookup(2000, WlGroup::Good);
  EXPECT_EQ(good.erc_max, 767'000u);
  EXPECT_EQ(good.alpha.tenths(), 90u);
  EXPECT_EQ(rpt.lookup(2000, WlGroup::Best).alpha.tenths(), 87u);
  // Margin is subtracted in reads.
  EXPECT_EQ(derive_block_threshold(rpt, 1000), 53'560u);
}

TEST(Rpt, SingleGroupArithmetic) {
  EXPECT_EQ(derive_block_threshold(Rpt::from_entries(single_bucket(100, 100))),
            10u);
}

TEST(Rpt, ThresholdMonotoneInErcMaxAntitoneInAlpha) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const uint64_t e = 1 + uniform_index(rng, 1'000'000);
    const uint32_t a = 10 + static_cast<uint32_t>(uniform_index(rng, 200));
    const uint64_t t = derive_block_threshold(Rpt::from_entries(single_bucket(e, a)));
    EXPECT_LE(t, derive_block_threshold(Rpt::from_entries(single_bucket(e + 1, a))));
    EXPECT_GE(t, derive_block_threshold(Rpt::from_entries(single_bucket(e, a + 1))));
    // Oracle: largest n with n * alpha <= erc_max.
    EXPECT_LE(t * a, e * 10);
    EXPECT_GT((t + 1) * a, e * 10);
  }
}

TEST(Rpt, LookupPicksSmallestBucketAtOrAbovePec) {
  const Rpt rpt = paper_anchored_rpt();
  EXPECT_EQ(rpt.lookup(0, WlGroup::Worst).erc_max, 558'437u);
  EXPECT_EQ(rpt.lookup(1000, WlGroup::Worst).erc_max, 558'437u);
  EXPECT_EQ(rpt.lookup(1001, WlGroup::Worst).erc_max, 474'672u);
  EXPECT_EQ(rpt.lookup(2000, WlGroup::Worst).erc_max, 474'672u);
  EXPECT_EQ(rpt.lookup(9000, WlGroup::Worst).erc_max, 474'672u);
}

TEST(Rpt, ScaleDividesErcMax) {
  const Rpt rpt = paper_anchored_rpt(100);
  EXPECT_EQ(rpt.lookup(2000, WlGroup::Worst).erc_max, 4'746u);
  EXPECT_EQ(rpt.lookup(2000, WlGroup::Good).erc_max, 7'670u);
}

TEST(Rpt, RejectsIncompleteOrInconsistentTables) {
  auto e = single_bucket(100, 90);
  e.pop_back();
  EXPECT_NE(error_of(e).find("rpt: bucket 1000 is missing group Best"),
            std::string::npos);

  EXPECT_EQ(error_of({}).rfind("rpt:", 0), 0u);

  e = single_bucket(100, 90);
  e.push_back(e[0]);
  EXPECT_NE(error_of(e).find("duplicate"), std::string::npos);

  e = single_bucket(100, 90);
  e[0].erc_max = 200;  // Worst above Bad
  EXPECT_NE(error_of(e).find("below"), std::string::npos);

  e = single_bucket(100, 90);
  for (auto x : single_bucket(150, 90)) {
    x.pec_bucket = 2000;
    e.push_back(x);
  }
  EXPECT_NE(error_of(e).find("increases"), std::string::npos);

  e = single_bucket(100, 5);
  EXPECT_NE(error_of(e).find("alpha"), std::string::npos);
}

TEST(Rpt, EntriesRoundTrip) {
  const Rpt rpt = paper_anchored_rpt();
  const Rpt again = Rpt::from_entries(rpt.entries());
  EXPECT_EQ(again.entries(), rpt.entries());
}

TEST(Rpt, DerivedTableSitsUnderEveryGroupFloor) {
  ReliabilityConfig cfg;
  const Rpt rpt = derive_rpt(cfg);
  EXPECT_TRUE(audit_rpt(rpt, cfg).empty());
  for (uint32_t pec : {1000u, 2000u}) {
    for (int g = 0; g < kNumGroups; ++g) {
      const auto group = static_cast<WlGroup>(g);
      const auto p = rpt.lookup(pec, group);
      EXPECT_EQ(p.erc_max, static_cast<uint64_t>(std::floor(
                               0.95 * static_cast<double>(cfg.group_floor(group, pec)))));
      EXPECT_EQ(p.alpha, cfg.max_alpha());
    }
  }
  // Worst floor at 2K is floor(403,000 * 0.85) = 342,550.
  EXPECT_EQ(rpt.lookup(2000, WlGroup::Worst).erc_max, 325'422u);
}

TEST(Rpt, PaperTableIsSafeForPaperCalibration) {
  EXPECT_TRUE(audit_rpt(paper_anchored_rpt(), ReliabilityConfig::paper_anchored())
                  .empty());
  EXPECT_TRUE(audit_rpt(paper_anchored_rpt(100), [] {
                auto c = ReliabilityConfig::paper_anchored();
                c.scale = 100;
                return c;
              }())
                  .empty());
}

TEST(Rpt, AuditFlagsOptimisticCells) {
  ReliabilityConfig cfg;
  // The published anchors promise more than the default range delivers.
  const auto issues = audit_rpt(paper_anchored_rpt(), cfg);
  EXPECT_FALSE(issues.empty());
  auto e = derive_rpt(cfg).entries();
  e[0].alpha = Alpha::from_tenths(50);
  EXPECT_EQ(audit_rpt(Rpt::from_entries(e), cfg).size(), 1u);
}

}  // namespace
}  // namespace strawsim
