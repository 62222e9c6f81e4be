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

#include <cmath>
#include <random>
#include <sstream>

#include "strawsim/random.hh"
#include "strawsim/workload.hh"

namespace strawsim {
namespace {

constexpr char kHeader[] = "device_id,opcode,offset_bytes,length_bytes,timestamp_us\n";

ParsedTrace parse(const std::string &text, uint64_t capacity = 1000,
                  std::string device = "") {
  std::istringstream in(text);
  return parse_trace(in, {16384, capacity, std::move(device)});
}

std::string parse_error(const std::string &text) {
  try {
    parse(text);
  } catch (const TraceParseError &e) {
    return e.what();
  }
  return "";
}

TEST(TraceParser, ConvertsBytesToPages) {
  const auto t = parse(std::string(kHeader) + "0,R,32768,16384,100\n");
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0], (TraceRecord{100, IoOp::Read, 2, 1}));
  EXPECT_TRUE(t.warnings.empty());
}

TEST(TraceParser, RoundsOffsetDownAndLengthUp) {
  const auto t = parse(std::string(kHeader) + "0,W,40000,16385,1.5\n");
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0], (TraceRecord{1.5, IoOp::Write, 2, 2}));
}

TEST(TraceParser, ColumnsInAnyOrder) {
  const auto t = parse("timestamp_us,length_bytes,offset_bytes,opcode,device_id\n"
                       "7,16384,16384,W,3\n");
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0], (TraceRecord{7, IoOp::Write, 1, 1}));
}

TEST(TraceParser, EmptyInputsGiveNoRecords) {
  EXPECT_TRUE(parse("").records.empty());
  EXPECT_TRUE(parse(kHeader).records.empty());
}

TEST(TraceParser, ErrorsCarryTheLineNumber) {
  const std::string h(kHeader);
  EXPECT_EQ(parse_error(h + "0,R,0,16384,1\n0,X,0,16384,2\n").rfind("trace line 3:", 0),
            0u);
  EXPECT_EQ(parse_error(h + "0,R,zero,16384,1\n").rfind("trace line 2:", 0), 0u);
  EXPECT_EQ(parse_error(h + "0,R,0,16384\n").rfind("trace line 2:", 0), 0u);
  EXPECT_EQ(parse_error(h + "0,R,0,0,1\n").rfind("trace line 2:", 0), 0u);
  EXPECT_EQ(parse_error(h + "0,R,0,16384,-1\n").rfind("trace line 2:", 0), 0u);
  EXPECT_NE(parse_error("device_id,opcode,offset_bytes\n").find("length_bytes"),
            std::string::npos);
}

TEST(TraceParser, SortsOutOfOrderRowsWithAWarning) {
  const auto t = parse(std::string(kHeader) +
                       "0,R,0,16384,5\n0,R,16384,16384,2\n0,W,32768,16384,5\n");
  ASSERT_EQ(t.warnings.size(), 1u);
  ASSERT_EQ(t.records.size(), 3u);
  EXPECT_EQ(t.records[0].offset, 1u);
  EXPECT_EQ(t.records[1].offset, 0u);  // stable among equal timestamps
  EXPECT_EQ(t.records[2].offset, 2u);
}

TEST(TraceParser, FiltersByDevice) {
  const auto t = parse(std::string(kHeader) + "a,R,0,16384,1\nb,R,16384,16384,2\n",
                       1000, "b");
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0].offset, 1u);
}

TEST(TraceParser, OffsetsWrapAtCapacity) {
  const auto t = parse(std::string(kHeader) + "0,R,163840,16384,1\n", 8);
  EXPECT_EQ(t.records[0].offset, 2u);
  EXPECT_FALSE(parse_error(std::string(kHeader) + "0,R,0,1638400000,1\n").empty());
}

TEST(TraceParser, SerializeRoundTrips) {
  SyntheticSpec spec;
  spec.pattern = AccessPattern::Mixed;
  spec.read_ratio = 0.6;
  spec.request_size = 3;
  spec.op_count = 500;
  spec.interarrival_us = 0.37;
  const auto recs = generate_synthetic(spec, 400);
  std::ostringstream out;
  serialize_trace(out, recs, 16384);
  const auto back = parse(out.str(), 400);
  EXPECT_TRUE(back.warnings.empty());
  EXPECT_EQ(back.records, recs);
}

TEST(Synthetic, SequentialWrapsAtFootprint) {
  SyntheticSpec spec;
  spec.pattern = AccessPattern::Sequential;
  spec.footprint = 100;
  spec.op_count = 250;
  const auto recs = generate_synthetic(spec, 1000);
  ASSERT_EQ(recs.size(), 250u);
  for (size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].offset, i % 100);
    EXPECT_EQ(recs[i].op, IoOp::Read);
  }
}

TEST(Synthetic, SequentialRestartsWhenARequestWouldSpill) {
  SyntheticSpec spec;
  spec.pattern = AccessPattern::Sequential;
  spec.footprint = 10;
  spec.request_size = 4;
  spec.op_count = 4;
  const auto recs = generate_synthetic(spec, 10);
  EXPECT_EQ(recs[0].offset, 0u);
  EXPECT_EQ(recs[1].offset, 4u);
  EXPECT_EQ(recs[2].offset, 0u);
}

TEST(Synthetic, RandomIsUniformOverTheFootprint) {
  SyntheticSpec spec;
  spec.footprint = 1000;
  spec.op_count = 1'000'000;
  spec.seed = 9;
  const auto recs = generate_synthetic(spec, 4000);
  std::vector<uint64_t> hist(1000, 0);
  double sum = 0;
  for (const auto &r : recs) {
    ASSERT_LT(r.offset, 1000u);
    ++hist[r.offset];
    sum += static_cast<double>(r.offset);
  }
  const double mean = sum / static_cast<double>(recs.size());
  EXPECT_NEAR(mean, 499.5, 499.5 * 0.01);
  // Chi-square with 999 dof; 1,150 is far beyond the 99.9th percentile.
  const double expected = 1000.0;
  double chi2 = 0;
  for (auto h : hist) {
    chi2 += (static_cast<double>(h) - expected) * (static_cast<double>(h) - expected) /
            expected;
  }
  EXPECT_LT(chi2, 1150.0);
}

TEST(Synthetic, ReadRatioIsHonoured) {
  auto spec = *synthetic_preset("Ali121");
  spec.op_count = 200'000;
  const auto recs = generate_synthetic(spec, 5000);
  uint64_t reads = 0;
  for (const auto &r : recs) reads += r.op == IoOp::Read;
  EXPECT_NEAR(static_cast<double>(reads) / static_cast<double>(recs.size()), 0.55, 0.01);
}

TEST(Synthetic, MixedAlternatesRunsAndJumps) {
  SyntheticSpec spec;
  spec.pattern = AccessPattern::Mixed;
  spec.mix_ratio = 0.5;
  spec.op_count = 100'000;
  const auto recs = generate_synthetic(spec, 100'000);
  uint64_t continued = 0;
  for (size_t i = 1; i < recs.size(); ++i) {
    continued += recs[i].offset == recs[i - 1].offset + 1;
  }
  EXPECT_NEAR(static_cast<double>(continued) / static_cast<double>(recs.size()),
              0.5, 0.01);
}

TEST(Synthetic, HotspotReadsStayHot) {
  SyntheticSpec spec;
  spec.pattern = AccessPattern::Hotspot;
  spec.hot_offset = 140;
  spec.hot_pages = 1;
  spec.read_ratio = 0.9;
  spec.op_count = 10'000;
  uint64_t writes_hot = 0;
  uint64_t writes = 0;
  for (const auto &r : generate_synthetic(spec, 5000)) {
    if (r.op == IoOp::Read) {
      ASSERT_EQ(r.offset, 140u);
    } else {
      ++writes;
      writes_hot += r.offset == 140;
    }
  }
  EXPECT_GT(writes, 0u);
  EXPECT_LT(writes_hot, writes);
}

TEST(Synthetic, SameSeedSameStream) {
  auto spec = *synthetic_preset("Ali124");
  spec.op_count = 1000;
  EXPECT_EQ(generate_synthetic(spec, 777), generate_synthetic(spec, 777));
  auto other = spec;
  other.seed = 2;
  EXPECT_NE(generate_synthetic(spec, 777), generate_synthetic(other, 777));
}

TEST(Synthetic, RequestsFitTheFootprint) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    SyntheticSpec spec;
    spec.pattern = static_cast<AccessPattern>(uniform_index(rng, 4));
    spec.footprint = 1 + uniform_index(rng, 300);
    spec.request_size = 1 + static_cast<uint32_t>(uniform_index(rng, spec.footprint));
    spec.hot_pages = spec.request_size;
    spec.hot_offset = uniform_index(rng, spec.footprint - spec.hot_pages + 1);
    spec.read_ratio = unit_double(rng);
    spec.op_count = 300;
    spec.seed = trial;
    for (const auto &r : generate_synthetic(spec, 300)) {
      ASSERT_LE(r.offset + r.length, spec.footprint);
    }
  }
}

TEST(Synthetic, PresetsAndValidation) {
  EXPECT_EQ(synthetic_preset_names().size(), 6u);
  EXPECT_EQ(synthetic_preset("Syn1")->pattern, AccessPattern::Random);
  EXPECT_EQ(synthetic_preset("Syn2")->pattern, AccessPattern::Mixed);
  EXPECT_EQ(synthetic_preset("Ali206")->read_ratio, 0.99);
  EXPECT_FALSE(synthetic_preset("nope"));
  EXPECT_THROW(parse_access_pattern("zigzag"), std::invalid_argument);
  SyntheticSpec spec;
  spec.footprint = 2000;
  EXPECT_THROW(validate_synthetic(spec, 1000), std::invalid_argument);
  spec.footprint = 0;
  spec.read_ratio = 1.5;
  EXPECT_THROW(validate_synthetic(spec, 1000), std::invalid_argument);
}

}  // namespace
}  // namespace strawsim
