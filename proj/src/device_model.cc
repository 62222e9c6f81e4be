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

#include "strawsim/device_model.hh"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "strawsim/random.hh"

namespace strawsim {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Inverse of the standard normal CDF by bisection; only used at block init.
double normal_quantile(double p) {
  double lo = -10.0;
  double hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ReliabilityConfig ReliabilityConfig::paper_anchored() {
  ReliabilityConfig c;
  c.tolerance_min = 590'000;
  c.tolerance_max = 1'400'000;
  c.alpha_mean = 8.0;
  c.alpha_spread = 0.08;
  return c;
}

void ReliabilityConfig::validate() const {
  if (scale < 1) {
    throw std::invalid_argument("reliability.scale must be >= 1");
  }
  if (tolerance_min > tolerance_max) {
    throw std::invalid_argument(
        "reliability.tolerance_min must be <= tolerance_max");
  }
  if (tolerance_min / scale < 1) {
    throw std::invalid_argument(
        "reliability.tolerance_min / scale must be >= 1");
  }
  if (!(alpha_mean >= 1.0)) {
    throw std::invalid_argument("reliability.alpha_mean must be >= 1");
  }
  if (!(alpha_spread >= 0.0 && alpha_spread < 1.0)) {
    throw std::invalid_argument("reliability.alpha_spread must be in [0, 1)");
  }
  if (pec_degradation.empty()) {
    throw std::invalid_argument("reliability.pec_degradation must not be empty");
  }
  for (size_t i = 0; i < pec_degradation.size(); ++i) {
    const auto &e = pec_degradation[i];
    if (!(e.factor > 0.0 && e.factor <= 1.0)) {
      throw std::invalid_argument(
          "reliability.pec_degradation factors must be in (0, 1]");
    }
    if (i > 0) {
      if (e.pec_limit <= pec_degradation[i - 1].pec_limit) {
        throw std::invalid_argument(
            "reliability.pec_degradation must be sorted by pec");
      }
      if (e.factor > pec_degradation[i - 1].factor) {
        throw std::invalid_argument(
            "reliability.pec_degradation factors must not increase with pec");
      }
    }
  }
}

double ReliabilityConfig::tolerance_quantile(double p) const {
  p = std::clamp(p, 0.0, 1.0);
  const double lo = static_cast<double>(tolerance_min) / scale;
  const double hi = static_cast<double>(tolerance_max) / scale;
  if (hi <= lo) {
    return lo;
  }
  if (distribution == ToleranceDistribution::Uniform) {
    return lo + p * (hi - lo);
  }
  // Normal centred on the range with the endpoints at +/- 3 sigma,
  // truncated to [lo, hi].
  const double mean = 0.5 * (lo + hi);
  const double sd = (hi - lo) / 6.0;
  const double a = normal_cdf((lo - mean) / sd);
  const double b = normal_cdf((hi - mean) / sd);
  const double v = mean + sd * normal_quantile(a + p * (b - a));
  return std::clamp(v, lo, hi);
}

uint64_t ReliabilityConfig::median_tolerance() const {
  return (tolerance_min + tolerance_max) / 2 / scale;
}

double ReliabilityConfig::pec_factor(uint32_t pec) const {
  for (const auto &e : pec_degradation) {
    if (pec <= e.pec_limit) {
      return e.factor;
    }
  }
  return pec_degradation.back().factor;
}

uint64_t ReliabilityConfig::group_floor(WlGroup g, uint32_t pec) const {
  const double base =
      symmetric_mode
          ? static_cast<double>(median_tolerance())
          : std::floor(tolerance_quantile(static_cast<int>(g) / 4.0));
  return static_cast<uint64_t>(std::floor(base * pec_factor(pec)));
}

Alpha ReliabilityConfig::max_alpha() const {
  if (symmetric_mode) {
    return Alpha::from_tenths(10);
  }
  const auto t = std::llround(alpha_mean * 10.0 * (1.0 + alpha_spread));
  return Alpha::from_tenths(static_cast<uint32_t>(std::max<long long>(10, t)));
}

std::vector<WlGroundTruth> init_block_ground_truth(BlockId block_id,
                                                   uint32_t wls_per_block,
                                                   const ReliabilityConfig &cfg,
                                                   uint32_t pec) {
  std::vector<WlGroundTruth> wls(wls_per_block);
  const double factor = cfg.pec_factor(pec);

  if (cfg.symmetric_mode) {
    const uint64_t median = cfg.median_tolerance();
    for (uint32_t i = 0; i < wls_per_block; ++i) {
      auto &w = wls[i];
      w.group = static_cast<WlGroup>(uint64_t{i} * kNumGroups / wls_per_block);
      w.base_tolerance = median;
      w.tolerance = static_cast<uint64_t>(std::floor(median * factor));
      w.alpha = Alpha::from_tenths(10);
    }
    return wls;
  }

  std::mt19937_64 rng(derive_seed(cfg.seed, block_id));

  // Balanced labels, then a Fisher-Yates shuffle to place them.
  std::vector<WlGroup> labels(wls_per_block);
  for (uint32_t i = 0; i < wls_per_block; ++i) {
    labels[i] = static_cast<WlGroup>(uint64_t{i} * kNumGroups / wls_per_block);
  }
  for (uint32_t i = wls_per_block; i > 1; --i) {
    std::swap(labels[i - 1], labels[uniform_index(rng, i)]);
  }

  for (uint32_t i = 0; i < wls_per_block; ++i) {
    auto &w = wls[i];
    w.group = labels[i];
    const double p = (static_cast<int>(w.group) + unit_double(rng)) / 4.0;
    w.base_tolerance =
        static_cast<uint64_t>(std::floor(cfg.tolerance_quantile(p)));
    w.tolerance = static_cast<uint64_t>(std::floor(w.base_tolerance * factor));
    const double a =
        cfg.alpha_mean * (1.0 + cfg.alpha_spread * (2.0 * unit_double(rng) - 1.0));
    w.alpha = Alpha::from_tenths(
        static_cast<uint32_t>(std::max<long long>(10, std::llround(a * 10.0))));
  }
  return wls;
}

BlockReliability::BlockReliability(std::vector<WlGroundTruth> wls,
                                   uint32_t pec, const ReliabilityConfig &cfg)
    : wls_(std::move(wls)), pec_(pec), cfg_(&cfg) {}

void BlockReliability::apply_read_stress(WlIndex target,
                                         std::vector<WlIndex> *newly_corrupted) {
  const uint32_t n = size();
  for (uint32_t j = 0; j < n; ++j) {
    auto &w = wls_[j];
    if (j == target || !w.programmed) {
      continue;
    }
    const bool adjacent = j + 1 == target || j == target + 1;
    const bool was = w.corrupted();
    w.stress = EffectiveReads::from_tenths(w.stress.tenths() +
                                           (adjacent ? w.alpha.tenths() : 10));
    if (newly_corrupted && !was && w.corrupted()) {
      newly_corrupted->push_back(j);
    }
  }
}

std::vector<WlIndex> BlockReliability::check_integrity() const {
  std::vector<WlIndex> out;
  for (uint32_t j = 0; j < size(); ++j) {
    if (wls_[j].corrupted()) {
      out.push_back(j);
    }
  }
  return out;
}

void BlockReliability::erase() {
  ++pec_;
  const double factor = cfg_->pec_factor(pec_);
  for (auto &w : wls_) {
    w.stress = EffectiveReads();
    w.programmed = false;
    w.tolerance = static_cast<uint64_t>(std::floor(w.base_tolerance * factor));
  }
}

void BlockReliability::program_all() {
  for (auto &w : wls_) {
    w.programmed = true;
  }
}

DeviceModel::DeviceModel(const Geometry &geometry, const ReliabilityConfig &cfg,
                         uint32_t initial_pec)
    : geometry_(geometry), cfg_(cfg) {
  geometry_.validate();
  cfg_.validate();
  const uint64_t n = geometry_.blocks();
  blocks_.reserve(n);
  for (uint64_t b = 0; b < n; ++b) {
    blocks_.emplace_back(
        init_block_ground_truth(static_cast<BlockId>(b),
                                geometry_.wls_per_block, cfg_, initial_pec),
        initial_pec, cfg_);
  }
}

void DeviceModel::dump_ground_truth_csv(std::ostream &out) const {
  out << "block,wl,group,tolerance,alpha\n";
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const auto wls = blocks_[b].wls();
    for (size_t i = 0; i < wls.size(); ++i) {
      const auto &w = wls[i];
      out << b << ',' << i << ',' << to_string(w.group) << ',' << w.tolerance
          << ',' << to_string(w.alpha) << '\n';
    }
  }
}

}  // namespace strawsim
