/*
 * Copyright 2026 The StratShield Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "stratshield/features.hpp"

namespace stratshield {

// Exact rational p/q with q > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  Rational reduced() const;
  // Cross-multiplied comparison; exact for the magnitudes used here.
  friend bool operator==(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
  }
};

struct MassCounts {
  std::int64_t pos = 0;
  std::int64_t neg = 0;
};

// Positive/negative mass per distinct feature vector, stored as integer
// counts over a common total.
class EmpiricalDistribution {
 public:
  using Map = std::map<FeatureVector, MassCounts>;

  EmpiricalDistribution(std::size_t arity, Map entries);

  static EmpiricalDistribution from_dataset(const Dataset& data);

  struct WeightedEntry {
    FeatureVector x;
    Rational pos;
    Rational neg;
  };
  // Scales all weights by their least common denominator (<= 1e6).
  static EmpiricalDistribution from_weighted(const std::vector<WeightedEntry>& entries);

  const Map& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t arity() const noexcept { return arity_; }
  std::int64_t total() const noexcept { return total_; }

  Rational positive_mass(const FeatureVector& x) const;
  Rational negative_mass(const FeatureVector& x) const;

 private:
  std::size_t arity_ = 0;
  Map entries_;
  std::int64_t total_ = 0;
};

}  // namespace stratshield
