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

#include "stratshield/empirical.hpp"

#include <numeric>

#include "stratshield/error.hpp"

namespace stratshield {

Rational Rational::reduced() const {
  const auto g = std::gcd(num, den);
  if (g == 0) return *this;
  return {num / g, den / g};
}

EmpiricalDistribution::EmpiricalDistribution(std::size_t arity, Map entries)
    : arity_(arity), entries_(std::move(entries)) {
  for (const auto& [x, c] : entries_) {
    if (x.size() != arity_) throw SchemaError("empirical entry has wrong arity");
    if (c.pos < 0 || c.neg < 0) throw Error(ErrorCode::kInvalidArgument, "negative mass");
    total_ += c.pos + c.neg;
  }
  if (total_ <= 0) throw Error(ErrorCode::kEmptyData, "empirical distribution has no mass");
}

EmpiricalDistribution EmpiricalDistribution::from_dataset(const Dataset& data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyData, "cannot build a distribution from no rows");
  Map entries;
  for (const auto& row : data.rows) {
    auto& c = entries[row.x];
    (row.y == 1 ? c.pos : c.neg) += 1;
  }
  return EmpiricalDistribution(data.schema.size(), std::move(entries));
}

EmpiricalDistribution EmpiricalDistribution::from_weighted(const std::vector<WeightedEntry>& entries) {
  if (entries.empty()) throw Error(ErrorCode::kEmptyData, "no weighted entries");
  constexpr std::int64_t kMaxDenominator = 1'000'000;
  std::int64_t lcd = 1;
  for (const auto& e : entries) {
    for (const auto& w : {e.pos, e.neg}) {
      if (w.den <= 0) throw Error(ErrorCode::kInvalidArgument, "weight denominator must be positive");
      if (w.num < 0) throw Error(ErrorCode::kInvalidArgument, "negative weight");
      lcd = std::lcm(lcd, w.reduced().den);
      if (lcd > kMaxDenominator) {
        throw Error(ErrorCode::kOverflow, "common denominator exceeds 1e6");
      }
    }
  }
  const std::size_t arity = entries.front().x.size();
  Map map;
  for (const auto& e : entries) {
    auto& c = map[e.x];
    const auto p = e.pos.reduced();
    const auto n = e.neg.reduced();
    c.pos += p.num * (lcd / p.den);
    c.neg += n.num * (lcd / n.den);
  }
  return EmpiricalDistribution(arity, std::move(map));
}

Rational EmpiricalDistribution::positive_mass(const FeatureVector& x) const {
  auto it = entries_.find(x);
  return {it == entries_.end() ? 0 : it->second.pos, total_};
}

Rational EmpiricalDistribution::negative_mass(const FeatureVector& x) const {
  auto it = entries_.find(x);
  return {it == entries_.end() ? 0 : it->second.neg, total_};
}

}  // namespace stratshield
