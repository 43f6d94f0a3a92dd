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

#include "stratshield/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>

#include "stratshield/error.hpp"
#include "stratshield/serialize.hpp"

namespace stratshield {

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features)
    : features_(std::move(features)) {
  if (features_.empty()) throw SchemaError("schema must have at least one feature");
  std::set<std::string> seen;
  for (const auto& f : features_) {
    if (!seen.insert(f.name).second) {
      throw SchemaError("duplicate feature name '" + f.name + "'");
    }
  }
}

FeatureSchema FeatureSchema::numeric(std::size_t k) {
  std::vector<FeatureSpec> specs;
  specs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    specs.push_back({"f" + std::to_string(i), FeatureKind::kNumeric, {}});
  }
  return FeatureSchema(std::move(specs));
}

std::size_t FeatureSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return features_.size();
}

bool FeatureSchema::operator==(const FeatureSchema& other) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (features_[i].name != other.features_[i].name ||
        features_[i].kind != other.features_[i].kind) {
      return false;
    }
  }
  return true;
}

FeatureValue FeatureValue::numeric(double v) {
  if (!std::isfinite(v)) throw TypeError("numeric feature values must be finite");
  FeatureValue out;
  out.tag_ = Tag::kNumeric;
  out.number_ = v;
  return out;
}

double FeatureValue::number() const {
  if (tag_ != Tag::kNumeric) throw TypeError("feature value is not numeric");
  return number_;
}

std::int32_t FeatureValue::category() const {
  if (tag_ != Tag::kCategorical) throw TypeError("feature value is not categorical");
  return category_;
}

std::strong_ordering FeatureValue::operator<=>(const FeatureValue& other) const noexcept {
  if (tag_ != other.tag_) return tag_ <=> other.tag_;
  switch (tag_) {
    case Tag::kMissing:
      return std::strong_ordering::equal;
    case Tag::kCategorical:
      return category_ <=> other.category_;
    case Tag::kNumeric:
      // Finite by construction, so the partial order is total here.
      if (number_ < other.number_) return std::strong_ordering::less;
      if (number_ > other.number_) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
  }
  return std::strong_ordering::equal;
}

std::size_t FeatureValue::hash() const noexcept {
  std::size_t h = static_cast<std::size_t>(tag_) * 0x9E3779B97F4A7C15ULL;
  switch (tag_) {
    case Tag::kMissing:
      break;
    case Tag::kCategorical:
      h ^= std::hash<std::int32_t>{}(category_) + 0x632BE59BD9B4E019ULL;
      break;
    case Tag::kNumeric:
      // +0.0 and -0.0 compare equal, so hash them alike.
      h ^= std::hash<double>{}(number_ == 0.0 ? 0.0 : number_) + 0x85EBCA77C2B2AE63ULL;
      break;
  }
  return h;
}

std::size_t FeatureVector::present_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      values_.begin(), values_.end(), [](const FeatureValue& v) { return !v.is_missing(); }));
}

std::vector<std::size_t> FeatureVector::present_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!values_[i].is_missing()) out.push_back(i);
  }
  return out;
}

std::size_t FeatureVector::hash() const noexcept {
  std::size_t h = values_.size();
  for (const auto& v : values_) {
    h ^= v.hash() + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::size_t Dataset::positives() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [](const LabeledExample& r) { return r.y == 1; }));
}

void Dataset::validate() const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.x.size() != schema.size()) {
      throw SchemaError("row " + std::to_string(r) + " has arity " +
                        std::to_string(row.x.size()) + ", schema has " +
                        std::to_string(schema.size()));
    }
    if (row.y != 0 && row.y != 1) {
      throw SchemaError("row " + std::to_string(r) + " has non-binary label");
    }
    for (std::size_t i = 0; i < row.x.size(); ++i) {
      const auto& v = row.x[i];
      if (v.is_missing()) continue;
      const bool numeric = schema[i].kind == FeatureKind::kNumeric;
      if (numeric != v.is_numeric()) {
        throw SchemaError("row " + std::to_string(r) + " feature '" + schema[i].name +
                          "' does not match its declared kind");
      }
    }
  }
}

FeatureSubset::FeatureSubset(std::vector<std::size_t> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

FeatureSubset FeatureSubset::all(std::size_t k) {
  std::vector<std::size_t> m(k);
  for (std::size_t i = 0; i < k; ++i) m[i] = i;
  return FeatureSubset(std::move(m));
}

bool FeatureSubset::contains(std::size_t i) const noexcept {
  return std::binary_search(members_.begin(), members_.end(), i);
}

void FeatureSubset::check_range(std::size_t k) const {
  if (!members_.empty() && members_.back() >= k) {
    throw SchemaError("feature index " + std::to_string(members_.back()) +
                      " out of range for arity " + std::to_string(k));
  }
}

FeatureVector project(const FeatureVector& x, const FeatureSubset& s) {
  s.check_range(x.size());
  FeatureVector out(x.size());
  for (std::size_t i : s.members()) out[i] = x[i];
  return out;
}

FeatureVector withhold(const FeatureVector& x, std::uint64_t withheld) {
  FeatureVector out = x;
  std::size_t bit = 0;
  for (std::size_t i = 0; i < x.size() && withheld != 0; ++i) {
    if (x[i].is_missing()) continue;
    if (withheld & (std::uint64_t{1} << bit)) out[i] = FeatureValue::missing();
    ++bit;
  }
  return out;
}

bool can_report(const FeatureVector& x, const FeatureVector& x2) {
  if (x.size() != x2.size()) throw SchemaError("cannot compare vectors of different arity");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x2[i].is_missing() && !(x2[i] == x[i])) return false;
  }
  return true;
}

namespace {

void check_lattice(std::size_t present, std::size_t limit) {
  if (present > limit || present >= 63) {
    throw LatticeTooLarge("lattice too large: " + std::to_string(present) +
                          " present features exceed enumeration limit " +
                          std::to_string(limit));
  }
}

}  // namespace

void for_each_report(const FeatureVector& x,
                     const std::function<bool(const FeatureVector&)>& fn,
                     std::size_t limit) {
  const auto present = x.present_indices();
  check_lattice(present.size(), limit);
  const std::uint64_t count = std::uint64_t{1} << present.size();
  FeatureVector report = x;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (std::size_t b = 0; b < present.size(); ++b) {
      const std::size_t i = present[b];
      report[i] = (mask >> b) & 1U ? FeatureValue::missing() : x[i];
    }
    if (!fn(report)) return;
  }
}

std::vector<FeatureVector> reachable_set(const FeatureVector& x, std::size_t limit) {
  std::vector<FeatureVector> out;
  check_lattice(x.present_count(), limit);
  out.reserve(std::size_t{1} << x.present_count());
  for_each_report(
      x,
      [&](const FeatureVector& r) {
        out.push_back(r);
        return true;
      },
      limit);
  return out;
}

std::string to_string(const FeatureVector& x, const FeatureSchema* schema) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ',';
    const auto& v = x[i];
    if (v.is_missing()) {
      os << '*';
    } else if (v.is_numeric()) {
      os << format_double(v.number());
    } else {
      const auto id = v.category();
      if (schema && i < schema->size() && id >= 0 &&
          static_cast<std::size_t>(id) < (*schema)[i].symbols.size()) {
        os << (*schema)[i].symbols[static_cast<std::size_t>(id)];
      } else {
        os << '#' << id;
      }
    }
  }
  os << ')';
  return os.str();
}

}  // namespace stratshield
