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

// Feature vectors with withheld ("missing") values and the reporting lattice
// they induce: an agent holding x can report any projection of x, i.e. any
// vector obtained by replacing some present values with Missing.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace stratshield {

enum class FeatureKind { kNumeric, kCategorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  // Display names of categorical symbols, indexed by symbol id. May be empty.
  std::vector<std::string> symbols;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureSpec> features);

  // k numeric features named f0..f{k-1}.
  static FeatureSchema numeric(std::size_t k);

  std::size_t size() const noexcept { return features_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return features_.at(i); }
  const std::vector<FeatureSpec>& features() const noexcept { return features_; }

  // Returns size() when the name is unknown.
  std::size_t index_of(const std::string& name) const;

  bool operator==(const FeatureSchema& other) const;

 private:
  std::vector<FeatureSpec> features_;
};

class FeatureValue {
 public:
  enum class Tag : std::uint8_t { kMissing = 0, kNumeric = 1, kCategorical = 2 };

  constexpr FeatureValue() = default;

  static constexpr FeatureValue missing() { return FeatureValue(); }
  // Throws TypeError for NaN or infinity.
  static FeatureValue numeric(double v);
  static constexpr FeatureValue categorical(std::int32_t id) {
    FeatureValue out;
    out.tag_ = Tag::kCategorical;
    out.category_ = id;
    return out;
  }

  Tag tag() const noexcept { return tag_; }
  bool is_missing() const noexcept { return tag_ == Tag::kMissing; }
  bool is_numeric() const noexcept { return tag_ == Tag::kNumeric; }
  bool is_categorical() const noexcept { return tag_ == Tag::kCategorical; }

  double number() const;
  std::int32_t category() const;

  std::strong_ordering operator<=>(const FeatureValue& other) const noexcept;
  bool operator==(const FeatureValue& other) const noexcept {
    return (*this <=> other) == std::strong_ordering::equal;
  }

  std::size_t hash() const noexcept;

 private:
  Tag tag_ = Tag::kMissing;
  std::int32_t category_ = 0;
  double number_ = 0.0;
};

class FeatureVector {
 public:
  FeatureVector() = default;
  explicit FeatureVector(std::size_t k) : values_(k) {}
  explicit FeatureVector(std::vector<FeatureValue> values)
      : values_(std::move(values)) {}
  FeatureVector(std::initializer_list<FeatureValue> values) : values_(values) {}

  std::size_t size() const noexcept { return values_.size(); }
  const FeatureValue& operator[](std::size_t i) const { return values_[i]; }
  FeatureValue& operator[](std::size_t i) { return values_[i]; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }
  const std::vector<FeatureValue>& values() const noexcept { return values_; }

  std::size_t present_count() const noexcept;
  // Indices of present (non-Missing) values, ascending.
  std::vector<std::size_t> present_indices() const;

  std::strong_ordering operator<=>(const FeatureVector& other) const noexcept {
    return values_ <=> other.values_;
  }
  bool operator==(const FeatureVector& other) const noexcept = default;

  std::size_t hash() const noexcept;

 private:
  std::vector<FeatureValue> values_;
};

struct FeatureVectorHash {
  std::size_t operator()(const FeatureVector& x) const noexcept { return x.hash(); }
};

struct LabeledExample {
  FeatureVector x;
  int y = 0;
  bool operator==(const LabeledExample&) const = default;
};

struct Dataset {
  FeatureSchema schema;
  std::vector<LabeledExample> rows;

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }
  std::size_t positives() const noexcept;

  // Arity, label range and value-kind agreement with the schema.
  void validate() const;
};

class FeatureSubset {
 public:
  FeatureSubset() = default;
  // Sorts and deduplicates.
  explicit FeatureSubset(std::vector<std::size_t> members);
  FeatureSubset(std::initializer_list<std::size_t> members)
      : FeatureSubset(std::vector<std::size_t>(members)) {}

  static FeatureSubset all(std::size_t k);

  const std::vector<std::size_t>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(std::size_t i) const noexcept;

  // Throws SchemaError if any member is >= k.
  void check_range(std::size_t k) const;

  auto operator<=>(const FeatureSubset&) const = default;

 private:
  std::vector<std::size_t> members_;
};

// Default cap on present features for lattice enumeration (2^20 reports).
inline constexpr std::size_t kDefaultEnumerationLimit = 20;

// x restricted to S: values at indices in S are kept, the rest become Missing.
FeatureVector project(const FeatureVector& x, const FeatureSubset& s);

// Keeps present features whose bit in `withheld` (indexed over
// x.present_indices()) is clear.
FeatureVector withhold(const FeatureVector& x, std::uint64_t withheld);

// True iff an agent holding x can report x2 (x2 is a projection of x).
bool can_report(const FeatureVector& x, const FeatureVector& x2);

// All 2^p projections of x, p = present features, ordered by the withheld
// bitmask ascending (index 0 is x itself, the last entry is all-Missing).
std::vector<FeatureVector> reachable_set(
    const FeatureVector& x, std::size_t limit = kDefaultEnumerationLimit);

// Calls fn(report) on every projection of x in reachable_set order without
// materialising the lattice. Stops early when fn returns false.
void for_each_report(const FeatureVector& x,
                     const std::function<bool(const FeatureVector&)>& fn,
                     std::size_t limit = kDefaultEnumerationLimit);

std::string to_string(const FeatureVector& x, const FeatureSchema* schema = nullptr);

}  // namespace stratshield
