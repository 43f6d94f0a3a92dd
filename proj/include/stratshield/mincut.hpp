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

// Optimal truthful classification as a minimum s-t cut.
//
// One node per distinct training vector x, an arc s -> x with capacity equal
// to x's negative mass, an arc x -> t with x's positive mass, and an
// uncuttable arc x -> x' whenever x can report x'. Nodes left on the sink
// side of a minimum cut are accepted; the uncuttable arcs forbid accepting
// x' while rejecting any x that could report it, which is exactly the
// truthfulness constraint, and the cut capacity is the classification loss.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_set>
#include <vector>

#include "stratshield/empirical.hpp"
#include "stratshield/features.hpp"

namespace stratshield {

struct FlowArc {
  std::size_t from = 0;
  std::size_t to = 0;
  std::int64_t capacity = 0;
  bool infinite = false;
};

class FlowNetwork {
 public:
  static constexpr std::size_t kSource = 0;
  static constexpr std::size_t kSink = 1;

  explicit FlowNetwork(std::size_t node_count) : node_count_(node_count) {}

  std::size_t add_arc(std::size_t from, std::size_t to, std::int64_t capacity);
  std::size_t add_infinite_arc(std::size_t from, std::size_t to);

  std::size_t node_count() const noexcept { return node_count_; }
  const std::vector<FlowArc>& arcs() const noexcept { return arcs_; }
  std::size_t finite_arc_count() const noexcept;
  std::size_t infinite_arc_count() const noexcept;

  // Sum of finite capacities + 1; no feasible flow can saturate it.
  std::int64_t infinity() const;

  // Data nodes are numbered from 2 in the distribution's canonical order.
  const std::vector<FeatureVector>& node_vectors() const noexcept { return vectors_; }
  void set_node_vectors(std::vector<FeatureVector> v) { vectors_ = std::move(v); }

 private:
  std::size_t node_count_;
  std::vector<FlowArc> arcs_;
  std::vector<FeatureVector> vectors_;
};

struct CutResult {
  std::int64_t flow_value = 0;
  // in_source_side[v] for every node; the source is always true.
  std::vector<bool> in_source_side;
};

FlowNetwork build_graph(const EmpiricalDistribution& dist,
                        std::size_t enumeration_limit = kDefaultEnumerationLimit);

// Dinic's algorithm; the returned source side is the set of nodes reachable
// from s in the final residual graph (the source-minimal minimum cut).
CutResult max_flow_min_cut(const FlowNetwork& net);

// Capacity of finite arcs crossing source side -> sink side, or -1 if an
// infinite arc crosses.
std::int64_t cut_capacity(const FlowNetwork& net, const std::vector<bool>& in_source_side);

class MincutClassifier {
 public:
  MincutClassifier(FeatureSchema schema, std::vector<FeatureVector> training_nodes,
                   std::vector<FeatureVector> accepted);

  // 1 iff some accepted training vector is reachable from x.
  int predict(const FeatureVector& x) const;

  const FeatureSchema& schema() const noexcept { return schema_; }
  const std::vector<FeatureVector>& accepted() const noexcept { return accepted_list_; }
  const std::vector<FeatureVector>& training_nodes() const noexcept { return training_; }
  bool is_accepted(const FeatureVector& x) const { return accepted_.count(x) > 0; }

  void write(std::ostream& os) const;
  static MincutClassifier read(std::istream& is);

 private:
  FeatureSchema schema_;
  std::vector<FeatureVector> training_;
  std::vector<FeatureVector> accepted_list_;
  std::unordered_set<FeatureVector, FeatureVectorHash> accepted_;
};

struct MincutTraining {
  MincutClassifier model;
  CutResult cut;
  std::int64_t total_mass = 0;
};

MincutTraining train_mincut(const FeatureSchema& schema, const EmpiricalDistribution& dist);
MincutClassifier train_mincut(const Dataset& train);

// Loss of `model` on `dist` evaluated by prediction, as counts over total.
Rational empirical_loss(const MincutClassifier& model, const EmpiricalDistribution& dist);

struct BruteForceResult {
  Rational loss;
  std::vector<FeatureVector> accepted;
};

// Exhaustive scan of every monotone accept-set over at most 16 vectors.
BruteForceResult brute_force_optimal(const EmpiricalDistribution& dist);

}  // namespace stratshield
