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

#include "stratshield/mincut.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <unordered_map>

#include "stratshield/error.hpp"
#include "stratshield/serialize.hpp"
#include "stratshield/transforms.hpp"

namespace stratshield {

std::size_t FlowNetwork::add_arc(std::size_t from, std::size_t to, std::int64_t capacity) {
  if (from >= node_count_ || to >= node_count_) throw SchemaError("arc endpoint out of range");
  if (capacity < 0) throw Error(ErrorCode::kInvalidArgument, "negative arc capacity");
  arcs_.push_back({from, to, capacity, false});
  return arcs_.size() - 1;
}

std::size_t FlowNetwork::add_infinite_arc(std::size_t from, std::size_t to) {
  if (from >= node_count_ || to >= node_count_) throw SchemaError("arc endpoint out of range");
  arcs_.push_back({from, to, 0, true});
  return arcs_.size() - 1;
}

std::size_t FlowNetwork::finite_arc_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(arcs_.begin(), arcs_.end(), [](const FlowArc& a) { return !a.infinite; }));
}

std::size_t FlowNetwork::infinite_arc_count() const noexcept {
  return arcs_.size() - finite_arc_count();
}

std::int64_t FlowNetwork::infinity() const {
  std::int64_t sum = 0;
  for (const auto& a : arcs_) {
    if (a.infinite) continue;
    if (a.capacity > std::numeric_limits<std::int64_t>::max() - sum - 1) {
      throw Error(ErrorCode::kOverflow, "total arc capacity overflows 64-bit integers");
    }
    sum += a.capacity;
  }
  return sum + 1;
}

FlowNetwork build_graph(const EmpiricalDistribution& dist, std::size_t enumeration_limit) {
  const std::size_t n = dist.size();
  FlowNetwork net(n + 2);
  std::vector<FeatureVector> vectors;
  vectors.reserve(n);
  std::unordered_map<FeatureVector, std::size_t, FeatureVectorHash> node_of;
  for (const auto& [x, counts] : dist.entries()) {
    const std::size_t node = vectors.size() + 2;
    node_of.emplace(x, node);
    vectors.push_back(x);
    net.add_arc(FlowNetwork::kSource, node, counts.neg);
    net.add_arc(node, FlowNetwork::kSink, counts.pos);
  }
  for (std::size_t a = 0; a < n; ++a) {
    const auto& x = vectors[a];
    const std::size_t p = x.present_count();
    // Enumerate x's projections when that is cheaper than scanning all nodes.
    if (p <= enumeration_limit && p < 63 && (std::uint64_t{1} << p) <= n) {
      std::vector<std::size_t> targets;
      for_each_report(
          x,
          [&](const FeatureVector& r) {
            if (!(r == x)) {
              auto it = node_of.find(r);
              if (it != node_of.end()) targets.push_back(it->second);
            }
            return true;
          },
          enumeration_limit);
      std::sort(targets.begin(), targets.end());
      for (auto t : targets) net.add_infinite_arc(a + 2, t);
    } else {
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b && can_report(x, vectors[b])) net.add_infinite_arc(a + 2, b + 2);
      }
    }
  }
  net.set_node_vectors(std::move(vectors));
  return net;
}

namespace {

// Residual graph with paired forward/backward edges.
class Dinic {
 public:
  explicit Dinic(const FlowNetwork& net) : adj_(net.node_count()) {
    const std::int64_t inf = net.infinity();
    for (const auto& a : net.arcs()) add(a.from, a.to, a.infinite ? inf : a.capacity);
  }

  std::int64_t run(std::size_t s, std::size_t t) {
    std::int64_t flow = 0;
    while (bfs(s, t)) {
      it_.assign(adj_.size(), 0);
      while (std::int64_t pushed = dfs(s, t, std::numeric_limits<std::int64_t>::max())) {
        flow += pushed;
      }
    }
    return flow;
  }

  std::vector<bool> reachable_from(std::size_t s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::queue<std::size_t> q;
    seen[s] = true;
    q.push(s);
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      for (auto e : adj_[v]) {
        const auto& edge = edges_[e];
        if (edge.cap > 0 && !seen[edge.to]) {
          seen[edge.to] = true;
          q.push(edge.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    std::size_t to;
    std::int64_t cap;
  };

  void add(std::size_t u, std::size_t v, std::int64_t cap) {
    adj_[u].push_back(edges_.size());
    edges_.push_back({v, cap});
    adj_[v].push_back(edges_.size());
    edges_.push_back({u, 0});
  }

  bool bfs(std::size_t s, std::size_t t) {
    level_.assign(adj_.size(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      for (auto e : adj_[v]) {
        const auto& edge = edges_[e];
        if (edge.cap > 0 && level_[edge.to] < 0) {
          level_[edge.to] = level_[v] + 1;
          q.push(edge.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(std::size_t v, std::size_t t, std::int64_t limit) {
    if (v == t) return limit;
    for (auto& i = it_[v]; i < adj_[v].size(); ++i) {
      const auto e = adj_[v][i];
      auto& edge = edges_[e];
      if (edge.cap <= 0 || level_[edge.to] != level_[v] + 1) continue;
      const std::int64_t pushed = dfs(edge.to, t, std::min(limit, edge.cap));
      if (pushed > 0) {
        edge.cap -= pushed;
        edges_[e ^ 1].cap += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

}  // namespace

CutResult max_flow_min_cut(const FlowNetwork& net) {
  Dinic dinic(net);
  CutResult out;
  out.flow_value = dinic.run(FlowNetwork::kSource, FlowNetwork::kSink);
  out.in_source_side = dinic.reachable_from(FlowNetwork::kSource);
  return out;
}

std::int64_t cut_capacity(const FlowNetwork& net, const std::vector<bool>& in_source_side) {
  if (in_source_side.size() != net.node_count()) throw SchemaError("cut has wrong node count");
  std::int64_t sum = 0;
  for (const auto& a : net.arcs()) {
    if (in_source_side[a.from] && !in_source_side[a.to]) {
      if (a.infinite) return -1;
      sum += a.capacity;
    }
  }
  return sum;
}

MincutClassifier::MincutClassifier(FeatureSchema schema, std::vector<FeatureVector> training_nodes,
                                   std::vector<FeatureVector> accepted)
    : schema_(std::move(schema)),
      training_(std::move(training_nodes)),
      accepted_list_(std::move(accepted)),
      accepted_(accepted_list_.begin(), accepted_list_.end()) {
  for (const auto& a : accepted_list_) {
    if (a.size() != schema_.size()) throw SchemaError("accepted vector has wrong arity");
  }
}

int MincutClassifier::predict(const FeatureVector& x) const {
  if (x.size() != schema_.size()) throw SchemaError("mincut predict: arity mismatch");
  if (accepted_.empty()) return 0;
  const std::size_t p = x.present_count();
  if (p <= kDefaultEnumerationLimit && (std::size_t{1} << p) <= accepted_list_.size()) {
    bool hit = false;
    for_each_report(x, [&](const FeatureVector& r) {
      hit = accepted_.count(r) > 0;
      return !hit;
    });
    return hit ? 1 : 0;
  }
  for (const auto& a : accepted_list_) {
    if (can_report(x, a)) return 1;
  }
  return 0;
}

void MincutClassifier::write(std::ostream& os) const {
  TextWriter w(os);
  write_schema(w, schema_);
  w.key("training").value(training_.size());
  for (const auto& x : training_) write_vector(w, "node", x);
  w.key("accepted").value(accepted_list_.size());
  for (const auto& x : accepted_list_) write_vector(w, "node", x);
  w.end_line();
}

MincutClassifier MincutClassifier::read(std::istream& is) {
  TextReader r(is);
  auto schema = read_schema(r);
  const auto k = schema.size();
  auto read_nodes = [&](const std::string& key) {
    const auto n = static_cast<std::size_t>(parse_int(r.expect(key, 1)[0]));
    std::vector<FeatureVector> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(parse_vector(r.expect("node", k), 0, k));
    return out;
  };
  auto training = read_nodes("training");
  auto accepted = read_nodes("accepted");
  return MincutClassifier(std::move(schema), std::move(training), std::move(accepted));
}

MincutTraining train_mincut(const FeatureSchema& schema, const EmpiricalDistribution& dist) {
  if (dist.arity() != schema.size()) throw SchemaError("distribution/schema arity mismatch");
  const auto net = build_graph(dist);
  auto cut = max_flow_min_cut(net);
  std::vector<FeatureVector> accepted;
  for (std::size_t i = 0; i < net.node_vectors().size(); ++i) {
    if (!cut.in_source_side[i + 2]) accepted.push_back(net.node_vectors()[i]);
  }
  MincutClassifier model(schema, net.node_vectors(), std::move(accepted));
  return {std::move(model), std::move(cut), dist.total()};
}

MincutClassifier train_mincut(const Dataset& train) {
  return train_mincut(train.schema, EmpiricalDistribution::from_dataset(train)).model;
}

Rational empirical_loss(const MincutClassifier& model, const EmpiricalDistribution& dist) {
  std::int64_t loss = 0;
  for (const auto& [x, c] : dist.entries()) loss += model.predict(x) ? c.neg : c.pos;
  return {loss, dist.total()};
}

BruteForceResult brute_force_optimal(const EmpiricalDistribution& dist) {
  constexpr std::size_t kMaxVectors = 16;
  const std::size_t n = dist.size();
  if (n > kMaxVectors) {
    throw Error(ErrorCode::kInvalidArgument,
                "brute force limited to 16 distinct vectors, got " + std::to_string(n));
  }
  std::vector<FeatureVector> xs;
  std::vector<MassCounts> counts;
  for (const auto& [x, c] : dist.entries()) {
    xs.push_back(x);
    counts.push_back(c);
  }
  // reporters[j]: nodes i != j that can report xs[j].
  std::vector<std::uint32_t> reporters(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && can_report(xs[i], xs[j])) reporters[j] |= std::uint32_t{1} << i;
    }
  }
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::uint32_t best_mask = 0;
  const std::uint32_t count = std::uint32_t{1} << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    bool monotone = true;
    for (std::size_t j = 0; j < n && monotone; ++j) {
      if ((mask >> j) & 1U) monotone = (reporters[j] & ~mask) == 0;
    }
    if (!monotone) continue;
    std::int64_t loss = 0;
    for (std::size_t j = 0; j < n; ++j) loss += ((mask >> j) & 1U) ? counts[j].neg : counts[j].pos;
    if (loss < best) {
      best = loss;
      best_mask = mask;
    }
  }
  BruteForceResult out;
  out.loss = {best, dist.total()};
  for (std::size_t j = 0; j < n; ++j) {
    if ((best_mask >> j) & 1U) out.accepted.push_back(xs[j]);
  }
  return out;
}

}  // namespace stratshield
