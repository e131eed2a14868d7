// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Factor trees and semiring belief propagation over them.
//
// Node ids: variables (parts) are 0..R-1, factor f is node R + f. A factor
// over parts (r_0, ..., r_{c-1}) enumerates its configurations as
// sum_j y_{r_j} M^j.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dpp/semiring.hpp"

namespace dpp {

class FactorTree {
 public:
  FactorTree() = default;

  FactorTree(std::size_t parts, std::size_t labels,
             std::vector<std::vector<std::size_t>> factors)
      : parts_(parts), labels_(labels), factors_(std::move(factors)) {
    if (parts == 0 || labels == 0) fail(ErrorCode::kInvalidInput, "empty factor graph");
    adjacency_.assign(parts_ + factors_.size(), {});
    std::vector<bool> covered(parts_, false);
    std::size_t edges = 0;
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      const auto& scope = factors_[f];
      if (scope.empty()) fail(ErrorCode::kInvalidInput, "factor with no parts");
      for (std::size_t j = 0; j < scope.size(); ++j) {
        const std::size_t r = scope[j];
        if (r >= parts_) fail(ErrorCode::kInvalidInput, "factor references a missing part");
        for (std::size_t i = 0; i < j; ++i) {
          if (scope[i] == r) fail(ErrorCode::kInvalidInput, "factor repeats a part");
        }
        covered[r] = true;
        adjacency_[r].push_back(parts_ + f);
        adjacency_[parts_ + f].push_back(r);
        ++edges;
      }
      double configs = 1.0;
      for (std::size_t j = 0; j < scope.size(); ++j) configs *= static_cast<double>(labels_);
      if (configs > 1e8) fail(ErrorCode::kInvalidInput, "factor table too large");
    }
    for (std::size_t r = 0; r < parts_; ++r) {
      if (!covered[r]) {
        fail(ErrorCode::kUnsupportedTopology,
             "part " + std::to_string(r) + " belongs to no factor");
      }
    }
    if (edges + 1 != node_count()) {
      fail(ErrorCode::kUnsupportedTopology, "factor graph is not a tree");
    }
    std::vector<bool> seen(node_count(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (auto v : adjacency_[u]) {
        if (!seen[v]) {
          seen[v] = true;
          ++reached;
          stack.push_back(v);
        }
      }
    }
    if (reached != node_count()) {
      fail(ErrorCode::kUnsupportedTopology, "factor graph is not connected");
    }
  }

  /// Chain with one unary factor per part and pairwise factors
  /// (r, r + 1). Factor ids: unary r is r, pairwise (r, r+1) is R + r.
  static FactorTree chain(std::size_t parts, std::size_t labels) {
    std::vector<std::vector<std::size_t>> factors;
    for (std::size_t r = 0; r < parts; ++r) factors.push_back({r});
    for (std::size_t r = 0; r + 1 < parts; ++r) factors.push_back({r, r + 1});
    return FactorTree(parts, labels, std::move(factors));
  }

  std::size_t parts() const { return parts_; }
  std::size_t labels() const { return labels_; }
  std::size_t factor_count() const { return factors_.size(); }
  std::size_t node_count() const { return parts_ + factors_.size(); }
  bool is_factor(std::size_t node) const { return node >= parts_; }
  std::size_t factor_node(std::size_t f) const { return parts_ + f; }
  const std::vector<std::size_t>& scope(std::size_t f) const { return factors_[f]; }
  const std::vector<std::size_t>& neighbors(std::size_t node) const { return adjacency_[node]; }

  std::size_t config_count(std::size_t f) const {
    std::size_t n = 1;
    for (std::size_t j = 0; j < factors_[f].size(); ++j) n *= labels_;
    return n;
  }

  /// Labels of the factor's parts, in scope order.
  void decode(std::size_t f, std::size_t config, std::vector<std::size_t>& out) const {
    const auto& s = factors_[f];
    out.resize(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
      out[j] = config % labels_;
      config /= labels_;
    }
  }

  /// Configuration of factor f under a full assignment.
  std::size_t encode(std::size_t f, const std::vector<std::size_t>& assignment) const {
    std::size_t config = 0;
    std::size_t stride = 1;
    for (auto r : factors_[f]) {
      config += assignment[r] * stride;
      stride *= labels_;
    }
    return config;
  }

  /// Depth-first traversal from `root` listing every node on arrival and
  /// again after returning from each child.
  std::vector<std::size_t> euler_tour(std::size_t root) const {
    std::vector<std::size_t> tour;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, node_count()}};
    std::vector<std::size_t> next_child(node_count(), 0);
    tour.push_back(root);
    while (!stack.empty()) {
      auto [u, parent] = stack.back();
      auto& k = next_child[u];
      while (k < adjacency_[u].size() && adjacency_[u][k] == parent) ++k;
      if (k < adjacency_[u].size()) {
        const auto v = adjacency_[u][k++];
        stack.push_back({v, u});
        tour.push_back(v);
      } else {
        stack.pop_back();
        if (!stack.empty()) tour.push_back(stack.back().first);
      }
    }
    return tour;
  }

  /// Number of nodes in the subtree hanging from `node` away from `parent`.
  std::size_t subtree_size(std::size_t node, std::size_t parent) const {
    std::size_t n = 1;
    for (auto v : adjacency_[node]) {
      if (v != parent) n += subtree_size(v, node);
    }
    return n;
  }

 private:
  std::size_t parts_ = 0;
  std::size_t labels_ = 0;
  std::vector<std::vector<std::size_t>> factors_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Belief propagation in an arbitrary semiring. Factor weights come from a
/// callback so large tables need not be materialized. Assignments held
/// fixed mask a variable's outgoing messages and beliefs to zero away from
/// the fixed label.
template <class S>
class MessagePassing {
 public:
  using Value = typename S::Value;
  using Message = std::vector<Value>;
  using WeightFn = std::function<Value(std::size_t factor, std::size_t config)>;

  MessagePassing(const FactorTree& tree, S semiring, WeightFn weight)
      : tree_(&tree), sr_(std::move(semiring)), weight_(std::move(weight)) {
    offset_.resize(tree.node_count() + 1, 0);
    for (std::size_t u = 0; u < tree.node_count(); ++u) {
      offset_[u + 1] = offset_[u] + tree.neighbors(u).size();
    }
    messages_.resize(offset_.back());
    fixed_.assign(tree.parts(), std::nullopt);
  }

  const FactorTree& tree() const { return *tree_; }
  const S& semiring() const { return sr_; }

  void fix(std::size_t part, std::size_t label) { fixed_[part] = label; }
  void unfix(std::size_t part) { fixed_[part].reset(); }
  const std::vector<std::optional<std::size_t>>& fixed() const { return fixed_; }

  bool has_message(std::size_t from, std::size_t to) const {
    return messages_[edge(from, to)].has_value();
  }

  const Message& message(std::size_t from, std::size_t to) const {
    const auto& m = messages_[edge(from, to)];
    if (!m) fail(ErrorCode::kInternalDegeneracy, "message has not been computed");
    return *m;
  }

  /// Message from -> to computed from the stored incoming messages.
  Message compute_message(std::size_t from, std::size_t to) const {
    return compute_message(from, to, [this](std::size_t a, std::size_t b) -> const Message& {
      return message(a, b);
    });
  }

  void update(std::size_t from, std::size_t to) { messages_[edge(from, to)] = compute_message(from, to); }

  /// Collect pass toward `root` (every message pointing at the root).
  void run_forward(std::size_t root) { collect(root, tree_->node_count()); }

  /// Both passes; afterwards every directed message is current.
  void run(std::size_t root = 0) {
    run_forward(root);
    distribute(root, tree_->node_count());
  }

  /// Message from -> to evaluated recursively without storing anything;
  /// larger subtrees are evaluated first to bound peak memory.
  Message evaluate(std::size_t from, std::size_t to) const {
    std::vector<std::size_t> kids;
    for (auto c : tree_->neighbors(from)) {
      if (c != to) kids.push_back(c);
    }
    std::vector<std::size_t> sizes(kids.size());
    for (std::size_t i = 0; i < kids.size(); ++i) sizes[i] = tree_->subtree_size(kids[i], from);
    std::vector<std::size_t> order(kids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });
    std::vector<Message> incoming(kids.size());
    for (auto i : order) incoming[i] = evaluate(kids[i], from);
    return compute_message(from, to, [&](std::size_t a, std::size_t) -> const Message& {
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (kids[i] == a) return incoming[i];
      }
      fail(ErrorCode::kInternalDegeneracy, "missing incoming message");
    });
  }

  /// Product of the messages into variable `part`, masked by its fixed label.
  Message belief(std::size_t part) const {
    return variable_product(part, tree_->node_count(),
                            [this](std::size_t a, std::size_t b) -> const Message& {
                              return message(a, b);
                            });
  }

  /// Same as belief() but evaluated from scratch without stored messages.
  Message evaluate_belief(std::size_t part) const {
    std::vector<Message> incoming;
    const auto& nb = tree_->neighbors(part);
    for (auto f : nb) incoming.push_back(evaluate(f, part));
    return variable_product(part, tree_->node_count(),
                            [&](std::size_t a, std::size_t) -> const Message& {
                              for (std::size_t i = 0; i < nb.size(); ++i) {
                                if (nb[i] == a) return incoming[i];
                              }
                              fail(ErrorCode::kInternalDegeneracy, "missing incoming message");
                            });
  }

  /// w_f(config) times the messages from the factor's variables.
  Value factor_belief(std::size_t f, std::size_t config) const {
    const std::size_t node = tree_->factor_node(f);
    std::vector<std::size_t> labels;
    tree_->decode(f, config, labels);
    Value v = weight_(f, config);
    const auto& scope = tree_->scope(f);
    for (std::size_t j = 0; j < scope.size(); ++j) v = sr_.mul(v, message(scope[j], node)[labels[j]]);
    return v;
  }

  /// Sum over labels of a belief.
  Value total(const Message& belief) const {
    Value acc = sr_.zero();
    for (const auto& v : belief) sr_.accumulate(acc, v);
    return acc;
  }

 private:
  using Lookup = std::function<const Message&(std::size_t, std::size_t)>;

  std::size_t edge(std::size_t from, std::size_t to) const {
    const auto& nb = tree_->neighbors(from);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] == to) return offset_[from] + k;
    }
    fail(ErrorCode::kInvalidInput, "nodes are not adjacent");
  }

  Message variable_product(std::size_t part, std::size_t except, const Lookup& lookup) const {
    const std::size_t m = tree_->labels();
    Message out(m, sr_.zero());
    for (std::size_t y = 0; y < m; ++y) {
      if (fixed_[part] && *fixed_[part] != y) continue;
      Value v = sr_.one();
      for (auto f : tree_->neighbors(part)) {
        if (f != except) v = sr_.mul(v, lookup(f, part)[y]);
      }
      out[y] = std::move(v);
    }
    return out;
  }

  Message compute_message(std::size_t from, std::size_t to, const Lookup& lookup) const {
    if (!tree_->is_factor(from)) return variable_product(from, to, lookup);
    const std::size_t f = from - tree_->parts();
    const auto& scope = tree_->scope(f);
    std::size_t target = scope.size();
    std::vector<const Message*> in(scope.size(), nullptr);
    for (std::size_t j = 0; j < scope.size(); ++j) {
      if (scope[j] == to) {
        target = j;
      } else {
        in[j] = &lookup(scope[j], from);
      }
    }
    if (target == scope.size()) fail(ErrorCode::kInvalidInput, "nodes are not adjacent");
    Message out(tree_->labels(), sr_.zero());
    std::vector<std::size_t> labels;
    const std::size_t configs = tree_->config_count(f);
    for (std::size_t config = 0; config < configs; ++config) {
      tree_->decode(f, config, labels);
      bool skip = false;
      for (std::size_t j = 0; j < scope.size() && !skip; ++j) {
        if (j != target && sr_.is_zero((*in[j])[labels[j]])) skip = true;
      }
      if (skip) continue;
      Value v = weight_(f, config);
      if (sr_.is_zero(v)) continue;
      for (std::size_t j = 0; j < scope.size(); ++j) {
        if (j != target) v = sr_.mul(v, (*in[j])[labels[j]]);
      }
      sr_.accumulate(out[labels[target]], v);
    }
    return out;
  }

  void collect(std::size_t node, std::size_t parent) {
    for (auto c : tree_->neighbors(node)) {
      if (c != parent) {
        collect(c, node);
        update(c, node);
      }
    }
  }

  void distribute(std::size_t node, std::size_t parent) {
    for (auto c : tree_->neighbors(node)) {
      if (c != parent) {
        update(node, c);
        distribute(c, node);
      }
    }
  }

  const FactorTree* tree_;
  S sr_;
  WeightFn weight_;
  std::vector<std::size_t> offset_;
  std::vector<std::optional<Message>> messages_;
  std::vector<std::optional<std::size_t>> fixed_;
};

}  // namespace dpp
