// Copyright 2026 The D-HABE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Test-only generators and independent oracles. Nothing here calls into the
// code paths it is used to check: scalar arithmetic goes through GMP, policy
// satisfaction through explicit minimal-set expansion.

#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dhabe/bytes.hpp"
#include "dhabe/group.hpp"
#include "dhabe/policy.hpp"

namespace dhabe::testing {

// ---- scalar oracle (GMP) ----

inline mpz_class group_order() {
  return mpz_class(std::string(GroupContext::order_hex()), 16);
}

inline mpz_class to_mpz(const Scalar& s) {
  auto e = s.encode();
  return mpz_class(to_hex(e), 16);
}

inline mpz_class mod(const mpz_class& x) {
  mpz_class r = x % group_order();
  if (r < 0) r += group_order();
  return r;
}

inline mpz_class inverse_mod(const mpz_class& x) {
  mpz_class out;
  mpz_class q = group_order();
  mpz_invert(out.get_mpz_t(), mod(x).get_mpz_t(), q.get_mpz_t());
  return out;
}

// Lagrange basis at 0 by direct rational evaluation mod q.
inline mpz_class lagrange_oracle(int i, const std::vector<int>& set) {
  mpz_class num = 1, den = 1;
  for (int j : set) {
    if (j == i) continue;
    num = mod(num * (0 - j));
    den = mod(den * (i - j));
  }
  return mod(num * inverse_mod(den));
}

inline mpz_class eval_poly(const std::vector<mpz_class>& coeffs, long x) {
  mpz_class acc = 0, power = 1;
  for (const auto& c : coeffs) {
    acc = mod(acc + c * power);
    power = mod(power * x);
  }
  return acc;
}

inline mpz_class random_mpz(std::mt19937_64& gen) {
  mpz_class v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 64) + mpz_class(std::to_string(gen()));
  return mod(v);
}

// ---- policy oracle ----

// Every minimal attribute set that satisfies the node, by explicit expansion
// of all k-subsets of children.
inline std::vector<AttributeSet> minimal_sets(const PolicyNode& n) {
  if (n.is_leaf()) return {AttributeSet{n.attribute}};
  std::vector<std::vector<AttributeSet>> per_child;
  for (const auto& c : n.children) per_child.push_back(minimal_sets(c));
  std::vector<AttributeSet> out;
  std::size_t count = n.children.size();
  std::vector<bool> pick(count, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(n.threshold), true);
  do {
    std::vector<AttributeSet> partial{AttributeSet{}};
    for (std::size_t i = 0; i < count; ++i) {
      if (!pick[i]) continue;
      std::vector<AttributeSet> next;
      for (const auto& base : partial) {
        for (const auto& add : per_child[i]) {
          AttributeSet merged = base;
          merged.insert(add.begin(), add.end());
          next.push_back(std::move(merged));
        }
      }
      partial = std::move(next);
    }
    out.insert(out.end(), partial.begin(), partial.end());
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

inline bool oracle_satisfied(const PolicyNode& n, const AttributeSet& attrs) {
  for (const auto& s : minimal_sets(n)) {
    if (std::includes(attrs.begin(), attrs.end(), s.begin(), s.end())) return true;
  }
  return false;
}

// ---- generators ----

inline std::vector<std::string> attribute_pool(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("attr" + std::to_string(i));
  return out;
}

struct TreeShape {
  int max_depth = 4;
  int max_leaves = 12;
  int max_children = 4;
};

namespace detail {

inline PolicyNode random_node(std::mt19937_64& gen, const std::vector<std::string>& pool, int depth,
                              int& leaves_left, const TreeShape& shape) {
  std::uniform_int_distribution<std::size_t> pick_attr(0, pool.size() - 1);
  bool make_leaf = depth >= shape.max_depth || leaves_left <= 1 ||
                   std::uniform_int_distribution<int>(0, 2)(gen) == 0;
  if (depth == 0 && leaves_left > 1) make_leaf = false;
  if (make_leaf) {
    --leaves_left;
    return PolicyNode::leaf(pool[pick_attr(gen)]);
  }
  int max_children = std::min(shape.max_children, leaves_left);
  int children = std::uniform_int_distribution<int>(1, max_children)(gen);
  if (children == 1 && std::uniform_int_distribution<int>(0, 3)(gen) != 0) children = std::min(2, max_children);
  // Reserve one leaf for each sibling still to be generated.
  std::vector<PolicyNode> kids;
  for (int i = 0; i < children; ++i) {
    int reserve = children - i - 1;
    int budget = leaves_left - reserve;
    int before = budget;
    kids.push_back(random_node(gen, pool, depth + 1, budget, shape));
    leaves_left -= before - budget;
  }
  std::size_t k = std::uniform_int_distribution<std::size_t>(1, kids.size())(gen);
  return PolicyNode::gate(k, std::move(kids));
}

}  // namespace detail

inline PolicyTree random_tree(std::mt19937_64& gen, const std::vector<std::string>& pool,
                              const TreeShape& shape = {}) {
  int leaves = shape.max_leaves;
  return PolicyTree(detail::random_node(gen, pool, 0, leaves, shape));
}

namespace detail {

inline void random_selection(std::mt19937_64& gen, const PolicyNode& n, AttributeSet& out) {
  if (n.is_leaf()) {
    out.insert(n.attribute);
    return;
  }
  std::vector<std::size_t> order(n.children.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), gen);
  for (std::size_t i = 0; i < n.threshold; ++i) random_selection(gen, n.children[order[i]], out);
}

}  // namespace detail

// A satisfying set: a random minimal selection plus random extra attributes.
inline AttributeSet random_satisfying_set(std::mt19937_64& gen, const PolicyTree& tree,
                                          const std::vector<std::string>& pool) {
  AttributeSet out;
  detail::random_selection(gen, tree.root(), out);
  for (const auto& a : pool) {
    if (std::uniform_int_distribution<int>(0, 4)(gen) == 0) out.insert(a);
  }
  return out;
}

// A non-satisfying set obtained by removing random attributes from the full
// attribute set until the policy fails.
inline AttributeSet random_unsatisfying_set(std::mt19937_64& gen, const PolicyTree& tree,
                                            const std::vector<std::string>& pool) {
  AttributeSet out(pool.begin(), pool.end());
  std::vector<std::string> order(pool.begin(), pool.end());
  std::shuffle(order.begin(), order.end(), gen);
  for (const auto& a : order) {
    if (!evaluate(tree, out)) break;
    out.erase(a);
  }
  return out;
}

}  // namespace dhabe::testing
