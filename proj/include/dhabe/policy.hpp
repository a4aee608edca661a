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

// Decryption policies as threshold access trees.
//
// Grammar (keywords case-insensitive, attributes case-sensitive):
//
//   policy  := or_expr
//   or_expr := and_expr ("or" and_expr)*
//   and_expr:= primary ("and" primary)*
//   primary := attr | INT "of" "(" policy ("," policy)* ")" | "(" policy ")"
//
// "and" binds tighter than "or". A chain of the same operator becomes one
// n-ary gate; a parenthesised group stays a separate node.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dhabe/error.hpp"
#include "dhabe/group.hpp"
#include "dhabe/rng.hpp"

namespace dhabe {

using AttributeSet = std::set<std::string>;

namespace policy_detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_attribute_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == ':' ||
         c == '-';
}

inline bool is_keyword(std::string_view s) {
  std::string l = lower(s);
  return l == "and" || l == "or" || l == "of";
}

}  // namespace policy_detail

inline bool is_valid_attribute(std::string_view a) {
  return !a.empty() && std::all_of(a.begin(), a.end(), policy_detail::is_attribute_char) &&
         !policy_detail::is_keyword(a);
}

inline void validate_attribute(std::string_view a) {
  if (!is_valid_attribute(a)) {
    throw Error(ErrorKind::kInvalidArgument, "invalid attribute '" + std::string(a) + "'");
  }
}

// "a, b,c" -> {a, b, c}; every entry is validated.
inline AttributeSet parse_attribute_list(std::string_view text) {
  AttributeSet out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    if (!item.empty()) {
      validate_attribute(item);
      out.emplace(item);
    }
    start = end + 1;
  }
  return out;
}

struct PolicyNode {
  std::size_t threshold = 0;  // 0 for leaves
  std::string attribute;
  int leaf_index = -1;
  std::vector<PolicyNode> children;

  bool is_leaf() const { return threshold == 0; }

  static PolicyNode leaf(std::string attribute) {
    PolicyNode n;
    n.attribute = std::move(attribute);
    return n;
  }
  static PolicyNode gate(std::size_t k, std::vector<PolicyNode> children) {
    PolicyNode n;
    n.threshold = k;
    n.children = std::move(children);
    return n;
  }

  friend bool operator==(const PolicyNode&, const PolicyNode&) = default;
};

// A validated access tree with leaf indices assigned depth-first, left to
// right, starting at 0.
class PolicyTree {
 public:
  explicit PolicyTree(PolicyNode root) : root_(std::move(root)) {
    int next = 0;
    index(root_, next);
    leaf_count_ = static_cast<std::size_t>(next);
  }

  const PolicyNode& root() const { return root_; }
  std::size_t leaf_count() const { return leaf_count_; }

  // Leaves ordered by leaf_index.
  std::vector<const PolicyNode*> leaves() const {
    std::vector<const PolicyNode*> out;
    collect(root_, out);
    return out;
  }

  friend bool operator==(const PolicyTree&, const PolicyTree&) = default;

 private:
  static void index(PolicyNode& n, int& next) {
    if (n.is_leaf()) {
      if (!n.children.empty()) {
        throw Error(ErrorKind::kThreshold, "0 of " + std::to_string(n.children.size()));
      }
      validate_attribute(n.attribute);
      n.leaf_index = next++;
      return;
    }
    if (n.children.empty() || n.threshold > n.children.size()) {
      throw Error(ErrorKind::kThreshold, std::to_string(n.threshold) + " of " +
                                             std::to_string(n.children.size()));
    }
    n.leaf_index = -1;
    n.attribute.clear();
    for (auto& c : n.children) index(c, next);
  }
  static void collect(const PolicyNode& n, std::vector<const PolicyNode*>& out) {
    if (n.is_leaf()) {
      out.push_back(&n);
      return;
    }
    for (const auto& c : n.children) collect(c, out);
  }

  PolicyNode root_;
  std::size_t leaf_count_ = 0;
};

namespace policy_detail {

struct Token {
  enum Kind { kIdent, kLParen, kRParen, kComma, kEnd } kind;
  std::string text;
  std::size_t pos;
};

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(') {
      out.push_back({Token::kLParen, "(", i++});
    } else if (c == ')') {
      out.push_back({Token::kRParen, ")", i++});
    } else if (c == ',') {
      out.push_back({Token::kComma, ",", i++});
    } else if (is_attribute_char(c)) {
      std::size_t start = i;
      while (i < text.size() && is_attribute_char(text[i])) ++i;
      out.push_back({Token::kIdent, std::string(text.substr(start, i - start)), start});
    } else {
      throw SyntaxError(std::string("unexpected character '") + c + "' at position " +
                            std::to_string(i),
                        i);
    }
  }
  out.push_back({Token::kEnd, "", text.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  PolicyNode parse() {
    PolicyNode n = or_expr();
    if (peek().kind != Token::kEnd) fail("unexpected '" + peek().text + "'");
    return n;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool at_keyword(std::string_view kw) const {
    return peek().kind == Token::kIdent && lower(peek().text) == kw;
  }
  void expect(Token::Kind kind, std::string_view what) {
    if (peek().kind != kind) fail("expected " + std::string(what));
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t at = peek().pos;
    throw SyntaxError(msg + " at position " + std::to_string(at), at);
  }

  PolicyNode or_expr() {
    std::vector<PolicyNode> terms;
    terms.push_back(and_expr());
    while (at_keyword("or")) {
      ++pos_;
      terms.push_back(and_expr());
    }
    if (terms.size() == 1) return std::move(terms.front());
    return PolicyNode::gate(1, std::move(terms));
  }

  PolicyNode and_expr() {
    std::vector<PolicyNode> terms;
    terms.push_back(primary());
    while (at_keyword("and")) {
      ++pos_;
      terms.push_back(primary());
    }
    if (terms.size() == 1) return std::move(terms.front());
    std::size_t n = terms.size();
    return PolicyNode::gate(n, std::move(terms));
  }

  PolicyNode primary() {
    const Token& t = peek();
    if (t.kind == Token::kLParen) {
      ++pos_;
      PolicyNode inner = or_expr();
      expect(Token::kRParen, "')'");
      return inner;
    }
    if (t.kind != Token::kIdent) fail(t.kind == Token::kEnd ? "unexpected end of policy" : "unexpected '" + t.text + "'");

    bool numeric = std::all_of(t.text.begin(), t.text.end(),
                               [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if (numeric && peek(1).kind == Token::kIdent && lower(peek(1).text) == "of") {
      std::size_t at = t.pos;
      std::size_t k = t.text.size() > 9 ? SIZE_MAX : std::stoul(t.text);
      pos_ += 2;
      expect(Token::kLParen, "'(' after 'of'");
      std::vector<PolicyNode> children;
      children.push_back(or_expr());
      while (peek().kind == Token::kComma) {
        ++pos_;
        children.push_back(or_expr());
      }
      expect(Token::kRParen, "')'");
      if (k < 1 || k > children.size()) {
        throw Error(ErrorKind::kThreshold, t.text + " of " + std::to_string(children.size()) +
                                               " at position " + std::to_string(at));
      }
      return PolicyNode::gate(k, std::move(children));
    }
    if (is_keyword(t.text)) fail("unexpected keyword '" + t.text + "'");
    ++pos_;
    return PolicyNode::leaf(t.text);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

enum class GateShape { kLeaf, kAnd, kOr, kThreshold };

inline GateShape shape_of(const PolicyNode& n) {
  if (n.is_leaf()) return GateShape::kLeaf;
  std::size_t count = n.children.size();
  if (count >= 2 && n.threshold == count) return GateShape::kAnd;
  if (count >= 2 && n.threshold == 1) return GateShape::kOr;
  return GateShape::kThreshold;
}

inline void print(const PolicyNode& n, std::string& out) {
  auto child = [&out](const PolicyNode& c, bool parens) {
    if (parens) out += '(';
    print(c, out);
    if (parens) out += ')';
  };
  switch (shape_of(n)) {
    case GateShape::kLeaf:
      out += n.attribute;
      break;
    case GateShape::kAnd:
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += " and ";
        GateShape s = shape_of(n.children[i]);
        child(n.children[i], s == GateShape::kAnd || s == GateShape::kOr);
      }
      break;
    case GateShape::kOr:
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += " or ";
        child(n.children[i], shape_of(n.children[i]) == GateShape::kOr);
      }
      break;
    case GateShape::kThreshold:
      out += std::to_string(n.threshold) + " of (";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += ", ";
        child(n.children[i], false);
      }
      out += ')';
      break;
  }
}

}  // namespace policy_detail

inline PolicyTree parse_policy(std::string_view text) {
  return PolicyTree(policy_detail::Parser(text).parse());
}

// Canonical form: lowercase keywords, parentheses only where needed.
inline std::string print_policy(const PolicyTree& tree) {
  std::string out;
  policy_detail::print(tree.root(), out);
  return out;
}

inline bool evaluate(const PolicyNode& n, const AttributeSet& attrs) {
  if (n.is_leaf()) return attrs.contains(n.attribute);
  std::size_t satisfied = 0;
  for (const auto& c : n.children) {
    if (evaluate(c, attrs) && ++satisfied >= n.threshold) return true;
  }
  return false;
}

inline bool evaluate(const PolicyTree& tree, const AttributeSet& attrs) {
  return evaluate(tree.root(), attrs);
}

// Shamir shares of a secret, one per leaf.
struct SharePlan {
  Scalar secret;
  std::vector<Scalar> leaf_shares;  // indexed by leaf_index
};

namespace policy_detail {

inline void share(const PolicyNode& n, const Scalar& value, Rng& rng, std::vector<Scalar>& out) {
  if (n.is_leaf()) {
    out[static_cast<std::size_t>(n.leaf_index)] = value;
    return;
  }
  // q(0) = value, degree k-1.
  std::vector<Scalar> coeffs{value};
  for (std::size_t d = 1; d < n.threshold; ++d) coeffs.push_back(Scalar::random(rng));
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    Scalar x = Scalar::from_u64(i + 1);
    Scalar y;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) y = y * x + *it;
    share(n.children[i], y, rng, out);
  }
}

}  // namespace policy_detail

inline SharePlan assign_shares(const PolicyTree& tree, const Scalar& secret, Rng& rng) {
  SharePlan plan{secret, std::vector<Scalar>(tree.leaf_count())};
  policy_detail::share(tree.root(), secret, rng, plan.leaf_shares);
  return plan;
}

// Lagrange basis polynomial for index i over the set S, evaluated at 0.
inline Scalar lagrange_coeff(int i, std::span<const int> set) {
  if (std::find(set.begin(), set.end(), i) == set.end()) {
    throw Error(ErrorKind::kInvalidArgument, "index " + std::to_string(i) + " not in set");
  }
  std::vector<int> sorted(set.begin(), set.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::kInvalidArgument, "duplicate interpolation index");
  }
  Scalar num = Scalar::from_u64(1);
  Scalar den = Scalar::from_u64(1);
  for (int j : set) {
    if (j == 0) throw Error(ErrorKind::kInvalidArgument, "interpolation index 0");
    if (j == i) continue;
    num *= Scalar::from_int(-j);
    den *= Scalar::from_int(i - j);
  }
  return num * den.inverse();
}

// The selected satisfying subtree. Each gate keeps its chosen 1-based child
// positions, the matching Lagrange coefficients, and the sub-plans of those
// children in the same order.
struct PlanNode {
  int leaf_index = -1;
  std::string attribute;
  std::vector<int> chosen;
  std::vector<Scalar> coefficients;
  std::vector<PlanNode> children;

  bool is_leaf() const { return leaf_index >= 0; }
};

struct LeafWeight {
  int leaf_index;
  std::string attribute;
  Scalar weight;  // product of the coefficients on the root-to-leaf path
};

struct SatisfyingPlan {
  PlanNode root;

  std::vector<LeafWeight> leaf_weights() const {
    std::vector<LeafWeight> out;
    walk(root, Scalar::from_u64(1), out);
    return out;
  }

 private:
  static void walk(const PlanNode& n, const Scalar& acc, std::vector<LeafWeight>& out) {
    if (n.is_leaf()) {
      out.push_back({n.leaf_index, n.attribute, acc});
      return;
    }
    for (std::size_t i = 0; i < n.children.size(); ++i) walk(n.children[i], acc * n.coefficients[i], out);
  }
};

namespace policy_detail {

inline PlanNode plan(const PolicyNode& n, const AttributeSet& attrs) {
  PlanNode out;
  if (n.is_leaf()) {
    out.leaf_index = n.leaf_index;
    out.attribute = n.attribute;
    return out;
  }
  for (std::size_t i = 0; i < n.children.size() && out.chosen.size() < n.threshold; ++i) {
    if (evaluate(n.children[i], attrs)) {
      out.chosen.push_back(static_cast<int>(i + 1));
      out.children.push_back(plan(n.children[i], attrs));
    }
  }
  for (int idx : out.chosen) out.coefficients.push_back(lagrange_coeff(idx, out.chosen));
  return out;
}

inline Scalar reconstruct(const PlanNode& n, const SharePlan& shares) {
  if (n.is_leaf()) return shares.leaf_shares.at(static_cast<std::size_t>(n.leaf_index));
  Scalar acc;
  for (std::size_t i = 0; i < n.children.size(); ++i) acc += n.coefficients[i] * reconstruct(n.children[i], shares);
  return acc;
}

}  // namespace policy_detail

// Picks, at every satisfied gate, the k satisfied children with the smallest
// positions.
inline SatisfyingPlan satisfying_plan(const PolicyTree& tree, const AttributeSet& attrs) {
  if (!evaluate(tree, attrs)) throw Error(ErrorKind::kPolicyNotSatisfied, print_policy(tree));
  return SatisfyingPlan{policy_detail::plan(tree.root(), attrs)};
}

// Bottom-up Lagrange recombination of the scalar shares.
inline Scalar reconstruct_secret(const SatisfyingPlan& plan, const SharePlan& shares) {
  return policy_detail::reconstruct(plan.root, shares);
}

}  // namespace dhabe
