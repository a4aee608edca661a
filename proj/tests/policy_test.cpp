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

#include "dhabe/policy.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "test_support.hpp"

namespace dhabe {
namespace {

using testing::group_order;
using testing::to_mpz;

PolicyNode L(const char* a) { return PolicyNode::leaf(a); }

TEST(ParsePolicyTest, SingleAttribute) {
  PolicyTree t = parse_policy("doctor");
  EXPECT_EQ(t, PolicyTree(L("doctor")));
  EXPECT_EQ(t.leaf_count(), 1u);
  EXPECT_EQ(t.root().leaf_index, 0);
}

TEST(ParsePolicyTest, AndBindsTighterThanOr) {
  PolicyTree t = parse_policy("(doctor and cardiology) or admin");
  PolicyTree expect(PolicyNode::gate(1, {PolicyNode::gate(2, {L("doctor"), L("cardiology")}), L("admin")}));
  EXPECT_EQ(t, expect);
  EXPECT_EQ(parse_policy("doctor and cardiology or admin"), expect);
  EXPECT_EQ(t.leaves()[2]->attribute, "admin");
  EXPECT_EQ(t.leaves()[2]->leaf_index, 2);
}

TEST(ParsePolicyTest, ThresholdGate) {
  EXPECT_EQ(parse_policy("2 of (a, b, c)"), PolicyTree(PolicyNode::gate(2, {L("a"), L("b"), L("c")})));
  try {
    parse_policy("3 of (a, b)");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kThreshold);
  }
  EXPECT_THROW(parse_policy("0 of (a, b)"), Error);
}

TEST(ParsePolicyTest, ChainsFlattenButGroupsDoNot) {
  EXPECT_EQ(parse_policy("a and b and c").root().children.size(), 3u);
  EXPECT_EQ(parse_policy("a or b or c").root().threshold, 1u);
  PolicyTree grouped = parse_policy("(a and b) and c");
  EXPECT_EQ(grouped.root().children.size(), 2u);
  EXPECT_EQ(grouped.root().children[0].threshold, 2u);
}

TEST(ParsePolicyTest, KeywordsCaseInsensitiveAttributesCaseSensitive) {
  PolicyTree t = parse_policy("Doctor AND doctor Or 1 OF (y)");
  EXPECT_EQ(t.root().threshold, 1u);
  EXPECT_EQ(t.root().children[0].children[0].attribute, "Doctor");
  EXPECT_EQ(t.root().children[0].children[1].attribute, "doctor");
  EXPECT_EQ(print_policy(parse_policy("a AND b OR c")), "a and b or c");
}

TEST(ParsePolicyTest, DuplicateAttributesGetDistinctLeaves) {
  PolicyTree t = parse_policy("a or (a and b)");
  ASSERT_EQ(t.leaf_count(), 3u);
  EXPECT_EQ(t.leaves()[0]->attribute, "a");
  EXPECT_EQ(t.leaves()[1]->attribute, "a");
  EXPECT_EQ(t.leaves()[1]->leaf_index, 1);
}

TEST(ParsePolicyTest, SyntaxErrorsCarryPosition) {
  struct Case {
    const char* text;
    std::size_t pos;
  } cases[] = {
      {"", 0}, {"a and", 5}, {"(a or b", 7}, {"a b", 2}, {"a & b", 2}, {"and", 0}, {"2 of a", 5}, {"a)", 1},
  };
  for (const auto& c : cases) {
    try {
      parse_policy(c.text);
      ADD_FAILURE() << c.text;
    } catch (const SyntaxError& e) {
      EXPECT_EQ(e.position(), c.pos) << c.text << ": " << e.what();
      EXPECT_EQ(e.kind(), ErrorKind::kSyntax);
    }
  }
}

TEST(ParsePolicyTest, NumericAttributeWithoutOf) {
  PolicyTree t = parse_policy("42 and b");
  EXPECT_EQ(t.root().children[0].attribute, "42");
}

TEST(PrintPolicyTest, MinimalParentheses) {
  EXPECT_EQ(print_policy(parse_policy("((a))")), "a");
  EXPECT_EQ(print_policy(parse_policy("(a and b) or c")), "a and b or c");
  EXPECT_EQ(print_policy(parse_policy("(a or b) and c")), "(a or b) and c");
  EXPECT_EQ(print_policy(parse_policy("(a and b) and c")), "(a and b) and c");
  EXPECT_EQ(print_policy(parse_policy("a or (b or c)")), "a or (b or c)");
  EXPECT_EQ(print_policy(parse_policy("2 of (a or b, c and d, e)")), "2 of (a or b, c and d, e)");
}

TEST(PrintPolicyTest, RandomTreesRoundTrip) {
  std::mt19937_64 gen(101);
  auto pool = testing::attribute_pool(6);
  for (int i = 0; i < 500; ++i) {
    PolicyTree t = testing::random_tree(gen, pool);
    std::string text = print_policy(t);
    EXPECT_EQ(parse_policy(text), t) << text;
  }
}

TEST(EvaluateTest, Examples) {
  PolicyTree t = parse_policy("a and b");
  EXPECT_TRUE(evaluate(t, {"a", "b"}));
  EXPECT_FALSE(evaluate(t, {"a"}));
  EXPECT_TRUE(evaluate(parse_policy("2 of (a, b, c)"), {"a", "c"}));
  EXPECT_FALSE(evaluate(parse_policy("2 of (a, b, c)"), {"c"}));
}

TEST(EvaluateTest, MatchesExhaustiveOracle) {
  std::mt19937_64 gen(202);
  auto pool = testing::attribute_pool(6);
  for (int i = 0; i < 200; ++i) {
    PolicyTree t = testing::random_tree(gen, pool, {.max_depth = 3, .max_leaves = 8, .max_children = 4});
    for (unsigned mask = 0; mask < 64; ++mask) {
      AttributeSet attrs;
      for (unsigned b = 0; b < 6; ++b) {
        if (mask & (1u << b)) attrs.insert(pool[b]);
      }
      ASSERT_EQ(evaluate(t, attrs), testing::oracle_satisfied(t.root(), attrs))
          << print_policy(t) << " mask=" << mask;
    }
  }
}

TEST(LagrangeTest, FixedValues) {
  int one[] = {1};
  EXPECT_EQ(lagrange_coeff(1, one), Scalar::from_u64(1));
  int two[] = {1, 2};
  EXPECT_EQ(to_mpz(lagrange_coeff(1, two)), 2);
  EXPECT_EQ(to_mpz(lagrange_coeff(2, two)), group_order() - 1);
  int s23[] = {2, 3};
  EXPECT_EQ(to_mpz(lagrange_coeff(2, s23)), testing::lagrange_oracle(2, {2, 3}));
  EXPECT_EQ(to_mpz(lagrange_coeff(2, s23)), 3);
  EXPECT_EQ(to_mpz(lagrange_coeff(3, s23)), group_order() - 2);
}

TEST(LagrangeTest, RejectsIndexOutsideSet) {
  int s[] = {1, 2};
  EXPECT_THROW(lagrange_coeff(3, s), Error);
  int dup[] = {1, 1};
  EXPECT_THROW(lagrange_coeff(1, dup), Error);
}

TEST(LagrangeTest, InterpolatesRandomPolynomials) {
  std::mt19937_64 gen(303);
  for (int trial = 0; trial < 100; ++trial) {
    int k = std::uniform_int_distribution<int>(1, 6)(gen);
    std::vector<mpz_class> coeffs;
    for (int d = 0; d < k; ++d) coeffs.push_back(testing::random_mpz(gen));
    std::vector<int> all(10);
    for (int i = 0; i < 10; ++i) all[i] = i + 1;
    std::shuffle(all.begin(), all.end(), gen);
    std::vector<int> subset(all.begin(), all.begin() + k);
    mpz_class acc = 0;
    for (int i : subset) {
      mpz_class coeff = to_mpz(lagrange_coeff(i, subset));
      ASSERT_EQ(coeff, testing::lagrange_oracle(i, subset));
      acc = testing::mod(acc + coeff * testing::eval_poly(coeffs, i));
    }
    EXPECT_EQ(acc, coeffs[0]);
  }
}

TEST(AssignSharesTest, DegenerateCases) {
  SeededRng rng(1);
  Scalar s = Scalar::random(rng);
  EXPECT_EQ(assign_shares(parse_policy("a"), s, rng).leaf_shares.at(0), s);
  SharePlan either = assign_shares(parse_policy("1 of (a, b)"), s, rng);
  EXPECT_EQ(either.leaf_shares[0], s);
  EXPECT_EQ(either.leaf_shares[1], s);
}

TEST(AssignSharesTest, TwoOfTwoInterpolates) {
  SeededRng rng(2);
  Scalar s = Scalar::random(rng);
  SharePlan plan = assign_shares(parse_policy("a and b"), s, rng);
  // Line through (1, y1), (2, y2) evaluated at 0 is 2*y1 - y2.
  mpz_class y1 = to_mpz(plan.leaf_shares[0]);
  mpz_class y2 = to_mpz(plan.leaf_shares[1]);
  EXPECT_EQ(testing::mod(2 * y1 - y2), to_mpz(s));
  EXPECT_NE(y1, to_mpz(s));
}

TEST(AssignSharesTest, DeterministicUnderSeed) {
  PolicyTree t = parse_policy("2 of (a, b and c, d)");
  SeededRng r1(9), r2(9);
  Scalar s = Scalar::from_u64(12345);
  EXPECT_EQ(assign_shares(t, s, r1).leaf_shares, assign_shares(t, s, r2).leaf_shares);
}

TEST(SatisfyingPlanTest, SmallestIndexSelection) {
  SatisfyingPlan p = satisfying_plan(parse_policy("1 of (a, b)"), {"a", "b"});
  EXPECT_EQ(p.root.chosen, std::vector<int>{1});
  EXPECT_EQ(p.root.children[0].attribute, "a");

  SatisfyingPlan q = satisfying_plan(parse_policy("2 of (a, b, c)"), {"b", "c"});
  EXPECT_EQ(q.root.chosen, (std::vector<int>{2, 3}));
  EXPECT_EQ(to_mpz(q.root.coefficients[0]), 3);
  EXPECT_EQ(to_mpz(q.root.coefficients[1]), group_order() - 2);
  auto weights = q.leaf_weights();
  ASSERT_EQ(weights.size(), 2u);
  EXPECT_EQ(weights[0].leaf_index, 1);
  EXPECT_EQ(weights[1].attribute, "c");
}

TEST(SatisfyingPlanTest, UnsatisfiedIsAnError) {
  try {
    satisfying_plan(parse_policy("a and b"), {"a"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPolicyNotSatisfied);
  }
}

TEST(SatisfyingPlanTest, SelectedGatesHaveExactlyKChildren) {
  std::mt19937_64 gen(404);
  auto pool = testing::attribute_pool(8);
  for (int i = 0; i < 200; ++i) {
    PolicyTree t = testing::random_tree(gen, pool);
    AttributeSet attrs = testing::random_satisfying_set(gen, t, pool);
    SatisfyingPlan plan = satisfying_plan(t, attrs);
    std::function<void(const PlanNode&, const PolicyNode&)> check = [&](const PlanNode& p, const PolicyNode& n) {
      if (n.is_leaf()) {
        EXPECT_TRUE(attrs.contains(p.attribute));
        EXPECT_EQ(p.leaf_index, n.leaf_index);
        return;
      }
      ASSERT_EQ(p.chosen.size(), n.threshold);
      for (std::size_t j = 0; j < p.chosen.size(); ++j) {
        check(p.children[j], n.children[static_cast<std::size_t>(p.chosen[j] - 1)]);
      }
    };
    check(plan.root, t.root());
  }
}

// Pure scalar recombination: no pairings involved.
TEST(SatisfyingPlanTest, RecombinationReconstructsSecret) {
  std::mt19937_64 gen(505);
  SeededRng rng(505);
  auto pool = testing::attribute_pool(8);
  for (int i = 0; i < 200; ++i) {
    PolicyTree t = testing::random_tree(gen, pool);
    AttributeSet attrs = testing::random_satisfying_set(gen, t, pool);
    Scalar s = Scalar::random(rng);
    SharePlan shares = assign_shares(t, s, rng);
    SatisfyingPlan plan = satisfying_plan(t, attrs);
    EXPECT_EQ(reconstruct_secret(plan, shares), s);
    mpz_class acc = 0;
    for (const auto& w : plan.leaf_weights()) {
      acc = testing::mod(acc + to_mpz(w.weight) * to_mpz(shares.leaf_shares[static_cast<std::size_t>(w.leaf_index)]));
    }
    EXPECT_EQ(acc, to_mpz(s));
  }
}

TEST(AttributeTest, Validation) {
  EXPECT_TRUE(is_valid_attribute("dept:cardio-2.x_y"));
  EXPECT_FALSE(is_valid_attribute("and"));
  EXPECT_FALSE(is_valid_attribute("OF"));
  EXPECT_FALSE(is_valid_attribute("a b"));
  EXPECT_FALSE(is_valid_attribute(""));
  EXPECT_EQ(parse_attribute_list(" doctor, cardiology ,doctor"), (AttributeSet{"cardiology", "doctor"}));
  EXPECT_THROW(parse_attribute_list("a, or"), Error);
}

}  // namespace
}  // namespace dhabe
