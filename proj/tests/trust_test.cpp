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

#include <gtest/gtest.h>

#include <random>

#include "dhabe/trust.hpp"
#include "trust_oracle.hpp"

namespace dhabe {
namespace {

using testing::oracle_closure;
using testing::oracle_members;

TEST(TrustParse, CredentialForms) {
  auto set = parse_credentials("Hosp.doctor <- Alice\nVO.doctor <- Hosp.doctor\nVO.team <- VO.partner.doctor\n");
  ASSERT_EQ(set.credentials.size(), 3u);
  EXPECT_EQ(std::get<Member>(set.credentials[0].body).principal, "Alice");
  EXPECT_EQ(std::get<RoleRef>(set.credentials[1].body).role, (Role{"Hosp", "doctor"}));
  const auto& l = std::get<LinkedRole>(set.credentials[2].body);
  EXPECT_EQ(l.base, (Role{"VO", "partner"}));
  EXPECT_EQ(l.name, "doctor");
}

TEST(TrustParse, IntersectionCommentsAndWhitespace) {
  auto set = parse_credentials("  # header\n VO.staff <-  Hosp.doctor & Lab.member  # trailing\n\nA.r<-B;A.s<-C\n");
  ASSERT_EQ(set.credentials.size(), 3u);
  const auto& inter = std::get<Intersection>(set.credentials[0].body);
  ASSERT_EQ(inter.parts.size(), 2u);
  EXPECT_EQ(set.credentials[2].head, (Role{"A", "s"}));
}

TEST(TrustParse, RejectsMalformedWithLine) {
  for (const char* bad : {"hosp.doctor <- Alice", "Hosp.Doctor <- Alice", "Hosp.doctor Alice", "Hosp.doctor <- ",
                          "Hosp.doctor <- A & ", "Hosp <- Alice", "Hosp.doctor <- A.b.c.d", "H.d <- alice"}) {
    EXPECT_THROW(parse_credentials(bad), SyntaxError) << bad;
  }
  try {
    parse_credentials("A.r <- B\n\nA.r <- b\n");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 3u);
  }
}

TEST(TrustParse, PrintRoundTrip) {
  std::mt19937_64 g(7);
  for (int i = 0; i < 200; ++i) {
    CredentialSet s = testing::random_credentials(g);
    EXPECT_EQ(parse_credentials(print_credentials(s)), s);
  }
}

TEST(TrustMembers, EmptySet) {
  EXPECT_TRUE(role_members({}, Role{"VO", "doctor"}).empty());
  EXPECT_EQ(compute_closure({}).iterations, 0u);
}

TEST(TrustMembers, DelegationChain) {
  auto set = parse_credentials("Hosp.doctor <- Alice; VO.doctor <- Hosp.doctor");
  auto expect = oracle_members(oracle_closure(set), Role{"VO", "doctor"});
  EXPECT_EQ(expect, (std::set<std::string>{"Alice"}));
  EXPECT_EQ(role_members(set, Role{"VO", "doctor"}), expect);
}

TEST(TrustMembers, LinkedRole) {
  auto set = parse_credentials("VO.team <- VO.partner.doctor; VO.partner <- Hosp; Hosp.doctor <- Alice");
  auto expect = oracle_members(oracle_closure(set), Role{"VO", "team"});
  EXPECT_EQ(expect, (std::set<std::string>{"Alice"}));
  EXPECT_EQ(role_members(set, Role{"VO", "team"}), expect);
}

TEST(TrustMembers, IntersectionAndCycles) {
  auto set = parse_credentials(
      "A.r <- A.s; A.s <- A.r; A.s <- Bob; Hosp.doctor <- Bob; Hosp.doctor <- Carol\n"
      "VO.both <- A.r & Hosp.doctor");
  EXPECT_EQ(role_members(set, Role{"A", "r"}), (std::set<std::string>{"Bob"}));
  EXPECT_EQ(role_members(set, Role{"VO", "both"}), (std::set<std::string>{"Bob"}));
}

TEST(TrustMembers, DuplicatesCollapse) {
  auto set = parse_credentials("A.r <- Bob; A.r <- Bob; A.r <- Bob");
  EXPECT_EQ(role_members(set, Role{"A", "r"}).size(), 1u);
}

TEST(TrustMembers, MatchesOracleOnRandomSets) {
  std::mt19937_64 g(2024);
  for (int i = 0; i < 500; ++i) {
    CredentialSet s = testing::random_credentials(g);
    auto facts = oracle_closure(s);
    RoleClosure cl = compute_closure(s);
    for (const auto& role : testing::all_roles(s)) {
      ASSERT_EQ(cl.of(role), oracle_members(facts, role)) << print_credentials(s) << role.str();
    }
  }
}

TEST(TrustMembers, Monotone) {
  std::mt19937_64 g(99);
  for (int i = 0; i < 300; ++i) {
    CredentialSet s = testing::random_credentials(g, 7);
    CredentialSet bigger = s;
    bigger.credentials.push_back(testing::random_credential(g));
    RoleClosure a = compute_closure(s), b = compute_closure(bigger);
    for (const auto& role : testing::all_roles(bigger)) {
      const auto& small = a.of(role);
      const auto& large = b.of(role);
      ASSERT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
    }
  }
}

TEST(TrustMembers, IterationBound) {
  std::mt19937_64 g(5);
  for (int i = 0; i < 500; ++i) {
    CredentialSet s = testing::random_credentials(g);
    std::set<Role> heads;
    for (const auto& c : s.credentials) heads.insert(c.head);
    std::size_t bound = testing::principal_universe(s).size() * heads.size();
    ASSERT_LE(compute_closure(s).iterations, bound);
  }
  // A long delegation chain declared backwards needs one round per link.
  std::string text = "R0.r <- Alice\n";
  for (int i = 10; i >= 1; --i) text = "R" + std::to_string(i) + ".r <- R" + std::to_string(i - 1) + ".r\n" + text;
  auto chain = parse_credentials(text);
  EXPECT_EQ(role_members(chain, Role{"R10", "r"}), (std::set<std::string>{"Alice"}));
  EXPECT_LE(compute_closure(chain).iterations, 11u * 11u);
}

TEST(TrustAttributeMap, ParseAndPrint) {
  auto m = parse_attribute_map("# map\nHosp.doctor -> doctor, surgeon @ hospA\nVO.team -> cardiology @ root\n");
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].attributes, (std::vector<std::string>{"doctor", "surgeon"}));
  EXPECT_EQ(m.entries[0].issuer_scope, "hospA");
  EXPECT_EQ(parse_attribute_map(print_attribute_map(m)), m);
  EXPECT_THROW(parse_attribute_map("Hosp.doctor -> doctor"), SyntaxError);
  EXPECT_THROW(parse_attribute_map("Hosp.doctor -> and @ x"), SyntaxError);
  EXPECT_THROW(parse_attribute_map("Hosp.doctor -> a @ x/y"), SyntaxError);
}

TEST(TrustAuthorize, ScopeAndMembership) {
  auto creds = parse_credentials("HospA.doctor <- Alice; HospB.cardio <- Alice; HospA.doctor <- Bob");
  auto amap = parse_attribute_map("HospA.doctor -> doctor @ hospA\nHospB.cardio -> cardiology @ hospB\n");
  EXPECT_EQ(authorized_attributes(creds, amap, "Alice", {"root", "hospA"}), (AttributeSet{"doctor"}));
  EXPECT_EQ(authorized_attributes(creds, amap, "Alice", {"root", "hospB"}), (AttributeSet{"cardiology"}));
  EXPECT_TRUE(authorized_attributes(creds, amap, "Carol", {"root", "hospA"}).empty());
  EXPECT_TRUE(authorized_attributes(creds, amap, "Bob", {"root", "hospB"}).empty());

  EXPECT_NO_THROW(check_issuance(creds, amap, "Alice", {"root", "hospA"}, {"doctor"}));
  try {
    check_issuance(creds, amap, "Alice", {"root", "hospA"}, {"doctor", "cardiology"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTrustDenied);
  }
  EXPECT_THROW(check_issuance(creds, amap, "Carol", {"root", "hospA"}, {"doctor"}), Error);
}

}  // namespace
}  // namespace dhabe
