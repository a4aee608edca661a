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

// Reference RT0 semantics for tests: a per-fact derivation check over the
// finite principal universe, iterated to closure.

#pragma once

#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dhabe/trust.hpp"

namespace dhabe::testing {

using Fact = std::pair<Role, std::string>;

inline std::set<std::string> principal_universe(const CredentialSet& creds) {
  std::set<std::string> u;
  auto simple = [&u](const SimpleBody& b) {
    if (auto* m = std::get_if<Member>(&b)) u.insert(m->principal);
    if (auto* r = std::get_if<RoleRef>(&b)) u.insert(r->role.principal);
    if (auto* l = std::get_if<LinkedRole>(&b)) u.insert(l->base.principal);
  };
  for (const auto& c : creds.credentials) {
    u.insert(c.head.principal);
    if (auto* i = std::get_if<Intersection>(&c.body)) {
      for (const auto& p : i->parts) simple(p);
    } else if (auto* m = std::get_if<Member>(&c.body)) {
      simple(*m);
    } else if (auto* r = std::get_if<RoleRef>(&c.body)) {
      simple(*r);
    } else {
      simple(std::get<LinkedRole>(c.body));
    }
  }
  return u;
}

inline bool oracle_holds(const SimpleBody& b, const std::string& x, const std::set<Fact>& facts,
                         const std::set<std::string>& universe) {
  if (auto* m = std::get_if<Member>(&b)) return m->principal == x;
  if (auto* r = std::get_if<RoleRef>(&b)) return facts.contains({r->role, x});
  const auto& l = std::get<LinkedRole>(b);
  for (const auto& mid : universe) {
    if (facts.contains({l.base, mid}) && facts.contains({Role{mid, l.name}, x})) return true;
  }
  return false;
}

inline std::set<Fact> oracle_closure(const CredentialSet& creds) {
  std::set<std::string> universe = principal_universe(creds);
  std::set<Fact> facts;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : creds.credentials) {
      for (const auto& x : universe) {
        if (facts.contains({c.head, x})) continue;
        bool ok;
        if (auto* i = std::get_if<Intersection>(&c.body)) {
          ok = true;
          for (const auto& p : i->parts) ok = ok && oracle_holds(p, x, facts, universe);
        } else {
          SimpleBody sb = std::holds_alternative<Member>(c.body)    ? SimpleBody(std::get<Member>(c.body))
                          : std::holds_alternative<RoleRef>(c.body) ? SimpleBody(std::get<RoleRef>(c.body))
                                                                    : SimpleBody(std::get<LinkedRole>(c.body));
          ok = oracle_holds(sb, x, facts, universe);
        }
        if (ok) {
          facts.insert({c.head, x});
          changed = true;
        }
      }
    }
  }
  return facts;
}

inline std::set<std::string> oracle_members(const std::set<Fact>& facts, const Role& r) {
  std::set<std::string> out;
  for (const auto& [role, p] : facts) {
    if (role == r) out.insert(p);
  }
  return out;
}

inline const std::vector<std::string>& small_principals() {
  static const std::vector<std::string> k{"Alice", "Bob", "Hosp", "Lab", "VO"};
  return k;
}
inline const std::vector<std::string>& small_role_names() {
  static const std::vector<std::string> k{"doctor", "member", "partner"};
  return k;
}

inline SimpleBody random_simple(std::mt19937_64& g) {
  const auto& ps = small_principals();
  const auto& rs = small_role_names();
  auto p = [&] { return ps[g() % ps.size()]; };
  auto r = [&] { return rs[g() % rs.size()]; };
  switch (g() % 3) {
    case 0: return Member{p()};
    case 1: return RoleRef{Role{p(), r()}};
    default: return LinkedRole{Role{p(), r()}, r()};
  }
}

inline Credential random_credential(std::mt19937_64& g) {
  const auto& ps = small_principals();
  const auto& rs = small_role_names();
  Credential c{Role{ps[g() % ps.size()], rs[g() % rs.size()]}, Member{}};
  if (g() % 5 == 0) {
    Intersection inter;
    std::size_t n = 2 + g() % 2;
    for (std::size_t i = 0; i < n; ++i) inter.parts.push_back(random_simple(g));
    c.body = std::move(inter);
  } else {
    SimpleBody b = random_simple(g);
    if (auto* m = std::get_if<Member>(&b)) c.body = *m;
    else if (auto* r = std::get_if<RoleRef>(&b)) c.body = *r;
    else c.body = std::get<LinkedRole>(b);
  }
  return c;
}

// Members are biased so that sets are not mostly empty.
inline CredentialSet random_credentials(std::mt19937_64& g, std::size_t max_creds = 8) {
  CredentialSet s;
  std::size_t n = g() % (max_creds + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Credential c = random_credential(g);
    if (i % 3 == 0) c.body = Member{small_principals()[g() % small_principals().size()]};
    s.credentials.push_back(std::move(c));
  }
  return s;
}

inline std::set<Role> all_roles(const CredentialSet& creds) {
  std::set<Role> out;
  for (const auto& p : small_principals()) {
    for (const auto& r : small_role_names()) out.insert(Role{p, r});
  }
  for (const auto& c : creds.credentials) out.insert(c.head);
  return out;
}

}  // namespace dhabe::testing
