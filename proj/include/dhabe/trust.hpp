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

// RT0 role-based trust management, used to decide which attribute keys a
// domain authority may issue to a principal.
//
// Credentials, one per line (or separated by ';'), '#' starts a comment:
//
//   P.r <- Q            membership
//   P.r <- Q.s          every member of Q.s is a member of P.r
//   P.r <- Q.s.t        linked role: members of B.t for every B in Q.s
//   P.r <- X & Y ...    intersection of the simple bodies X, Y, ...
//
// Attribute map entries:  P.r -> attr1, attr2 @ scopeLabel

#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dhabe/error.hpp"
#include "dhabe/policy.hpp"

namespace dhabe {

struct Role {
  std::string principal;
  std::string name;

  std::string str() const { return principal + "." + name; }
  friend auto operator<=>(const Role&, const Role&) = default;
};

struct Member {
  std::string principal;
  friend bool operator==(const Member&, const Member&) = default;
};
struct RoleRef {
  Role role;
  friend bool operator==(const RoleRef&, const RoleRef&) = default;
};
struct LinkedRole {
  Role base;
  std::string name;
  friend bool operator==(const LinkedRole&, const LinkedRole&) = default;
};
using SimpleBody = std::variant<Member, RoleRef, LinkedRole>;
struct Intersection {
  std::vector<SimpleBody> parts;
  friend bool operator==(const Intersection&, const Intersection&) = default;
};
using CredentialBody = std::variant<Member, RoleRef, LinkedRole, Intersection>;

struct Credential {
  Role head;
  CredentialBody body;
  friend bool operator==(const Credential&, const Credential&) = default;
};

struct CredentialSet {
  std::vector<Credential> credentials;
  friend bool operator==(const CredentialSet&, const CredentialSet&) = default;
};

struct AttributeGrant {
  Role role;
  std::vector<std::string> attributes;
  std::string issuer_scope;
  friend bool operator==(const AttributeGrant&, const AttributeGrant&) = default;
};

struct AttributeMap {
  std::vector<AttributeGrant> entries;
  friend bool operator==(const AttributeMap&, const AttributeMap&) = default;
};

inline bool is_valid_principal(std::string_view s) {
  if (s.empty() || !std::isupper(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

inline bool is_valid_role_name(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) ||
           c == '_' || c == '-';
  });
}

namespace trust_detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
}

// Statements with their 1-based line numbers; comments and blanks dropped.
inline std::vector<std::pair<std::string_view, std::size_t>> statements(std::string_view text) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = line.substr(0, line.find('#'));
    for (std::string_view stmt : split(line, ';')) {
      stmt = trim(stmt);
      if (!stmt.empty()) out.emplace_back(stmt, line_no);
    }
  }
  return out;
}

[[noreturn]] inline void fail(const std::string& msg, std::size_t line) {
  throw SyntaxError(msg + " on line " + std::to_string(line), line);
}

inline Role parse_role(std::string_view text, std::size_t line) {
  auto parts = split(text, '.');
  if (parts.size() != 2) fail("expected Principal.role, got '" + std::string(text) + "'", line);
  std::string_view p = trim(parts[0]), r = trim(parts[1]);
  if (!is_valid_principal(p)) fail("invalid principal '" + std::string(p) + "'", line);
  if (!is_valid_role_name(r)) fail("invalid role name '" + std::string(r) + "'", line);
  return Role{std::string(p), std::string(r)};
}

inline SimpleBody parse_simple(std::string_view text, std::size_t line) {
  auto parts = split(text, '.');
  for (auto& p : parts) p = trim(p);
  if (!is_valid_principal(parts[0])) fail("invalid principal '" + std::string(parts[0]) + "'", line);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (!is_valid_role_name(parts[i])) fail("invalid role name '" + std::string(parts[i]) + "'", line);
  }
  switch (parts.size()) {
    case 1: return Member{std::string(parts[0])};
    case 2: return RoleRef{Role{std::string(parts[0]), std::string(parts[1])}};
    case 3: return LinkedRole{Role{std::string(parts[0]), std::string(parts[1])}, std::string(parts[2])};
    default: fail("too many '.' in '" + std::string(text) + "'", line);
  }
}

inline std::string print_simple(const SimpleBody& b) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Member>) return v.principal;
        else if constexpr (std::is_same_v<T, RoleRef>) return v.role.str();
        else return v.base.str() + "." + v.name;
      },
      b);
}

}  // namespace trust_detail

inline CredentialSet parse_credentials(std::string_view text) {
  using namespace trust_detail;
  CredentialSet out;
  for (auto [stmt, line] : statements(text)) {
    std::size_t arrow = stmt.find("<-");
    if (arrow == std::string_view::npos) fail("missing '<-'", line);
    Credential c{parse_role(trim(stmt.substr(0, arrow)), line), Member{}};
    auto terms = split(stmt.substr(arrow + 2), '&');
    for (auto& t : terms) {
      t = trim(t);
      if (t.empty()) fail("empty credential body", line);
    }
    if (terms.size() == 1) {
      c.body = std::visit([](auto&& v) -> CredentialBody { return v; }, parse_simple(terms[0], line));
    } else {
      Intersection inter;
      for (auto t : terms) inter.parts.push_back(parse_simple(t, line));
      c.body = std::move(inter);
    }
    out.credentials.push_back(std::move(c));
  }
  return out;
}

inline std::string print_credentials(const CredentialSet& set) {
  std::string out;
  for (const auto& c : set.credentials) {
    out += c.head.str() + " <- ";
    if (const auto* inter = std::get_if<Intersection>(&c.body)) {
      for (std::size_t i = 0; i < inter->parts.size(); ++i) {
        if (i) out += " & ";
        out += trust_detail::print_simple(inter->parts[i]);
      }
    } else {
      out += std::visit(
          [](const auto& v) -> std::string {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Intersection>) return "";
            else return trust_detail::print_simple(v);
          },
          c.body);
    }
    out += '\n';
  }
  return out;
}

inline AttributeMap parse_attribute_map(std::string_view text) {
  using namespace trust_detail;
  AttributeMap out;
  for (auto [stmt, line] : statements(text)) {
    std::size_t arrow = stmt.find("->");
    std::size_t at = stmt.rfind('@');
    if (arrow == std::string_view::npos || at == std::string_view::npos || at < arrow) {
      fail("expected 'P.r -> attrs @ scope'", line);
    }
    AttributeGrant g;
    g.role = parse_role(trim(stmt.substr(0, arrow)), line);
    g.issuer_scope = std::string(trim(stmt.substr(at + 1)));
    if (g.issuer_scope.empty() || g.issuer_scope.find('/') != std::string::npos) {
      fail("invalid issuer scope", line);
    }
    for (auto a : split(stmt.substr(arrow + 2, at - arrow - 2), ',')) {
      a = trim(a);
      if (!is_valid_attribute(a)) fail("invalid attribute '" + std::string(a) + "'", line);
      g.attributes.emplace_back(a);
    }
    out.entries.push_back(std::move(g));
  }
  return out;
}

inline std::string print_attribute_map(const AttributeMap& map) {
  std::string out;
  for (const auto& g : map.entries) {
    out += g.role.str() + " -> ";
    for (std::size_t i = 0; i < g.attributes.size(); ++i) {
      if (i) out += ", ";
      out += g.attributes[i];
    }
    out += " @ " + g.issuer_scope + "\n";
  }
  return out;
}

// Least fixpoint of the credential set over every role.
struct RoleClosure {
  std::map<Role, std::set<std::string>> members;
  std::size_t iterations = 0;  // rounds that added at least one membership

  const std::set<std::string>& of(const Role& r) const {
    static const std::set<std::string> kEmpty;
    auto it = members.find(r);
    return it == members.end() ? kEmpty : it->second;
  }
};

namespace trust_detail {

inline std::set<std::string> eval_simple(const SimpleBody& body, const RoleClosure& cl) {
  return std::visit(
      [&cl](const auto& v) -> std::set<std::string> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Member>) {
          return {v.principal};
        } else if constexpr (std::is_same_v<T, RoleRef>) {
          return cl.of(v.role);
        } else {
          std::set<std::string> out;
          for (const auto& b : cl.of(v.base)) {
            const auto& m = cl.of(Role{b, v.name});
            out.insert(m.begin(), m.end());
          }
          return out;
        }
      },
      body);
}

inline std::set<std::string> eval_body(const CredentialBody& body, const RoleClosure& cl) {
  if (const auto* inter = std::get_if<Intersection>(&body)) {
    std::set<std::string> acc = eval_simple(inter->parts.front(), cl);
    for (std::size_t i = 1; i < inter->parts.size(); ++i) {
      std::set<std::string> next = eval_simple(inter->parts[i], cl);
      std::set<std::string> kept;
      std::set_intersection(acc.begin(), acc.end(), next.begin(), next.end(), std::inserter(kept, kept.end()));
      acc = std::move(kept);
    }
    return acc;
  }
  return std::visit(
      [&cl](const auto& v) -> std::set<std::string> {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Intersection>) return {};
        else return eval_simple(v, cl);
      },
      body);
}

}  // namespace trust_detail

inline RoleClosure compute_closure(const CredentialSet& creds) {
  RoleClosure cl;
  for (;;) {
    bool grew = false;
    for (const auto& c : creds.credentials) {
      std::set<std::string> found = trust_detail::eval_body(c.body, cl);
      auto& target = cl.members[c.head];
      for (auto& p : found) grew |= target.insert(p).second;
    }
    if (!grew) return cl;
    ++cl.iterations;
  }
}

inline std::set<std::string> role_members(const CredentialSet& creds, const Role& role) {
  return compute_closure(creds).of(role);
}

// Union of the attributes of every map entry whose role contains the
// principal and whose issuer scope labels a node on the issuer's path.
inline AttributeSet authorized_attributes(const CredentialSet& creds, const AttributeMap& map,
                                          std::string_view principal, const std::vector<std::string>& issuer_path) {
  RoleClosure cl = compute_closure(creds);
  AttributeSet out;
  for (const auto& g : map.entries) {
    if (!cl.of(g.role).contains(std::string(principal))) continue;
    if (std::find(issuer_path.begin(), issuer_path.end(), g.issuer_scope) == issuer_path.end()) continue;
    out.insert(g.attributes.begin(), g.attributes.end());
  }
  return out;
}

// Throws kTrustDenied unless every requested attribute is authorized.
inline void check_issuance(const CredentialSet& creds, const AttributeMap& map, std::string_view principal,
                           const std::vector<std::string>& issuer_path, const AttributeSet& requested) {
  AttributeSet allowed = authorized_attributes(creds, map, principal, issuer_path);
  if (allowed.empty()) {
    throw Error(ErrorKind::kTrustDenied, std::string(principal) + " holds no issuable attributes here");
  }
  for (const auto& a : requested) {
    if (!allowed.contains(a)) {
      throw Error(ErrorKind::kTrustDenied, std::string(principal) + " is not authorized for '" + a + "'");
    }
  }
}

}  // namespace dhabe
