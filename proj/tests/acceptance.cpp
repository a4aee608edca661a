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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>

#include "dhabe/harness.hpp"
#include "dhabe/scheme.hpp"
#include "dhabe/serialize.hpp"
#include "dhabe/trust.hpp"
#include "object_gen.hpp"
#include "test_support.hpp"
#include "trust_oracle.hpp"

namespace {

using namespace dhabe;
using namespace dhabe::testing;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string ratio(int ok, int total) { return std::to_string(ok) + "/" + std::to_string(total); }

template <class F>
ErrorKind error_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kInvalidArgument;  // sentinel: nothing was raised
}

Bytes random_message(std::mt19937_64& g) {
  Bytes m(1 + g() % 200);
  for (auto& b : m) b = static_cast<std::uint8_t>(g());
  return m;
}

DAKey chain(const PublicParams& pp, DAKey da, int depth, const std::string& prefix, Rng& rng) {
  for (int i = 0; i < depth; ++i) da = delegate(pp, da, prefix + std::to_string(i), rng);
  return da;
}

// 1. Round trips at delegation depths 1..10.
Outcome round_trip() {
  auto t0 = Clock::now();
  SeededRng rng(101);
  std::mt19937_64 g(101);
  SetupResult vo = setup(rng);
  auto pool = attribute_pool(10);
  int ok = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    int depth = 1 + i % 10;
    DAKey da = chain(vo.pp, vo.root, depth, "d", rng);
    PolicyTree tree = random_tree(g, pool, TreeShape{});
    AttributeSet attrs = random_satisfying_set(g, tree, pool);
    UserKey key = issue_user_key(vo.pp, da, "user" + std::to_string(i), attrs);
    Bytes m = random_message(g);
    Ciphertext ct = encrypt(vo.pp, tree, m, rng);
    if (decrypt(vo.pp, key, ct) == m) ++ok;
  }
  double secs = seconds_since(t0);
  char buf[64];
  std::snprintf(buf, sizeof buf, " in %.2f s (limit 120 s)", secs);
  return {ok == n && secs < 120.0, ratio(ok, n) + buf};
}

// 2. Non-satisfying keys are refused; padding them with made-up components
// only moves the failure to the authenticated cipher.
Outcome policy_soundness() {
  SeededRng rng(202);
  std::mt19937_64 g(202);
  SetupResult vo = setup(rng);
  auto pool = attribute_pool(10);
  int denied = 0, forced_rejected = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    PolicyTree tree = random_tree(g, pool, TreeShape{});
    AttributeSet attrs = random_unsatisfying_set(g, tree, pool);
    attrs.insert("outsider");
    DAKey da = chain(vo.pp, vo.root, 1 + static_cast<int>(g() % 3), "d", rng);
    UserKey key = issue_user_key(vo.pp, da, "user" + std::to_string(i), attrs);
    Ciphertext ct = encrypt(vo.pp, tree, random_message(g), rng);
    if (error_of([&] { decrypt(vo.pp, key, ct); }) == ErrorKind::kPolicyNotSatisfied) ++denied;

    UserKey forced = key;
    for (const auto& leaf : tree.leaves()) {
      if (!forced.components.contains(leaf->attribute)) {
        forced.components.emplace(leaf->attribute, attribute_point(leaf->attribute, key.epoch) * Scalar::random(rng));
      }
    }
    if (error_of([&] { decrypt(vo.pp, forced, ct); }) == ErrorKind::kAuthenticationFailed) ++forced_rejected;
  }
  return {denied == n && forced_rejected == n,
          "denied " + ratio(denied, n) + ", forced attempts rejected " + ratio(forced_rejected, n)};
}

PolicyTree conjunction(const PolicyTree& a, const PolicyTree& b) {
  return PolicyTree(PolicyNode::gate(2, {a.root(), b.root()}));
}

// 3. Shards from two DAs merge into a key that satisfies a conjunction
// neither shard satisfies alone.
Outcome cross_domain() {
  SeededRng rng(303);
  std::mt19937_64 g(303);
  SetupResult vo = setup(rng);
  std::vector<std::string> left, right;
  for (int i = 0; i < 5; ++i) {
    left.push_back("left" + std::to_string(i));
    right.push_back("right" + std::to_string(i));
  }
  int ok = 0;
  const int n = 50;
  for (int i = 0; i < n; ++i) {
    DAKey da1 = chain(vo.pp, vo.root, 1 + static_cast<int>(g() % 3), "a", rng);
    DAKey da2 = chain(vo.pp, vo.root, 1 + static_cast<int>(g() % 3), "b", rng);
    PolicyTree ta = random_tree(g, left, TreeShape{3, 6, 3});
    PolicyTree tb = random_tree(g, right, TreeShape{3, 6, 3});
    PolicyTree tree = conjunction(ta, tb);
    std::string user = "user" + std::to_string(i);
    UserKeyShard s1 = issue_user_key(vo.pp, da1, user, random_satisfying_set(g, ta, left));
    UserKeyShard s2 = issue_user_key(vo.pp, da2, user, random_satisfying_set(g, tb, right));
    Bytes m = random_message(g);
    Ciphertext ct = encrypt(vo.pp, tree, m, rng);
    bool alone_denied = error_of([&] { decrypt(vo.pp, s1, ct); }) == ErrorKind::kPolicyNotSatisfied &&
                        error_of([&] { decrypt(vo.pp, s2, ct); }) == ErrorKind::kPolicyNotSatisfied;
    UserKeyShard both[] = {s1, s2};
    UserKey merged = merge_shards(both);
    if (alone_denied && merged.issuer_paths.size() == 2 && decrypt(vo.pp, merged, ct) == m) ++ok;
  }
  return {ok == n, ratio(ok, n)};
}

// 4. Two users pooling components never decrypt.
Outcome collusion() {
  SeededRng rng(404);
  std::mt19937_64 g(404);
  SetupResult vo = setup(rng);
  std::vector<std::string> left, right;
  for (int i = 0; i < 5; ++i) {
    left.push_back("left" + std::to_string(i));
    right.push_back("right" + std::to_string(i));
  }
  int ok = 0;
  const int n = 50;
  for (int i = 0; i < n; ++i) {
    DAKey da1 = chain(vo.pp, vo.root, 1 + static_cast<int>(g() % 3), "a", rng);
    DAKey da2 = g() % 2 ? da1 : chain(vo.pp, vo.root, 1 + static_cast<int>(g() % 3), "b", rng);
    PolicyTree ta = random_tree(g, left, TreeShape{3, 6, 3});
    PolicyTree tb = random_tree(g, right, TreeShape{3, 6, 3});
    PolicyTree tree = conjunction(ta, tb);
    UserKey u1 = issue_user_key(vo.pp, da1, "alice" + std::to_string(i), random_satisfying_set(g, ta, left));
    UserKey u2 = issue_user_key(vo.pp, da2, "bob" + std::to_string(i), random_satisfying_set(g, tb, right));
    Ciphertext ct = encrypt(vo.pp, tree, random_message(g), rng);

    UserKey forged_a = u1, forged_b = u2;
    for (const auto& [attr, point] : u2.components) forged_a.components.insert_or_assign(attr, point);
    for (const auto& [attr, point] : u1.components) forged_b.components.insert_or_assign(attr, point);
    UserKeyShard pair[] = {u1, u2};
    bool refused = error_of([&] { merge_shards(pair); }) == ErrorKind::kMergeRefused;
    bool fa = error_of([&] { decrypt(vo.pp, forged_a, ct); }) == ErrorKind::kAuthenticationFailed;
    bool fb = error_of([&] { decrypt(vo.pp, forged_b, ct); }) == ErrorKind::kAuthenticationFailed;
    if (refused && fa && fb) ++ok;
  }
  return {ok == n, ratio(ok, n)};
}

// 5. A rerandomized sibling issues the same keys as its source, and every DA
// key of a VO yields the same g2^alpha.
Outcome flaw_reproduction() {
  std::mt19937_64 g(505);
  int ok = 0;
  const int n = 20;
  for (int i = 0; i < n; ++i) {
    SeededRng rng(505 + static_cast<std::uint64_t>(i));
    SetupResult vo = setup(rng);
    std::vector<DAKey> das{vo.root};
    for (int j = 0; j < 6; ++j) {
      const DAKey& parent = das[g() % das.size()];
      das.push_back(delegate(vo.pp, parent, "n" + std::to_string(j), rng));
    }
    const DAKey& src = das[1 + g() % (das.size() - 1)];
    IssuerPath fake = src.path;
    fake.back() = "rogue";
    DAKey sibling = rerandomize(vo.pp, src, fake, rng);
    das.push_back(sibling);

    AttributeSet attrs = {"doctor", "cardiology", "attr" + std::to_string(g() % 10)};
    std::string user = "user" + std::to_string(g() % 1000);
    UserKey a = issue_user_key(vo.pp, src, user, attrs);
    UserKey b = issue_user_key(vo.pp, sibling, user, attrs);
    bool identical = a.k.encode() == b.k.encode() && a.l.encode() == b.l.encode() &&
                     a.components.size() == b.components.size();
    for (const auto& [attr, point] : a.components) identical = identical && point.encode() == b.components.at(attr).encode();

    G2 expected = vo.pp.ctx.g2() * vo.mk.alpha;
    bool witness = std::all_of(das.begin(), das.end(), [&](const DAKey& d) {
      return recover_master_witness(vo.pp, d).w.encode() == expected.encode();
    });
    if (identical && witness && !(sibling.z == src.z)) ++ok;
  }
  return {ok == n, ratio(ok, n) + " trials with identical issued keys and equal witnesses"};
}

// 6. Depth-10 chain with no depth parameter anywhere in the library.
Outcome unbounded_depth() {
  SeededRng rng(606);
  SetupResult vo = setup(rng);
  DAKey da = chain(vo.pp, vo.root, 10, "level", rng);
  PolicyTree tree = parse_policy("doctor and (cardiology or 2 of (a, b, c))");
  UserKey key = issue_user_key(vo.pp, da, "deep", {"doctor", "b", "c"});
  Bytes m = {'d', 'e', 'e', 'p'};
  bool works = da.depth() == 11 && decrypt(vo.pp, key, encrypt(vo.pp, tree, m, rng)) == m;

  std::regex limit(R"(max_?depth|depth_?(limit|bound|max)|max_?(level|height)s?|kMaxDepth)", std::regex::icase);
  std::vector<std::string> hits;
  for (const char* sub : {"include", "tools"}) {
    for (const auto& entry : fs::recursive_directory_iterator(fs::path(DHABE_SOURCE_DIR) / sub)) {
      if (!entry.is_regular_file()) continue;
      std::ifstream in(entry.path());
      std::string line;
      for (int no = 1; std::getline(in, line); ++no) {
        if (std::regex_search(line, limit)) hits.push_back(entry.path().filename().string() + ":" + std::to_string(no));
      }
    }
  }
  std::string detail = std::string("depth-10 chain ") + (works ? "decrypts" : "FAILS") + ", depth-limit identifiers: " +
                       (hits.empty() ? "none" : hits.front());
  return {works && hits.empty(), detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 7. Excluded DAs fall out of the current epoch; earlier artifacts still work;
// the healthcare log is reproducible byte for byte.
Outcome epoch_dynamics() {
  int ok = 0;
  const int n = 10;
  for (int i = 0; i < n; ++i) {
    SeededRng rng(700 + static_cast<std::uint64_t>(i));
    SetupResult vo = setup(rng);
    DAKey x = delegate(vo.pp, vo.root, "hospX", rng);
    DAKey y = delegate(vo.pp, vo.root, "hospY", rng);
    PolicyTree tree = parse_policy("doctor or nurse");
    UserKey old_key = issue_user_key(vo.pp, x, "alice", {"doctor"});
    Bytes m0 = {'o', 'l', 'd'}, m1 = {'n', 'e', 'w'};
    Ciphertext ct0 = encrypt(vo.pp, tree, m0, rng);

    RekeyResult next = epoch_rekey(vo.mk, vo.pp, rng);
    DAKey y1 = delegate(next.pp, next.root, y.path.back(), rng);  // y stays, x is excluded
    Ciphertext ct1 = encrypt(next.pp, tree, m1, rng);

    bool refused_now = error_of([&] { issue_user_key(next.pp, x, "bob", {"doctor"}); }) == ErrorKind::kEpochMismatch;
    PublicParams stale_view = next.pp;
    stale_view.current_epoch = x.epoch;
    UserKey stale = issue_user_key(stale_view, x, "bob", {"doctor"});
    bool stale_fails = error_of([&] { decrypt(next.pp, stale, ct1); }) == ErrorKind::kEpochMismatch;
    bool old_ok = decrypt(vo.pp, old_key, ct0) == m0;
    bool fresh_ok = decrypt(next.pp, issue_user_key(next.pp, y1, "carol", {"nurse"}), ct1) == m1;
    if (refused_now && stale_fails && old_ok && fresh_ok) ++ok;
  }

  EventLog first = run_scenario(healthcare_scenario());
  EventLog second = run_scenario(healthcare_scenario());
  std::string golden = slurp(fs::path(DHABE_GOLDEN_DIR) / "healthcare.log");
  bool log_ok = first.all_passed() && first.text() == second.text() && first.text() == golden;
  return {ok == n && log_ok, ratio(ok, n) + " epoch trials, healthcare log " +
                                 (log_ok ? "passes and matches golden" : "DIFFERS or has failed expectations")};
}

// 8. Fixpoint agrees with the derivation oracle; adding credentials never
// shrinks a role.
Outcome trust_oracle() {
  std::mt19937_64 g(808);
  int agree = 0, monotone = 0;
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    CredentialSet s = random_credentials(g);
    auto facts = oracle_closure(s);
    RoleClosure cl = compute_closure(s);
    bool same = true;
    for (const auto& role : all_roles(s)) same = same && cl.of(role) == oracle_members(facts, role);
    agree += same;

    CredentialSet bigger = s;
    bigger.credentials.push_back(random_credential(g));
    RoleClosure cb = compute_closure(bigger);
    bool mono = true;
    for (const auto& role : all_roles(bigger)) {
      const auto& a = cl.of(role);
      const auto& b = cb.of(role);
      mono = mono && std::includes(b.begin(), b.end(), a.begin(), a.end());
    }
    monotone += mono;
  }
  return {agree == n && monotone == n, "oracle agreement " + ratio(agree, n) + ", monotone " + ratio(monotone, n)};
}

// Recombines along the library's plan, but with GMP arithmetic.
mpz_class oracle_recombine(const PlanNode& n, const std::vector<mpz_class>& shares) {
  if (n.is_leaf()) return shares.at(static_cast<std::size_t>(n.leaf_index));
  mpz_class acc = 0;
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    acc += lagrange_oracle(n.chosen[i], n.chosen) * oracle_recombine(n.children[i], shares);
  }
  return mod(acc);
}

void chosen_leaves(const PlanNode& n, AttributeSet& out) {
  if (n.is_leaf()) {
    out.insert(n.attribute);
    return;
  }
  for (const auto& c : n.children) chosen_leaves(c, out);
}

// 9. Scalar secret sharing recombines exactly.
Outcome secret_sharing() {
  SeededRng rng(909);
  std::mt19937_64 g(909);
  auto pool = attribute_pool(12);
  int ok = 0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    PolicyTree tree = random_tree(g, pool, TreeShape{5, 16, 5});
    AttributeSet attrs = random_satisfying_set(g, tree, pool);
    Scalar s = Scalar::random(rng);
    SharePlan shares = assign_shares(tree, s, rng);
    SatisfyingPlan plan = satisfying_plan(tree, attrs);
    std::vector<mpz_class> big;
    for (const auto& sh : shares.leaf_shares) big.push_back(to_mpz(sh));
    AttributeSet used;
    chosen_leaves(plan.root, used);
    bool exact = reconstruct_secret(plan, shares) == s && oracle_recombine(plan.root, big) == to_mpz(s) &&
                 evaluate(tree, used) && std::includes(attrs.begin(), attrs.end(), used.begin(), used.end());
    ok += exact;
  }
  return {ok == n, ratio(ok, n)};
}

// 10. Byte-exact round trips for every object tag, binary and armored.
template <class T, class Make>
int serial_trials(Make make, int n) {
  int ok = 0;
  for (int i = 0; i < n; ++i) {
    T obj = make();
    Bytes bin = serialize(obj);
    std::string arm = armor(bin);
    ok += deserialize<T>(bin) == obj && serialize(deserialize<T>(bin)) == bin && deserialize<T>(as_bytes(arm)) == obj &&
          unwrap(as_bytes(arm)) == bin;
  }
  return ok;
}

Outcome serialization() {
  ObjectGen gen(1010);
  const int n = 100;
  std::vector<std::pair<std::string, int>> r = {
      {"pp", serial_trials<PublicParams>([&] { return gen.public_params(); }, n)},
      {"mk", serial_trials<MasterKey>([&] { return gen.master_key(); }, n)},
      {"da", serial_trials<DAKey>([&] { return gen.da(); }, n)},
      {"user", serial_trials<UserKey>([&] { return gen.user_key(); }, n)},
      {"ct", serial_trials<Ciphertext>([&] { return gen.ciphertext(); }, n)},
      {"creds", serial_trials<CredentialSet>([&] { return gen.credentials(); }, n)},
      {"amap", serial_trials<AttributeMap>([&] { return gen.attribute_map(); }, n)},
  };
  bool all = true;
  std::string detail;
  for (const auto& [name, ok] : r) {
    all = all && ok == n;
    detail += (detail.empty() ? "" : " ") + name + "=" + ratio(ok, n);
  }
  return {all, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"round-trip correctness", round_trip},
      {"policy soundness", policy_soundness},
      {"cross-domain key merging", cross_domain},
      {"collusion resistance", collusion},
      {"rerandomization flaw reproduction", flaw_reproduction},
      {"unbounded delegation depth", unbounded_depth},
      {"epoch dynamics", epoch_dynamics},
      {"trust-management oracle equivalence", trust_oracle},
      {"scalar secret-sharing oracle", secret_sharing},
      {"serialization round trip", serialization},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
