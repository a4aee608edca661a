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

#include "dhabe/scheme.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace dhabe {
namespace {

Bytes msg(std::string_view s) { return Bytes(s.begin(), s.end()); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::kInvalidArgument;
}

class SchemeTest : public ::testing::Test {
 protected:
  SchemeTest() : rng_(42), vo_(setup(rng_)) {}

  DAKey child(const DAKey& parent, std::string_view label) { return delegate(vo_.pp, parent, label, rng_); }

  SeededRng rng_;
  SetupResult vo_;
};

TEST_F(SchemeTest, SetupConstructionIdentity) {
  const auto& g1 = vo_.pp.ctx.g1();
  EXPECT_EQ(pair(g1, vo_.root.z - vo_.pp.a2 * vo_.root.tau), vo_.pp.y);
  EXPECT_TRUE(vo_.pp.consistent());
  EXPECT_EQ(vo_.root.path, IssuerPath{"root"});
  EXPECT_EQ(vo_.pp.current_epoch, 0u);
  EXPECT_EQ(vo_.mk.epoch_seeds.at(0), vo_.root.seed);
}

TEST_F(SchemeTest, DifferentSeedsGiveDifferentParameters) {
  SeededRng other(43);
  SetupResult vo2 = setup(other);
  EXPECT_FALSE(vo2.pp.y == vo_.pp.y);
  SeededRng same(42);
  EXPECT_EQ(setup(same).pp, vo_.pp);
}

TEST_F(SchemeTest, InconsistentParametersDetected) {
  PublicParams bad = vo_.pp;
  bad.a2 = bad.a2 + bad.ctx.g2();
  EXPECT_FALSE(bad.consistent());
}

TEST_F(SchemeTest, DelegationPreservesMasterWitness) {
  DAKey hosp = child(vo_.root, "HospA");
  EXPECT_EQ(hosp.depth(), vo_.root.depth() + 1);
  EXPECT_EQ(hosp.path, (IssuerPath{"root", "HospA"}));
  EXPECT_EQ(hosp.seed, vo_.root.seed);
  EXPECT_FALSE(hosp.tau == vo_.root.tau);
  EXPECT_EQ(recover_master_witness(vo_.pp, hosp), recover_master_witness(vo_.pp, vo_.root));
  EXPECT_EQ(kind_of([&] { child(vo_.root, ""); }), ErrorKind::kInvalidArgument);
}

TEST_F(SchemeTest, WitnessConstantAcrossDepthFive) {
  DAKey da = vo_.root;
  for (int i = 0; i < 5; ++i) da = child(da, "L" + std::to_string(i));
  MasterWitness w = recover_master_witness(vo_.pp, da);
  EXPECT_EQ(w, recover_master_witness(vo_.pp, vo_.root));
  EXPECT_EQ(pair(vo_.pp.ctx.g1(), w.w), vo_.pp.y);
  EXPECT_EQ(w.w, vo_.pp.ctx.g2() * vo_.mk.alpha);
}

TEST_F(SchemeTest, DepthTenChainDecrypts) {
  DAKey da = vo_.root;
  for (int i = 0; i < 10; ++i) da = child(da, "level" + std::to_string(i + 1));
  EXPECT_EQ(da.depth(), 11u);
  UserKey key = issue_user_key(vo_.pp, da, "alice", {"doctor"});
  Ciphertext ct = encrypt(vo_.pp, parse_policy("doctor"), msg("deep"), rng_);
  EXPECT_EQ(decrypt(vo_.pp, key, ct), msg("deep"));
}

TEST_F(SchemeTest, RerandomizedSiblingIssuesIdenticalKeys) {
  DAKey hosp = child(vo_.root, "HospA");
  DAKey rogue = rerandomize(vo_.pp, hosp, {"root", "Rogue"}, rng_);
  EXPECT_EQ(rogue.depth(), hosp.depth());
  EXPECT_TRUE(rogue.forged);
  EXPECT_FALSE(rogue.z == hosp.z);
  EXPECT_EQ(recover_master_witness(vo_.pp, rogue), recover_master_witness(vo_.pp, hosp));

  UserKey honest = issue_user_key(vo_.pp, hosp, "alice", {"doctor"});
  UserKey forged = issue_user_key(vo_.pp, rogue, "alice", {"doctor"});
  EXPECT_EQ(forged.k, honest.k);
  EXPECT_EQ(forged.l, honest.l);
  EXPECT_EQ(forged.components, honest.components);

  // With the same path label the sibling is indistinguishable outright.
  DAKey twin = rerandomize(vo_.pp, hosp, hosp.path, rng_);
  EXPECT_EQ(issue_user_key(vo_.pp, twin, "alice", {"doctor"}), honest);

  EXPECT_EQ(kind_of([&] { rerandomize(vo_.pp, hosp, {"x"}, rng_); }), ErrorKind::kInvalidArgument);
  EXPECT_TRUE(child(rogue, "sub").forged);
}

TEST_F(SchemeTest, IssuedShardIsWellFormed) {
  UserKey key = issue_user_key(vo_.pp, child(vo_.root, "A"), "alice", {"doctor", "staff"});
  EXPECT_TRUE(is_well_formed(vo_.pp, key));
  EXPECT_EQ(key.attributes(), (AttributeSet{"doctor", "staff"}));
  EXPECT_EQ(key.issuer_paths, (std::vector<IssuerPath>{{"root", "A"}}));

  for (int i = 0; i < 5; ++i) {
    UserKey bad = key;
    bad.k = bad.k + vo_.pp.ctx.g2() * Scalar::random(rng_);
    EXPECT_FALSE(is_well_formed(vo_.pp, bad));
  }
}

TEST_F(SchemeTest, SameUserGetsSameBindingFromEveryDa) {
  DAKey a = child(vo_.root, "A");
  DAKey b = child(vo_.root, "B");
  UserKey ka = issue_user_key(vo_.pp, a, "alice", {"doctor"});
  UserKey kb = issue_user_key(vo_.pp, b, "alice", {"cardiology"});
  EXPECT_EQ(ka.k, kb.k);
  EXPECT_EQ(ka.l, kb.l);
  UserKey bob = issue_user_key(vo_.pp, a, "bob", {"doctor"});
  EXPECT_FALSE(bob.l == ka.l);
}

TEST_F(SchemeTest, IssueErrors) {
  EXPECT_EQ(kind_of([&] { issue_user_key(vo_.pp, vo_.root, "alice", {}); }), ErrorKind::kEmptyAttributes);
  EXPECT_EQ(kind_of([&] { issue_user_key(vo_.pp, vo_.root, "", {"a"}); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([&] { issue_user_key(vo_.pp, vo_.root, "alice", {"and"}); }), ErrorKind::kInvalidArgument);
  PublicParams later = vo_.pp;
  later.current_epoch = 1;
  EXPECT_EQ(kind_of([&] { issue_user_key(later, vo_.root, "alice", {"a"}); }), ErrorKind::kEpochMismatch);
}

TEST_F(SchemeTest, MergeUnionsAttributes) {
  UserKey a = issue_user_key(vo_.pp, child(vo_.root, "A"), "alice", {"doctor"});
  UserKey b = issue_user_key(vo_.pp, child(vo_.root, "B"), "alice", {"cardiology"});
  UserKeyShard shards[] = {a, b};
  UserKey merged = merge_shards(shards);
  EXPECT_EQ(merged.attributes(), (AttributeSet{"cardiology", "doctor"}));
  EXPECT_EQ(merged.issuer_paths.size(), 2u);
  EXPECT_TRUE(is_well_formed(vo_.pp, merged));

  UserKeyShard one[] = {a};
  EXPECT_EQ(merge_shards(one), a);
  EXPECT_EQ(kind_of([&] { merge_shards({}); }), ErrorKind::kInvalidArgument);
}

TEST_F(SchemeTest, MergeLaterShardWinsOnDuplicates) {
  UserKey a = issue_user_key(vo_.pp, child(vo_.root, "A"), "alice", {"doctor"});
  UserKey b = a;
  b.components["doctor"] = vo_.pp.ctx.g1();
  UserKeyShard shards[] = {a, b};
  EXPECT_EQ(merge_shards(shards).components.at("doctor"), vo_.pp.ctx.g1());
}

TEST_F(SchemeTest, MergeRefusesMismatchedShards) {
  DAKey da = child(vo_.root, "A");
  UserKey alice = issue_user_key(vo_.pp, da, "alice", {"doctor"});
  UserKey bob = issue_user_key(vo_.pp, da, "bob", {"cardiology"});
  UserKeyShard users[] = {alice, bob};
  EXPECT_EQ(kind_of([&] { merge_shards(users); }), ErrorKind::kMergeRefused);

  UserKey renamed = bob;
  renamed.user_id = "alice";  // same name, different binding
  UserKeyShard spoofed[] = {alice, renamed};
  EXPECT_EQ(kind_of([&] { merge_shards(spoofed); }), ErrorKind::kMergeRefused);

  UserKey other_epoch = alice;
  other_epoch.epoch = 3;
  UserKeyShard epochs[] = {alice, other_epoch};
  EXPECT_EQ(kind_of([&] { merge_shards(epochs); }), ErrorKind::kMergeRefused);
}

TEST_F(SchemeTest, RoundTripAndCiphertextShape) {
  UserKey key = issue_user_key(vo_.pp, child(vo_.root, "A"), "alice", {"doctor", "cardiology"});
  PolicyTree tree = parse_policy("(doctor and cardiology) or admin");
  Ciphertext ct = encrypt(vo_.pp, tree, msg("patient record"), rng_);
  EXPECT_EQ(ct.leaves.size(), tree.leaf_count());
  EXPECT_EQ(ct.epoch, 0u);
  EXPECT_EQ(decrypt(vo_.pp, key, ct), msg("patient record"));
  EXPECT_EQ(decrypt(vo_.pp, key, encrypt(vo_.pp, tree, Bytes{}, rng_)), Bytes{});
}

TEST_F(SchemeTest, TamperingFailsAuthentication) {
  UserKey key = issue_user_key(vo_.pp, vo_.root, "alice", {"a", "b"});
  Ciphertext ct = encrypt(vo_.pp, parse_policy("a and b"), msg("secret"), rng_);

  Ciphertext body = ct;
  body.dem.body[0] ^= 1;
  EXPECT_EQ(kind_of([&] { decrypt(vo_.pp, key, body); }), ErrorKind::kAuthenticationFailed);

  Ciphertext nonce = ct;
  nonce.dem.nonce[3] ^= 0x80;
  EXPECT_EQ(kind_of([&] { decrypt(vo_.pp, key, nonce); }), ErrorKind::kAuthenticationFailed);

  // Swapping in a weaker policy with the same leaf layout is caught by the
  // header binding.
  Ciphertext swapped = ct;
  swapped.tree = parse_policy("a or b");
  EXPECT_EQ(kind_of([&] { decrypt(vo_.pp, key, swapped); }), ErrorKind::kAuthenticationFailed);

  Ciphertext alg = ct;
  alg.dem.alg_id = 9;
  EXPECT_EQ(kind_of([&] { decrypt(vo_.pp, key, alg); }), ErrorKind::kFormat);
}

TEST_F(SchemeTest, NonSatisfyingKeyDeniedBeforePairing) {
  UserKey key = issue_user_key(vo_.pp, vo_.root, "bob", {"doctor"});
  Ciphertext ct = encrypt(vo_.pp, parse_policy("doctor and cardiology"), msg("x"), rng_);
  EXPECT_EQ(kind_of([&] { decrypt(vo_.pp, key, ct); }), ErrorKind::kPolicyNotSatisfied);
}

TEST_F(SchemeTest, MixedUserKeysFailAuthentication) {
  DAKey a = child(vo_.root, "A");
  DAKey b = child(vo_.root, "B");
  PolicyTree tree = parse_policy("doctor and cardiology");
  for (int trial = 0; trial < 20; ++trial) {
    std::string u1 = "u" + std::to_string(2 * trial), u2 = "u" + std::to_string(2 * trial + 1);
    UserKey k1 = issue_user_key(vo_.pp, a, u1, {"doctor"});
    UserKey k2 = issue_user_key(vo_.pp, b, u2, {"cardiology"});
    UserKey forged = k1;  // bypasses merge_shards
    forged.components.insert(k2.components.begin(), k2.components.end());
    Ciphertext ct = encrypt(vo_.pp, tree, msg("x"), rng_);
    EXPECT_EQ(kind_of([&] { decrypt(vo_.pp, forged, ct); }), ErrorKind::kAuthenticationFailed);
  }
}

TEST_F(SchemeTest, CrossDomainMergeDecryptsConjunction) {
  DAKey a = child(vo_.root, "HospA");
  DAKey b = child(child(vo_.root, "HospB"), "Cardio");
  UserKey sa = issue_user_key(vo_.pp, a, "alice", {"doctor"});
  UserKey sb = issue_user_key(vo_.pp, b, "alice", {"cardiology"});
  Ciphertext ct = encrypt(vo_.pp, parse_policy("doctor and cardiology"), msg("joint"), rng_);
  EXPECT_EQ(kind_of([&] { decrypt(vo_.pp, sa, ct); }), ErrorKind::kPolicyNotSatisfied);
  EXPECT_EQ(kind_of([&] { decrypt(vo_.pp, sb, ct); }), ErrorKind::kPolicyNotSatisfied);
  UserKeyShard shards[] = {sa, sb};
  EXPECT_EQ(decrypt(vo_.pp, merge_shards(shards), ct), msg("joint"));
}

TEST_F(SchemeTest, RandomPoliciesRoundTrip) {
  std::mt19937_64 gen(7);
  auto pool = testing::attribute_pool(8);
  DAKey da = vo_.root;
  for (int i = 0; i < 30; ++i) {
    if (i % 3 == 0) da = child(da, "d" + std::to_string(i));
    PolicyTree tree = testing::random_tree(gen, pool);
    AttributeSet attrs = testing::random_satisfying_set(gen, tree, pool);
    UserKey key = issue_user_key(vo_.pp, da, "user" + std::to_string(i), attrs);
    Bytes m = msg("message " + std::to_string(i));
    EXPECT_EQ(decrypt(vo_.pp, key, encrypt(vo_.pp, tree, m, rng_)), m) << print_policy(tree);
  }
}

TEST_F(SchemeTest, EpochRekey) {
  DAKey a0 = child(vo_.root, "A");
  UserKey old_key = issue_user_key(vo_.pp, a0, "alice", {"doctor"});
  Ciphertext old_ct = encrypt(vo_.pp, parse_policy("doctor"), msg("old"), rng_);

  RekeyResult next = epoch_rekey(vo_.mk, vo_.pp, rng_);
  EXPECT_EQ(next.pp.current_epoch, 1u);
  EXPECT_EQ(next.pp.y, vo_.pp.y);
  EXPECT_EQ(next.root.epoch, 1u);
  EXPECT_EQ(vo_.mk.epoch_seeds.size(), 2u);
  EXPECT_FALSE(vo_.mk.epoch_seeds.at(1) == vo_.mk.epoch_seeds.at(0));
  EXPECT_EQ(recover_master_witness(next.pp, next.root), recover_master_witness(vo_.pp, vo_.root));

  Ciphertext new_ct = encrypt(next.pp, parse_policy("doctor"), msg("new"), rng_);
  EXPECT_EQ(new_ct.epoch, 1u);
  EXPECT_EQ(kind_of([&] { decrypt(next.pp, old_key, new_ct); }), ErrorKind::kEpochMismatch);
  EXPECT_EQ(decrypt(next.pp, old_key, old_ct), msg("old"));

  DAKey a1 = delegate(next.pp, next.root, "A", rng_);
  UserKey new_key = issue_user_key(next.pp, a1, "alice", {"doctor"});
  EXPECT_EQ(decrypt(next.pp, new_key, new_ct), msg("new"));
  EXPECT_FALSE(new_key.l == old_key.l);

  // A DA left out of re-delegation cannot mint current-epoch keys.
  EXPECT_EQ(kind_of([&] { issue_user_key(next.pp, a0, "carol", {"doctor"}); }), ErrorKind::kEpochMismatch);
}

TEST_F(SchemeTest, RekeyRejectsForeignMasterKey) {
  SeededRng other(1);
  SetupResult vo2 = setup(other);
  EXPECT_EQ(kind_of([&] { epoch_rekey(vo2.mk, vo_.pp, rng_); }), ErrorKind::kInvalidArgument);
}

TEST(PathTest, FormatAndParse) {
  EXPECT_EQ(parse_path("root/HospA/Cardio"), (IssuerPath{"root", "HospA", "Cardio"}));
  EXPECT_EQ(format_path({"root", "x"}), "root/x");
  EXPECT_THROW(parse_path("root//x"), Error);
  EXPECT_THROW(parse_path(""), Error);
}

}  // namespace
}  // namespace dhabe
