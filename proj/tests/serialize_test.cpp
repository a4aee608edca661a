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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "dhabe/serialize.hpp"
#include "object_gen.hpp"

namespace dhabe {
namespace {

namespace fs = std::filesystem;

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kInvalidArgument;
}

template <class T, class Make>
void round_trip(Make make, int n) {
  for (int i = 0; i < n; ++i) {
    T obj = make();
    Bytes bin = serialize(obj);
    T back = deserialize<T>(bin);
    ASSERT_EQ(back, obj);
    ASSERT_EQ(serialize(back), bin);
    std::string arm = armor(bin);
    ASSERT_EQ(deserialize<T>(as_bytes(arm)), obj);
    ASSERT_EQ(unwrap(as_bytes(arm)), bin);
  }
}

TEST(Serialize, PublicParamsRoundTrip) {
  testing::ObjectGen gen(1);
  round_trip<PublicParams>([&] { return gen.public_params(); }, 100);
}
TEST(Serialize, MasterKeyRoundTrip) {
  testing::ObjectGen gen(2);
  round_trip<MasterKey>([&] { return gen.master_key(); }, 100);
}
TEST(Serialize, DAKeyRoundTrip) {
  testing::ObjectGen gen(3);
  round_trip<DAKey>([&] { return gen.da(); }, 100);
}
TEST(Serialize, UserKeyRoundTrip) {
  testing::ObjectGen gen(4);
  round_trip<UserKey>([&] { return gen.user_key(); }, 100);
}
TEST(Serialize, CiphertextRoundTrip) {
  testing::ObjectGen gen(5);
  round_trip<Ciphertext>([&] { return gen.ciphertext(); }, 100);
}
TEST(Serialize, CredentialSetRoundTrip) {
  testing::ObjectGen gen(6);
  round_trip<CredentialSet>([&] { return gen.credentials(); }, 100);
}
TEST(Serialize, AttributeMapRoundTrip) {
  testing::ObjectGen gen(7);
  round_trip<AttributeMap>([&] { return gen.attribute_map(); }, 100);
}

TEST(Serialize, DecodedCiphertextStillDecrypts) {
  testing::ObjectGen gen(8);
  PolicyTree tree = parse_policy("a and (b or c)");
  Ciphertext ct = encrypt(gen.vo.pp, tree, as_bytes("hello"), gen.rng);
  UserKey key = issue_user_key(gen.vo.pp, gen.vo.root, "u", {"a", "c"});
  Ciphertext back = deserialize<Ciphertext>(serialize(ct));
  UserKey kback = deserialize<UserKey>(as_bytes(armor(serialize(key))));
  Bytes pt = decrypt(gen.vo.pp, kback, back);
  EXPECT_EQ(std::string(pt.begin(), pt.end()), "hello");
}

TEST(Serialize, Envelope) {
  testing::ObjectGen gen(9);
  Bytes bin = serialize(gen.vo.pp);
  ASSERT_GE(bin.size(), 8u);
  EXPECT_EQ(std::string(bin.begin(), bin.begin() + 4), "DHV1");
  EXPECT_EQ(bin[4], 0x01);
  EXPECT_EQ(bin[5], kCurveBls12_381);
  EXPECT_EQ((bin[6] << 8) | bin[7], 4);
  EXPECT_EQ(peek_tag(serialize(gen.vo.mk)), ObjectTag::kMasterKey);
  EXPECT_EQ(object_digest(gen.vo.pp), sha256(bin));
}

TEST(Serialize, RejectsMalformed) {
  testing::ObjectGen gen(10);
  Bytes good = serialize(gen.vo.root);

  Bytes trailing = good;
  trailing.push_back(0);
  EXPECT_EQ(kind_of([&] { deserialize<DAKey>(trailing); }), ErrorKind::kFormat);

  Bytes unknown_tag = good;
  unknown_tag[4] = 0x09;
  EXPECT_EQ(kind_of([&] { deserialize<DAKey>(unknown_tag); }), ErrorKind::kFormat);
  EXPECT_EQ(kind_of([&] { peek_tag(unknown_tag); }), ErrorKind::kFormat);

  Bytes wrong_object = good;
  wrong_object[4] = 0x01;
  EXPECT_EQ(kind_of([&] { deserialize<DAKey>(wrong_object); }), ErrorKind::kFormat);

  Bytes bad_curve = good;
  bad_curve[5] = 0x02;
  EXPECT_EQ(kind_of([&] { deserialize<DAKey>(bad_curve); }), ErrorKind::kFormat);

  Bytes bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(kind_of([&] { deserialize<DAKey>(bad_magic); }), ErrorKind::kFormat);

  Bytes bad_field = good;
  bad_field[8] = 0x02;  // first field tag
  EXPECT_EQ(kind_of([&] { deserialize<DAKey>(bad_field); }), ErrorKind::kFormat);

  Bytes flipped = good;
  flipped[8 + 5 + 10] ^= 0xff;  // inside the G2 element
  EXPECT_EQ(kind_of([&] { deserialize<DAKey>(flipped); }), ErrorKind::kFormat);

  for (std::size_t cut = 0; cut < good.size(); cut += 7) {
    Bytes truncated(good.begin(), good.begin() + cut);
    EXPECT_EQ(kind_of([&] { deserialize<DAKey>(truncated); }), ErrorKind::kFormat) << cut;
  }
  EXPECT_EQ(kind_of([&] { deserialize<DAKey>(Bytes{}); }), ErrorKind::kFormat);
}

TEST(Serialize, RejectsUnknownDemAlgorithm) {
  testing::ObjectGen gen(11);
  Ciphertext ct = gen.ciphertext();
  ct.dem.alg_id = 0x7f;
  EXPECT_EQ(kind_of([&] { deserialize<Ciphertext>(serialize(ct)); }), ErrorKind::kFormat);
}

TEST(Serialize, RejectsNonCanonical) {
  testing::ObjectGen gen(12);
  Ciphertext ct = encrypt(gen.vo.pp, parse_policy("a and b"), as_bytes("x"), gen.rng);
  Bytes bin = serialize(ct);
  // Same policy, non-canonical spelling.
  std::string text = "a and b";
  auto it = std::search(bin.begin(), bin.end(), text.begin(), text.end());
  ASSERT_NE(it, bin.end());
  std::string odd = "a AND b";
  std::copy(odd.begin(), odd.end(), it);
  EXPECT_EQ(kind_of([&] { deserialize<Ciphertext>(bin); }), ErrorKind::kFormat);

  UserKey key = gen.user_key();
  key.components.clear();
  EXPECT_NO_THROW(deserialize<UserKey>(serialize(key)));
  DAKey da = gen.vo.root;
  Bytes dab = serialize(da);
  dab.back() = 2;  // unknown flag bit
  EXPECT_EQ(kind_of([&] { deserialize<DAKey>(dab); }), ErrorKind::kFormat);
}

TEST(Serialize, ArmorErrors) {
  testing::ObjectGen gen(13);
  std::string arm = armor(serialize(gen.vo.pp));
  EXPECT_EQ(arm.rfind("-----BEGIN DHABE PUBLIC PARAMS-----\n", 0), 0u);
  std::string relabeled = arm;
  for (std::string from : {"PUBLIC PARAMS"}) {
    for (std::size_t p = relabeled.find(from); p != std::string::npos; p = relabeled.find(from)) {
      relabeled.replace(p, from.size(), "CIPHERTEXT");
    }
  }
  EXPECT_EQ(kind_of([&] { unwrap(as_bytes(relabeled)); }), ErrorKind::kFormat);
  std::string no_footer = arm.substr(0, arm.find("-----END"));
  EXPECT_EQ(kind_of([&] { unwrap(as_bytes(no_footer)); }), ErrorKind::kFormat);
  std::string junk = arm + "junk\n";
  EXPECT_EQ(kind_of([&] { unwrap(as_bytes(junk)); }), ErrorKind::kFormat);
  std::string bad_b64 = arm;
  bad_b64[40] = '*';
  EXPECT_EQ(kind_of([&] { unwrap(as_bytes(bad_b64)); }), ErrorKind::kFormat);
}

// Golden encodings for curve 0x01, generated from a fixed seed. Set
// DHABE_REGEN_GOLDEN=1 to rewrite them.
TEST(Serialize, GoldenFiles) {
  testing::ObjectGen gen(20260101);
  std::vector<std::pair<std::string, Bytes>> objects = {
      {"public_params", serialize(gen.vo.pp)},
      {"master_key", serialize(gen.vo.mk)},
      {"da_key", serialize(delegate(gen.vo.pp, gen.vo.root, "hospA", gen.rng))},
      {"user_key", serialize(issue_user_key(gen.vo.pp, gen.vo.root, "alice", {"doctor", "cardiology"}))},
      {"ciphertext", serialize(encrypt(gen.vo.pp, parse_policy("doctor and cardiology"), as_bytes("record"), gen.rng))},
      {"credentials", serialize(parse_credentials("HospA.doctor <- Alice\nVO.member <- HospA.doctor\n"))},
      {"attribute_map", serialize(parse_attribute_map("HospA.doctor -> doctor @ hospA\n"))},
  };
  fs::path dir = fs::path(DHABE_GOLDEN_DIR) / "curve01";
  bool regen = std::getenv("DHABE_REGEN_GOLDEN") != nullptr;
  if (regen) fs::create_directories(dir);
  for (const auto& [name, bin] : objects) {
    fs::path file = dir / (name + ".hex");
    if (regen) {
      std::ofstream(file) << to_hex(bin) << "\n";
      continue;
    }
    std::ifstream in(file);
    ASSERT_TRUE(in) << "missing golden file " << file;
    std::string hex;
    in >> hex;
    EXPECT_EQ(hex, to_hex(bin)) << name;
  }
}

}  // namespace
}  // namespace dhabe
