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

#include "dhabe/group.hpp"

#include <gtest/gtest.h>

#include <set>
#include <string>

#include "test_support.hpp"

namespace dhabe {
namespace {

using testing::group_order;
using testing::to_mpz;

TEST(GroupContextTest, OrderIsPrimeAndGeneratorsHaveOrderQ) {
  mpz_class q = group_order();
  EXPECT_NE(mpz_probab_prime_p(q.get_mpz_t(), 50), 0);

  const auto& ctx = GroupContext::bls12_381();
  Scalar minus_one = -Scalar::from_u64(1);
  EXPECT_FALSE(ctx.g1().is_identity());
  EXPECT_FALSE(ctx.g2().is_identity());
  // (q-1)*g + g = q*g
  EXPECT_TRUE((ctx.g1() * minus_one + ctx.g1()).is_identity());
  EXPECT_TRUE((ctx.g2() * minus_one + ctx.g2()).is_identity());
  EXPECT_TRUE(ctx.g1().in_subgroup());
  EXPECT_TRUE(ctx.g2().in_subgroup());
}

TEST(GroupContextTest, PairingIsNonDegenerate) {
  const auto& ctx = GroupContext::bls12_381();
  Gt e = pair(ctx.g1(), ctx.g2());
  EXPECT_FALSE(e.is_one());
  EXPECT_TRUE(e.in_subgroup());
}

TEST(ScalarTest, ArithmeticMatchesGmp) {
  SeededRng rng(7);
  mpz_class q = group_order();
  for (int i = 0; i < 50; ++i) {
    Scalar a = Scalar::random(rng);
    Scalar b = Scalar::random(rng);
    mpz_class ma = to_mpz(a), mb = to_mpz(b);
    EXPECT_EQ(to_mpz(a + b), testing::mod(ma + mb));
    EXPECT_EQ(to_mpz(a - b), testing::mod(ma - mb));
    EXPECT_EQ(to_mpz(a * b), testing::mod(ma * mb));
    EXPECT_EQ(to_mpz(a.inverse()), testing::inverse_mod(ma));
    EXPECT_EQ(to_mpz(-a), testing::mod(-ma));
  }
  EXPECT_EQ(to_mpz(Scalar::from_int(-1)), q - 1);
  EXPECT_THROW(Scalar{}.inverse(), Error);
}

TEST(ScalarTest, WideReductionMatchesGmp) {
  SeededRng rng(11);
  for (int i = 0; i < 50; ++i) {
    auto wide = rng.bytes<64>();
    mpz_class expect = testing::mod(mpz_class(to_hex(wide), 16));
    EXPECT_EQ(to_mpz(Scalar::from_wide(wide)), expect);
  }
}

TEST(ScalarTest, DecodeRejectsUnreducedValues) {
  Bytes q = from_hex(GroupContext::order_hex());
  EXPECT_THROW(Scalar::decode(q), Error);
  EXPECT_THROW(Scalar::decode(Bytes(31, 0)), Error);
  EXPECT_TRUE(Scalar::decode(Bytes(32, 0)).is_zero());
  q.back() -= 1;  // q - 1 is the largest valid scalar
  EXPECT_EQ(Scalar::decode(q), -Scalar::from_u64(1));
}

TEST(HashToG1Test, DeterministicAndInSubgroup) {
  Bytes m = {1, 2, 3};
  G1 a = hash_to_g1("TAG", m);
  EXPECT_EQ(a, hash_to_g1("TAG", m));
  EXPECT_TRUE(a.in_subgroup());
  EXPECT_FALSE(a.is_identity());
}

TEST(HashToG1Test, DistinctTagsGiveDistinctOutputs) {
  SeededRng rng(1);
  for (int i = 0; i < 100; ++i) {
    auto m = rng.bytes<24>();
    G1 a = hash_to_g1("DHABE:TEST-A", m);
    G1 b = hash_to_g1("DHABE:TEST-B", m);
    EXPECT_FALSE(a == b);
    EXPECT_TRUE(a.in_subgroup());
    EXPECT_TRUE(b.in_subgroup());
  }
}

TEST(HashToG1Test, EmptyTagRejected) {
  EXPECT_THROW(hash_to_g1("", Bytes{}), Error);
  EXPECT_THROW(hash_to_scalar("", Bytes{}), Error);
}

TEST(HashToScalarTest, DeterministicNonZeroCollisionFree) {
  SeededRng rng(2);
  std::set<std::string> seen;
  for (int i = 0; i < 1000; ++i) {
    auto m = rng.bytes<16>();
    Scalar s = hash_to_scalar("DHABE:PRF", m);
    EXPECT_EQ(s, hash_to_scalar("DHABE:PRF", m));
    EXPECT_FALSE(s.is_zero());
    EXPECT_LT(to_mpz(s), group_order());
    seen.insert(to_hex(s.encode()));
  }
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(PairingTest, SmallExponentBilinearity) {
  const auto& ctx = GroupContext::bls12_381();
  Gt lhs = pair(ctx.g1() * Scalar::from_u64(2), ctx.g2() * Scalar::from_u64(3));
  Gt rhs = pair(ctx.g1(), ctx.g2()).pow(Scalar::from_u64(6));
  EXPECT_EQ(lhs, rhs);
}

TEST(PairingTest, IdentityPairsToOne) {
  const auto& ctx = GroupContext::bls12_381();
  EXPECT_TRUE(pair(G1::identity(), ctx.g2()).is_one());
  EXPECT_TRUE(pair(ctx.g1(), G2::identity()).is_one());
}

TEST(PairingTest, RandomBilinearity) {
  const auto& ctx = GroupContext::bls12_381();
  SeededRng rng(3);
  Gt base = pair(ctx.g1(), ctx.g2());
  for (int i = 0; i < 20; ++i) {
    Scalar x = Scalar::random(rng), y = Scalar::random(rng);
    Gt a = pair(ctx.g1() * x, ctx.g2() * y);
    EXPECT_EQ(a, pair(ctx.g1() * (x * y), ctx.g2()));
    EXPECT_EQ(a, base.pow(x * y));
  }
}

TEST(PairingTest, MultiPairEqualsProduct) {
  const auto& ctx = GroupContext::bls12_381();
  SeededRng rng(4);
  std::vector<std::pair<G1, G2>> terms;
  Gt expect;
  for (int i = 0; i < 20; ++i) {  // crosses the 16-pair batch boundary
    G1 p = ctx.g1() * Scalar::random(rng);
    G2 q = ctx.g2() * Scalar::random(rng);
    terms.emplace_back(p, q);
    expect *= pair(p, q);
  }
  terms.emplace_back(G1::identity(), ctx.g2());
  EXPECT_EQ(multi_pair(terms), expect);
  EXPECT_TRUE(multi_pair({}).is_one());
}

TEST(GtTest, InverseAndPow) {
  SeededRng rng(5);
  Gt e = pair(GroupContext::bls12_381().g1(), GroupContext::bls12_381().g2());
  Scalar x = Scalar::random(rng);
  EXPECT_TRUE((e.pow(x) * e.pow(x).inverse()).is_one());
  EXPECT_EQ(e.pow(-x), e.pow(x).inverse());
  EXPECT_TRUE(e.pow(Scalar{}).is_one());
}

TEST(EncodingTest, GeneratorRoundTrip) {
  const auto& ctx = GroupContext::bls12_381();
  EXPECT_EQ(G1::decode(ctx.g1().encode()), ctx.g1());
  EXPECT_EQ(G2::decode(ctx.g2().encode()), ctx.g2());
  EXPECT_EQ(G1::decode(G1::identity().encode()), G1::identity());
}

TEST(EncodingTest, WrongLengthRejected) {
  EXPECT_THROW(G1::decode(Bytes(47, 0)), Error);
  EXPECT_THROW(G2::decode(Bytes(48, 0)), Error);
  EXPECT_THROW(Gt::decode(Bytes(575, 0)), Error);
  EXPECT_THROW(G1::decode(Bytes(48, 0)), Error);  // right length, no compression flag
  try {
    G1::decode(Bytes(10, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
}

TEST(EncodingTest, RandomElementsRoundTripByteExact) {
  const auto& ctx = GroupContext::bls12_381();
  SeededRng rng(6);
  Gt base = pair(ctx.g1(), ctx.g2());
  for (int i = 0; i < 100; ++i) {
    Scalar k = Scalar::random(rng);
    G1 p = ctx.g1() * k;
    G2 q = ctx.g2() * k;
    Gt t = base.pow(k);
    auto pe = p.encode();
    auto qe = q.encode();
    auto te = t.encode();
    EXPECT_EQ(G1::decode(pe), p);
    EXPECT_EQ(G2::decode(qe), q);
    EXPECT_EQ(Gt::decode(te), t);
    EXPECT_EQ(Scalar::decode(k.encode()), k);
    EXPECT_EQ(G1::decode(pe).encode(), pe);
    EXPECT_EQ(G2::decode(qe).encode(), qe);
    EXPECT_EQ(Gt::decode(te).encode(), te);
  }
}

TEST(EncodingTest, GtOutsideSubgroupRejected) {
  // 1 + 1 = 2 as the constant coefficient: a field element, not in GT.
  auto e = Gt::one().encode();
  e[47] = 2;
  EXPECT_THROW(Gt::decode(e), Error);
}

TEST(EncodingTest, NonCanonicalFieldElementRejected) {
  // x = p is on no canonical path; blst reports a bad encoding.
  Bytes p = from_hex(
      "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f6241eabfffeb153ffffb9feffffffffaaab");
  p[0] |= 0x80;
  EXPECT_THROW(G1::decode(p), Error);
}

// Find x with x^3 + 4 square: the point lies on the curve but, because of
// the cofactor, almost surely outside the order-q subgroup.
TEST(EncodingTest, OffSubgroupPointRejected) {
  SeededRng rng(8);
  int rejected = 0;
  for (int attempt = 0; attempt < 200 && rejected < 3; ++attempt) {
    auto bytes = rng.bytes<48>();
    bytes[0] = static_cast<std::uint8_t>((bytes[0] & 0x0f) | 0x80);
    blst_p1_affine a;
    if (blst_p1_uncompress(&a, bytes.data()) != BLST_SUCCESS) continue;
    if (blst_p1_affine_in_g1(&a)) continue;
    EXPECT_THROW(G1::decode(bytes), Error);
    ++rejected;
  }
  EXPECT_EQ(rejected, 3);

  rejected = 0;
  for (int attempt = 0; attempt < 200 && rejected < 3; ++attempt) {
    auto bytes = rng.bytes<96>();
    bytes[0] = static_cast<std::uint8_t>((bytes[0] & 0x0f) | 0x80);
    bytes[48] &= 0x0f;
    blst_p2_affine a;
    if (blst_p2_uncompress(&a, bytes.data()) != BLST_SUCCESS) continue;
    if (blst_p2_affine_in_g2(&a)) continue;
    EXPECT_THROW(G2::decode(bytes), Error);
    ++rejected;
  }
  EXPECT_EQ(rejected, 3);
}

}  // namespace
}  // namespace dhabe
