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

// Type-3 pairing group arithmetic over BLS12-381, backed by blst.
//
// Everything above this header treats G1, G2 and GT elements as opaque
// values with group operators, canonical byte encodings and hashing.

#pragma once

#include <blst.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "dhabe/bytes.hpp"
#include "dhabe/error.hpp"
#include "dhabe/rng.hpp"

namespace dhabe {

inline constexpr std::uint8_t kCurveBls12_381 = 0x01;

class Scalar {
 public:
  static constexpr std::size_t kEncodedSize = 32;

  Scalar() { std::memset(&v_, 0, sizeof v_); }

  static Scalar from_u64(std::uint64_t x) {
    std::uint64_t limbs[4] = {x, 0, 0, 0};
    Scalar s;
    blst_fr_from_uint64(&s.v_, limbs);
    return s;
  }

  static Scalar from_int(std::int64_t x) {
    if (x >= 0) return from_u64(static_cast<std::uint64_t>(x));
    return -from_u64(static_cast<std::uint64_t>(-(x + 1)) + 1);
  }

  // Reduces an arbitrary-length big-endian integer modulo q.
  static Scalar from_wide(ByteView be) {
    blst_scalar tmp;
    blst_scalar_from_be_bytes(&tmp, be.data(), be.size());
    Scalar s;
    blst_fr_from_scalar(&s.v_, &tmp);
    return s;
  }

  // Strict decoding: exactly 32 big-endian bytes encoding a value < q.
  static Scalar decode(ByteView be) {
    if (be.size() != kEncodedSize) throw Error(ErrorKind::kFormat, "scalar must be 32 bytes");
    blst_scalar tmp;
    blst_scalar_from_bendian(&tmp, be.data());
    if (!blst_scalar_fr_check(&tmp)) {
      // fr_check rejects zero as well; zero is a legal encoding.
      bool zero = std::all_of(be.begin(), be.end(), [](std::uint8_t b) { return b == 0; });
      if (!zero) throw Error(ErrorKind::kFormat, "scalar not reduced modulo q");
      return Scalar{};
    }
    Scalar s;
    blst_fr_from_scalar(&s.v_, &tmp);
    return s;
  }

  // Uniform non-zero scalar via wide reduction of 64 random bytes.
  static Scalar random(Rng& rng) {
    for (;;) {
      auto wide = rng.bytes<64>();
      Scalar s = from_wide(wide);
      if (!s.is_zero()) return s;
    }
  }

  std::array<std::uint8_t, kEncodedSize> encode() const {
    blst_scalar tmp;
    blst_scalar_from_fr(&tmp, &v_);
    std::array<std::uint8_t, kEncodedSize> out{};
    blst_bendian_from_scalar(out.data(), &tmp);
    return out;
  }

  // Little-endian scalar as consumed by the point multiplication routines.
  blst_scalar to_blst() const {
    blst_scalar tmp;
    blst_scalar_from_fr(&tmp, &v_);
    return tmp;
  }

  bool is_zero() const {
    auto e = encode();
    return std::all_of(e.begin(), e.end(), [](std::uint8_t b) { return b == 0; });
  }

  Scalar inverse() const {
    if (is_zero()) throw Error(ErrorKind::kInvalidArgument, "inverse of zero");
    Scalar out;
    blst_fr_inverse(&out.v_, &v_);
    return out;
  }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    Scalar out;
    blst_fr_add(&out.v_, &a.v_, &b.v_);
    return out;
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) {
    Scalar out;
    blst_fr_sub(&out.v_, &a.v_, &b.v_);
    return out;
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    Scalar out;
    blst_fr_mul(&out.v_, &a.v_, &b.v_);
    return out;
  }
  Scalar operator-() const {
    Scalar out;
    blst_fr_cneg(&out.v_, &v_, true);
    return out;
  }
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.encode() == b.encode(); }

 private:
  blst_fr v_;
};

class G1 {
 public:
  static constexpr std::size_t kEncodedSize = 48;

  G1() { std::memset(&p_, 0, sizeof p_); }  // all-zero Z is the identity in blst

  static G1 identity() { return G1{}; }
  static G1 generator() {
    G1 g;
    g.p_ = *blst_p1_generator();
    return g;
  }

  bool is_identity() const { return blst_p1_is_inf(&p_); }
  bool in_subgroup() const { return blst_p1_in_g1(&p_); }

  friend G1 operator+(const G1& a, const G1& b) {
    G1 out;
    blst_p1_add_or_double(&out.p_, &a.p_, &b.p_);
    return out;
  }
  G1 operator-() const {
    G1 out = *this;
    blst_p1_cneg(&out.p_, true);
    return out;
  }
  friend G1 operator-(const G1& a, const G1& b) { return a + (-b); }
  friend G1 operator*(const G1& p, const Scalar& k) {
    blst_scalar s = k.to_blst();
    G1 out;
    blst_p1_mult(&out.p_, &p.p_, s.b, 255);
    return out;
  }
  G1& operator+=(const G1& o) { return *this = *this + o; }

  friend bool operator==(const G1& a, const G1& b) { return blst_p1_is_equal(&a.p_, &b.p_); }

  std::array<std::uint8_t, kEncodedSize> encode() const {
    std::array<std::uint8_t, kEncodedSize> out{};
    blst_p1_compress(out.data(), &p_);
    return out;
  }

  // Accepts only the canonical compressed form of a prime-order subgroup point.
  static G1 decode(ByteView in) {
    if (in.size() != kEncodedSize) throw Error(ErrorKind::kFormat, "G1 element must be 48 bytes");
    blst_p1_affine a;
    if (blst_p1_uncompress(&a, in.data()) != BLST_SUCCESS) {
      throw Error(ErrorKind::kFormat, "invalid G1 encoding");
    }
    if (!blst_p1_affine_in_g1(&a)) throw Error(ErrorKind::kFormat, "G1 point outside prime-order subgroup");
    G1 out;
    blst_p1_from_affine(&out.p_, &a);
    auto again = out.encode();
    if (!std::equal(again.begin(), again.end(), in.begin())) {
      throw Error(ErrorKind::kFormat, "non-canonical G1 encoding");
    }
    return out;
  }

  blst_p1_affine affine() const {
    blst_p1_affine a;
    blst_p1_to_affine(&a, &p_);
    return a;
  }
  const blst_p1& raw() const { return p_; }
  static G1 from_raw(const blst_p1& p) {
    G1 out;
    out.p_ = p;
    return out;
  }

 private:
  blst_p1 p_;
};

class G2 {
 public:
  static constexpr std::size_t kEncodedSize = 96;

  G2() { std::memset(&p_, 0, sizeof p_); }

  static G2 identity() { return G2{}; }
  static G2 generator() {
    G2 g;
    g.p_ = *blst_p2_generator();
    return g;
  }

  bool is_identity() const { return blst_p2_is_inf(&p_); }
  bool in_subgroup() const { return blst_p2_in_g2(&p_); }

  friend G2 operator+(const G2& a, const G2& b) {
    G2 out;
    blst_p2_add_or_double(&out.p_, &a.p_, &b.p_);
    return out;
  }
  G2 operator-() const {
    G2 out = *this;
    blst_p2_cneg(&out.p_, true);
    return out;
  }
  friend G2 operator-(const G2& a, const G2& b) { return a + (-b); }
  friend G2 operator*(const G2& p, const Scalar& k) {
    blst_scalar s = k.to_blst();
    G2 out;
    blst_p2_mult(&out.p_, &p.p_, s.b, 255);
    return out;
  }
  G2& operator+=(const G2& o) { return *this = *this + o; }

  friend bool operator==(const G2& a, const G2& b) { return blst_p2_is_equal(&a.p_, &b.p_); }

  std::array<std::uint8_t, kEncodedSize> encode() const {
    std::array<std::uint8_t, kEncodedSize> out{};
    blst_p2_compress(out.data(), &p_);
    return out;
  }

  static G2 decode(ByteView in) {
    if (in.size() != kEncodedSize) throw Error(ErrorKind::kFormat, "G2 element must be 96 bytes");
    blst_p2_affine a;
    if (blst_p2_uncompress(&a, in.data()) != BLST_SUCCESS) {
      throw Error(ErrorKind::kFormat, "invalid G2 encoding");
    }
    if (!blst_p2_affine_in_g2(&a)) throw Error(ErrorKind::kFormat, "G2 point outside prime-order subgroup");
    G2 out;
    blst_p2_from_affine(&out.p_, &a);
    auto again = out.encode();
    if (!std::equal(again.begin(), again.end(), in.begin())) {
      throw Error(ErrorKind::kFormat, "non-canonical G2 encoding");
    }
    return out;
  }

  blst_p2_affine affine() const {
    blst_p2_affine a;
    blst_p2_to_affine(&a, &p_);
    return a;
  }

 private:
  blst_p2 p_;
};

// Element of the order-q target group, written multiplicatively.
class Gt {
 public:
  static constexpr std::size_t kEncodedSize = 48 * 12;

  Gt() : f_(*blst_fp12_one()) {}

  static Gt one() { return Gt{}; }
  static Gt from_raw(const blst_fp12& f) {
    Gt out;
    out.f_ = f;
    return out;
  }

  bool is_one() const { return blst_fp12_is_one(&f_); }
  bool in_subgroup() const { return blst_fp12_in_group(&f_); }

  friend Gt operator*(const Gt& a, const Gt& b) {
    Gt out;
    blst_fp12_mul(&out.f_, &a.f_, &b.f_);
    return out;
  }
  Gt& operator*=(const Gt& o) { return *this = *this * o; }

  Gt inverse() const {
    Gt out;
    blst_fp12_inverse(&out.f_, &f_);
    return out;
  }

  // Left-to-right square-and-multiply over the 255-bit exponent.
  Gt pow(const Scalar& k) const {
    auto bits = k.encode();
    Gt acc;
    for (std::uint8_t byte : bits) {
      for (int i = 7; i >= 0; --i) {
        blst_fp12_sqr(&acc.f_, &acc.f_);
        if ((byte >> i) & 1) blst_fp12_mul(&acc.f_, &acc.f_, &f_);
      }
    }
    return acc;
  }

  friend bool operator==(const Gt& a, const Gt& b) { return blst_fp12_is_equal(&a.f_, &b.f_); }

  // Twelve big-endian Fp coefficients, 576 bytes.
  std::array<std::uint8_t, kEncodedSize> encode() const {
    std::array<std::uint8_t, kEncodedSize> out{};
    blst_bendian_from_fp12(out.data(), &f_);
    return out;
  }

  static Gt decode(ByteView in) {
    if (in.size() != kEncodedSize) throw Error(ErrorKind::kFormat, "GT element must be 576 bytes");
    Gt out;
    const std::uint8_t* p = in.data();
    // Coefficient order mirrors blst_bendian_from_fp12.
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 2; ++j) {
        blst_fp_from_bendian(&out.f_.fp6[j].fp2[i].fp[0], p);
        p += 48;
        blst_fp_from_bendian(&out.f_.fp6[j].fp2[i].fp[1], p);
        p += 48;
      }
    }
    auto again = out.encode();
    if (!std::equal(again.begin(), again.end(), in.begin())) {
      throw Error(ErrorKind::kFormat, "non-canonical GT encoding");
    }
    if (!out.in_subgroup()) throw Error(ErrorKind::kFormat, "GT element outside prime-order subgroup");
    return out;
  }

 private:
  blst_fp12 f_;
};

// Curve parameters shared by every object of one deployment.
struct GroupContext {
  std::uint8_t curve_id = kCurveBls12_381;

  static const GroupContext& bls12_381() {
    static const GroupContext ctx{};
    return ctx;
  }

  static GroupContext from_id(std::uint8_t id) {
    if (id != kCurveBls12_381) throw Error(ErrorKind::kFormat, "unsupported curve id");
    return GroupContext{id};
  }

  // Prime order q of G1, G2 and GT, big-endian hex.
  static constexpr std::string_view order_hex() {
    return "73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001";
  }

  G1 g1() const { return G1::generator(); }
  G2 g2() const { return G2::generator(); }

  friend bool operator==(const GroupContext&, const GroupContext&) = default;
};

inline Gt pair(const G1& p, const G2& q) {
  if (p.is_identity() || q.is_identity()) return Gt::one();
  blst_p1_affine pa = p.affine();
  blst_p2_affine qa = q.affine();
  blst_fp12 ml;
  blst_miller_loop(&ml, &qa, &pa);
  blst_fp12 out;
  blst_final_exp(&out, &ml);
  return Gt::from_raw(out);
}

// Product of pairings with a single final exponentiation.
inline Gt multi_pair(std::span<const std::pair<G1, G2>> terms) {
  std::vector<blst_p1_affine> ps;
  std::vector<blst_p2_affine> qs;
  ps.reserve(terms.size());
  qs.reserve(terms.size());
  for (const auto& [p, q] : terms) {
    if (p.is_identity() || q.is_identity()) continue;
    ps.push_back(p.affine());
    qs.push_back(q.affine());
  }
  if (ps.empty()) return Gt::one();
  std::vector<const blst_p1_affine*> pp(ps.size());
  std::vector<const blst_p2_affine*> qp(qs.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    pp[i] = &ps[i];
    qp[i] = &qs[i];
  }
  blst_fp12 ml;
  blst_miller_loop_n(&ml, qp.data(), pp.data(), ps.size());
  blst_fp12 out;
  blst_final_exp(&out, &ml);
  return Gt::from_raw(out);
}

// Hash-to-curve (BLS12381G1_XMD:SHA-256_SSWU_RO_) with the tag as DST.
inline G1 hash_to_g1(std::string_view domain_tag, ByteView msg) {
  if (domain_tag.empty()) throw Error(ErrorKind::kInvalidArgument, "empty domain tag");
  blst_p1 out;
  blst_hash_to_g1(&out, msg.data(), msg.size(),
                  reinterpret_cast<const std::uint8_t*>(domain_tag.data()), domain_tag.size(),
                  nullptr, 0);
  return G1::from_raw(out);
}

// expand_message_xmd to 64 bytes, reduced mod q. A zero result is re-hashed
// with an incremented trailing counter byte.
inline Scalar hash_to_scalar(std::string_view domain_tag, ByteView msg) {
  if (domain_tag.empty()) throw Error(ErrorKind::kInvalidArgument, "empty domain tag");
  Bytes input(msg.begin(), msg.end());
  input.push_back(0);
  for (std::uint8_t counter = 0;; ++counter) {
    input.back() = counter;
    std::array<std::uint8_t, 64> wide{};
    blst_expand_message_xmd(wide.data(), wide.size(), input.data(), input.size(),
                            reinterpret_cast<const std::uint8_t*>(domain_tag.data()),
                            domain_tag.size());
    Scalar s = Scalar::from_wide(wide);
    if (!s.is_zero()) return s;
  }
}

}  // namespace dhabe
