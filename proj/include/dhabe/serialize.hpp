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

// Canonical binary envelope for every persistent object:
//
//   "DHV1" | object tag (u8) | curve id (u8) | u16 field count |
//   { field tag (u8) | u32 length | payload }*
//
// Field tags run 1..n in order. Decoding is strict: the bytes must be exactly
// what encoding the decoded value would produce.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "dhabe/bytes.hpp"
#include "dhabe/error.hpp"
#include "dhabe/scheme.hpp"
#include "dhabe/trust.hpp"

namespace dhabe {

enum class ObjectTag : std::uint8_t {
  kPublicParams = 0x01,
  kMasterKey = 0x02,
  kDAKey = 0x03,
  kUserKey = 0x04,
  kCiphertext = 0x05,
  kCredentialSet = 0x06,
  kAttributeMap = 0x07,
};

inline constexpr std::string_view kMagic = "DHV1";

inline std::string_view armor_label(ObjectTag tag) {
  switch (tag) {
    case ObjectTag::kPublicParams: return "PUBLIC PARAMS";
    case ObjectTag::kMasterKey: return "MASTER KEY";
    case ObjectTag::kDAKey: return "DA KEY";
    case ObjectTag::kUserKey: return "USER KEY";
    case ObjectTag::kCiphertext: return "CIPHERTEXT";
    case ObjectTag::kCredentialSet: return "CREDENTIALS";
    case ObjectTag::kAttributeMap: return "ATTRIBUTE MAP";
  }
  throw Error(ErrorKind::kFormat, "unknown object tag");
}

namespace serialize_detail {

class Envelope {
 public:
  Envelope(ObjectTag tag, std::uint8_t curve) {
    head_.raw(kMagic);
    head_.u8(static_cast<std::uint8_t>(tag));
    head_.u8(curve);
  }

  ByteWriter& field() {
    fields_.emplace_back();
    return fields_.back();
  }

  Bytes finish() && {
    head_.u16(static_cast<std::uint16_t>(fields_.size()));
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      head_.u8(static_cast<std::uint8_t>(i + 1));
      head_.blob(fields_[i].bytes());
    }
    return std::move(head_).take();
  }

 private:
  ByteWriter head_;
  std::vector<ByteWriter> fields_;
};

class Opened {
 public:
  Opened(ByteView data, ObjectTag want, std::uint16_t nfields) : r_(data) {
    ByteView magic = r_.raw(kMagic.size());
    if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw Error(ErrorKind::kFormat, "bad magic");
    std::uint8_t tag = r_.u8();
    if (tag != static_cast<std::uint8_t>(want)) {
      throw Error(ErrorKind::kFormat, "expected object tag " + std::to_string(static_cast<int>(want)) + ", got " +
                                          std::to_string(tag));
    }
    ctx_ = GroupContext::from_id(r_.u8());
    if (r_.u16() != nfields) throw Error(ErrorKind::kFormat, "unexpected field count");
    nfields_ = nfields;
  }

  ByteReader next() {
    std::uint8_t tag = r_.u8();
    if (tag != ++seen_ || seen_ > nfields_) throw Error(ErrorKind::kFormat, "unexpected field tag");
    return ByteReader(r_.blob());
  }

  void finish() const { r_.expect_end(); }
  const GroupContext& ctx() const { return ctx_; }

 private:
  ByteReader r_;
  GroupContext ctx_;
  std::uint16_t nfields_ = 0;
  std::uint8_t seen_ = 0;
};

template <class T>
T whole(ByteReader r, T (*decode)(ByteView)) {
  T v = decode(r.raw(r.remaining()));
  return v;
}

inline std::uint64_t read_u64(ByteReader r) {
  std::uint64_t v = r.u64();
  r.expect_end();
  return v;
}

inline std::string read_text(ByteReader r) {
  ByteView b = r.raw(r.remaining());
  return {b.begin(), b.end()};
}

inline Seed read_seed(ByteReader& r) {
  Seed s{};
  ByteView b = r.raw(s.size());
  std::copy(b.begin(), b.end(), s.begin());
  return s;
}

inline void write_path(ByteWriter& w, const IssuerPath& path) {
  w.u32(static_cast<std::uint32_t>(path.size()));
  for (const auto& label : path) w.blob(label);
}

inline IssuerPath read_path(ByteReader& r) {
  IssuerPath out(r.u32());
  for (auto& label : out) label = r.string();
  return out;
}

}  // namespace serialize_detail

inline Bytes serialize(const PublicParams& pp) {
  serialize_detail::Envelope e(ObjectTag::kPublicParams, pp.ctx.curve_id);
  e.field().raw(pp.a1.encode());
  e.field().raw(pp.a2.encode());
  e.field().raw(pp.y.encode());
  e.field().u64(pp.current_epoch);
  return std::move(e).finish();
}

inline Bytes serialize(const MasterKey& mk) {
  serialize_detail::Envelope e(ObjectTag::kMasterKey, kCurveBls12_381);
  e.field().raw(mk.alpha.encode());
  e.field().raw(mk.root_seed);
  ByteWriter& w = e.field();
  w.u32(static_cast<std::uint32_t>(mk.epoch_seeds.size()));
  for (const auto& [epoch, seed] : mk.epoch_seeds) {
    w.u64(epoch);
    w.raw(seed);
  }
  return std::move(e).finish();
}

inline Bytes serialize(const DAKey& da) {
  serialize_detail::Envelope e(ObjectTag::kDAKey, kCurveBls12_381);
  e.field().raw(da.z.encode());
  e.field().raw(da.tau.encode());
  e.field().raw(da.seed);
  serialize_detail::write_path(e.field(), da.path);
  e.field().u64(da.epoch);
  e.field().u8(da.forged ? 1 : 0);
  return std::move(e).finish();
}

inline Bytes serialize(const UserKey& key) {
  serialize_detail::Envelope e(ObjectTag::kUserKey, kCurveBls12_381);
  e.field().raw(key.user_id);
  e.field().u64(key.epoch);
  e.field().raw(key.k.encode());
  e.field().raw(key.l.encode());
  ByteWriter& comps = e.field();
  comps.u32(static_cast<std::uint32_t>(key.components.size()));
  for (const auto& [attr, point] : key.components) {
    comps.blob(attr);
    comps.raw(point.encode());
  }
  ByteWriter& paths = e.field();
  paths.u32(static_cast<std::uint32_t>(key.issuer_paths.size()));
  for (const auto& p : key.issuer_paths) serialize_detail::write_path(paths, p);
  return std::move(e).finish();
}

inline Bytes serialize(const Ciphertext& ct) {
  serialize_detail::Envelope e(ObjectTag::kCiphertext, kCurveBls12_381);
  e.field().raw(print_policy(ct.tree));
  e.field().u64(ct.epoch);
  e.field().raw(ct.c0.encode());
  ByteWriter& leaves = e.field();
  leaves.u32(static_cast<std::uint32_t>(ct.leaves.size()));
  for (const auto& leaf : ct.leaves) {
    leaves.raw(leaf.c.encode());
    leaves.raw(leaf.d.encode());
  }
  ByteWriter& dem = e.field();
  dem.u8(ct.dem.alg_id);
  dem.blob(ct.dem.nonce);
  dem.blob(ct.dem.body);
  return std::move(e).finish();
}

inline Bytes serialize(const CredentialSet& creds) {
  serialize_detail::Envelope e(ObjectTag::kCredentialSet, kCurveBls12_381);
  e.field().raw(print_credentials(creds));
  return std::move(e).finish();
}

inline Bytes serialize(const AttributeMap& map) {
  serialize_detail::Envelope e(ObjectTag::kAttributeMap, kCurveBls12_381);
  e.field().raw(print_attribute_map(map));
  return std::move(e).finish();
}

template <class T>
struct ObjectTraits;

template <>
struct ObjectTraits<PublicParams> {
  static constexpr ObjectTag kTag = ObjectTag::kPublicParams;
  static PublicParams decode(ByteView data) {
    using namespace serialize_detail;
    Opened o(data, kTag, 4);
    PublicParams pp;
    pp.ctx = o.ctx();
    pp.a1 = whole(o.next(), &G1::decode);
    pp.a2 = whole(o.next(), &G2::decode);
    pp.y = whole(o.next(), &Gt::decode);
    pp.current_epoch = read_u64(o.next());
    o.finish();
    return pp;
  }
};

template <>
struct ObjectTraits<MasterKey> {
  static constexpr ObjectTag kTag = ObjectTag::kMasterKey;
  static MasterKey decode(ByteView data) {
    using namespace serialize_detail;
    Opened o(data, kTag, 3);
    MasterKey mk;
    mk.alpha = whole(o.next(), &Scalar::decode);
    ByteReader seed = o.next();
    mk.root_seed = read_seed(seed);
    seed.expect_end();
    ByteReader r = o.next();
    for (std::uint32_t n = r.u32(); n > 0; --n) {
      std::uint64_t epoch = r.u64();
      mk.epoch_seeds[epoch] = read_seed(r);
    }
    r.expect_end();
    o.finish();
    return mk;
  }
};

template <>
struct ObjectTraits<DAKey> {
  static constexpr ObjectTag kTag = ObjectTag::kDAKey;
  static DAKey decode(ByteView data) {
    using namespace serialize_detail;
    Opened o(data, kTag, 6);
    DAKey da;
    da.z = whole(o.next(), &G2::decode);
    da.tau = whole(o.next(), &Scalar::decode);
    ByteReader seed = o.next();
    da.seed = read_seed(seed);
    seed.expect_end();
    ByteReader path = o.next();
    da.path = read_path(path);
    path.expect_end();
    da.epoch = read_u64(o.next());
    ByteReader flags = o.next();
    std::uint8_t f = flags.u8();
    flags.expect_end();
    if (f > 1) throw Error(ErrorKind::kFormat, "unknown DA key flags");
    da.forged = f == 1;
    o.finish();
    return da;
  }
};

template <>
struct ObjectTraits<UserKey> {
  static constexpr ObjectTag kTag = ObjectTag::kUserKey;
  static UserKey decode(ByteView data) {
    using namespace serialize_detail;
    Opened o(data, kTag, 6);
    UserKey key;
    key.user_id = read_text(o.next());
    key.epoch = read_u64(o.next());
    key.k = whole(o.next(), &G2::decode);
    key.l = whole(o.next(), &G2::decode);
    ByteReader comps = o.next();
    for (std::uint32_t n = comps.u32(); n > 0; --n) {
      std::string attr = comps.string();
      key.components[attr] = G1::decode(comps.raw(G1::kEncodedSize));
    }
    comps.expect_end();
    ByteReader paths = o.next();
    key.issuer_paths.resize(paths.u32());
    for (auto& p : key.issuer_paths) p = read_path(paths);
    paths.expect_end();
    o.finish();
    return key;
  }
};

template <>
struct ObjectTraits<Ciphertext> {
  static constexpr ObjectTag kTag = ObjectTag::kCiphertext;
  static Ciphertext decode(ByteView data) {
    using namespace serialize_detail;
    Opened o(data, kTag, 5);
    Ciphertext ct;
    try {
      ct.tree = parse_policy(read_text(o.next()));
    } catch (const Error& e) {
      throw Error(ErrorKind::kFormat, std::string("ciphertext policy: ") + e.what());
    }
    ct.epoch = read_u64(o.next());
    ct.c0 = whole(o.next(), &G1::decode);
    ByteReader leaves = o.next();
    ct.leaves.resize(leaves.u32());
    if (ct.leaves.size() != ct.tree.leaf_count()) throw Error(ErrorKind::kFormat, "leaf count mismatch");
    for (auto& leaf : ct.leaves) {
      leaf.c = G1::decode(leaves.raw(G1::kEncodedSize));
      leaf.d = G2::decode(leaves.raw(G2::kEncodedSize));
    }
    leaves.expect_end();
    ByteReader dem = o.next();
    ct.dem.alg_id = dem.u8();
    check_dem_alg(ct.dem.alg_id);
    ByteView nonce = dem.blob();
    ct.dem.nonce.assign(nonce.begin(), nonce.end());
    ByteView body = dem.blob();
    ct.dem.body.assign(body.begin(), body.end());
    dem.expect_end();
    o.finish();
    return ct;
  }
};

template <>
struct ObjectTraits<CredentialSet> {
  static constexpr ObjectTag kTag = ObjectTag::kCredentialSet;
  static CredentialSet decode(ByteView data) {
    serialize_detail::Opened o(data, kTag, 1);
    std::string text = serialize_detail::read_text(o.next());
    o.finish();
    try {
      return parse_credentials(text);
    } catch (const Error& e) {
      throw Error(ErrorKind::kFormat, std::string("credential set: ") + e.what());
    }
  }
};

template <>
struct ObjectTraits<AttributeMap> {
  static constexpr ObjectTag kTag = ObjectTag::kAttributeMap;
  static AttributeMap decode(ByteView data) {
    serialize_detail::Opened o(data, kTag, 1);
    std::string text = serialize_detail::read_text(o.next());
    o.finish();
    try {
      return parse_attribute_map(text);
    } catch (const Error& e) {
      throw Error(ErrorKind::kFormat, std::string("attribute map: ") + e.what());
    }
  }
};

// Object tag of an encoded envelope, without decoding the rest.
inline ObjectTag peek_tag(ByteView data) {
  ByteReader r(data);
  ByteView magic = r.raw(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw Error(ErrorKind::kFormat, "bad magic");
  std::uint8_t tag = r.u8();
  if (tag < 0x01 || tag > 0x07) throw Error(ErrorKind::kFormat, "unknown object tag " + std::to_string(tag));
  return static_cast<ObjectTag>(tag);
}

inline std::string armor(ByteView data) {
  std::string label(armor_label(peek_tag(data)));
  std::string b64 = base64_encode(data);
  std::string out = "-----BEGIN DHABE " + label + "-----\n";
  for (std::size_t i = 0; i < b64.size(); i += 64) out += b64.substr(i, 64) + "\n";
  out += "-----END DHABE " + label + "-----\n";
  return out;
}

inline bool is_armored(ByteView data) {
  constexpr std::string_view kBegin = "-----BEGIN DHABE ";
  std::size_t i = 0;
  while (i < data.size() && std::isspace(data[i])) ++i;
  return data.size() - i >= kBegin.size() && std::equal(kBegin.begin(), kBegin.end(), data.begin() + i);
}

inline Bytes dearmor(std::string_view text) {
  constexpr std::string_view kBegin = "-----BEGIN DHABE ";
  std::size_t b = text.find(kBegin);
  if (b == std::string_view::npos) throw Error(ErrorKind::kFormat, "missing armor header");
  std::size_t label_end = text.find("-----", b + kBegin.size());
  if (label_end == std::string_view::npos) throw Error(ErrorKind::kFormat, "bad armor header");
  std::string label(text.substr(b + kBegin.size(), label_end - b - kBegin.size()));
  std::string footer = "-----END DHABE " + label + "-----";
  std::size_t body_start = label_end + 5;
  std::size_t f = text.find(footer, body_start);
  if (f == std::string_view::npos) throw Error(ErrorKind::kFormat, "missing armor footer");
  std::string b64;
  for (char c : text.substr(body_start, f - body_start)) {
    if (!std::isspace(static_cast<unsigned char>(c))) b64 += c;
  }
  for (char c : text.substr(f + footer.size())) {
    if (!std::isspace(static_cast<unsigned char>(c))) throw Error(ErrorKind::kFormat, "data after armor footer");
  }
  Bytes out = base64_decode(b64);
  if (armor_label(peek_tag(out)) != label) throw Error(ErrorKind::kFormat, "armor label does not match object");
  return out;
}

// Accepts either the binary or the armored form.
inline Bytes unwrap(ByteView data) {
  if (!is_armored(data)) return Bytes(data.begin(), data.end());
  return dearmor(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

template <class T>
T deserialize(ByteView data) {
  Bytes bin = unwrap(data);
  T out = ObjectTraits<T>::decode(bin);
  if (serialize(out) != bin) throw Error(ErrorKind::kFormat, "non-canonical encoding");
  return out;
}

inline Digest object_digest(const auto& obj) { return sha256(serialize(obj)); }

}  // namespace dhabe
