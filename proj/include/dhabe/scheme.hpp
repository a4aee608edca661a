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

// Dynamic hierarchical ciphertext-policy ABE for virtual organizations.
//
// Public parameters: A1 = g1^a, A2 = g2^a, Y = e(g1, g2)^alpha.
//
// A domain authority (DA) holds Z = g2^(alpha + a*tau) together with tau and
// the epoch seed kappa_e. Delegation adds a fresh delta to tau, so every DA of
// one setup unblinds to the same g2^alpha. Because tau is held in the clear a
// DA can also mint an indistinguishable sibling (rerandomize) and anyone
// holding a DA key can extract g2^alpha (recover_master_witness); both are
// exposed deliberately and marked as such.
//
// A user key binds an exponent t_u = PRF(kappa_e, epoch, user) that every DA
// of the epoch derives identically:
//   K = g2^(alpha + a*t_u),  L = g2^t_u,  K_x = H(x || epoch)^t_u.
// Shards from different DAs therefore agree on K and L and can be merged;
// shards of different users cannot.
//
// A ciphertext under tree F carries C0 = g1^s and, per leaf y with share
// lambda_y, C_y = A1^lambda_y * H(att(y) || epoch)^-r_y and D_y = g2^r_y.
// e(C_y, L) * e(K_x, D_y) = e(g1, g2)^(a*t_u*lambda_y), which recombines to
// e(g1, g2)^(a*t_u*s), and e(C0, K) divided by that yields Y^s, the KEM secret.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dhabe/bytes.hpp"
#include "dhabe/dem.hpp"
#include "dhabe/error.hpp"
#include "dhabe/group.hpp"
#include "dhabe/policy.hpp"
#include "dhabe/rng.hpp"

namespace dhabe {

inline constexpr std::string_view kPrfTag = "DHABE:PRF";
inline constexpr std::string_view kAttrTag = "DHABE:ATTR";
inline constexpr std::string_view kKemTag = "DHABE:KEM";
inline constexpr std::string_view kRootLabel = "root";

using Seed = std::array<std::uint8_t, 32>;
using IssuerPath = std::vector<std::string>;

struct PublicParams {
  GroupContext ctx;
  G1 a1;
  G2 a2;
  Gt y;
  std::uint64_t current_epoch = 0;

  // e(A1, g2) = e(g1, A2)
  bool consistent() const {
    std::pair<G1, G2> terms[] = {{a1, ctx.g2()}, {-ctx.g1(), a2}};
    return multi_pair(terms).is_one();
  }

  friend bool operator==(const PublicParams&, const PublicParams&) = default;
};

struct MasterKey {
  Scalar alpha;
  Seed root_seed{};                       // the epoch-0 seed
  std::map<std::uint64_t, Seed> epoch_seeds;

  friend bool operator==(const MasterKey&, const MasterKey&) = default;
};

struct DAKey {
  G2 z;
  Scalar tau;
  Seed seed{};
  IssuerPath path;
  std::uint64_t epoch = 0;
  // Set on keys produced by rerandomize and on anything delegated from them.
  bool forged = false;

  std::size_t depth() const { return path.size(); }

  friend bool operator==(const DAKey&, const DAKey&) = default;
};

// A shard is a user key with a single issuer path; merging concatenates paths.
struct UserKey {
  std::string user_id;
  std::uint64_t epoch = 0;
  G2 k;
  G2 l;
  std::map<std::string, G1> components;
  std::vector<IssuerPath> issuer_paths;

  AttributeSet attributes() const {
    AttributeSet out;
    for (const auto& [attr, _] : components) out.insert(attr);
    return out;
  }

  friend bool operator==(const UserKey&, const UserKey&) = default;
};
using UserKeyShard = UserKey;

struct LeafComponent {
  G1 c;
  G2 d;

  friend bool operator==(const LeafComponent&, const LeafComponent&) = default;
};

struct Ciphertext {
  PolicyTree tree{PolicyNode::leaf("_")};
  std::uint64_t epoch = 0;
  G1 c0;
  std::vector<LeafComponent> leaves;  // indexed by leaf_index
  DemBlob dem;

  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

struct MasterWitness {
  G2 w;

  friend bool operator==(const MasterWitness&, const MasterWitness&) = default;
};

inline std::string format_path(const IssuerPath& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '/';
    out += path[i];
  }
  return out;
}

inline IssuerPath parse_path(std::string_view text) {
  IssuerPath out;
  std::size_t start = 0;
  for (;;) {
    std::size_t end = text.find('/', start);
    std::string_view label = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (label.empty()) throw Error(ErrorKind::kInvalidArgument, "empty label in path '" + std::string(text) + "'");
    out.emplace_back(label);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

inline void validate_label(std::string_view label) {
  if (label.empty()) throw Error(ErrorKind::kInvalidArgument, "empty hierarchy label");
  if (label.find('/') != std::string_view::npos) {
    throw Error(ErrorKind::kInvalidArgument, "hierarchy label contains '/'");
  }
}

namespace scheme_detail {

inline Bytes epoch_suffixed(std::string_view text, std::uint64_t epoch) {
  ByteWriter w;
  w.raw(text);
  w.u64(epoch);
  return std::move(w).take();
}

inline Scalar user_exponent(const Seed& seed, std::uint64_t epoch, std::string_view user_id) {
  ByteWriter w;
  w.raw(seed);
  w.u64(epoch);
  w.raw(user_id);
  return hash_to_scalar(kPrfTag, w.bytes());
}

inline DAKey shift(const PublicParams& pp, const DAKey& da, Rng& rng) {
  Scalar delta = Scalar::random(rng);
  DAKey out = da;
  out.z = da.z + pp.a2 * delta;
  out.tau = da.tau + delta;
  return out;
}

}  // namespace scheme_detail

inline G1 attribute_point(std::string_view attribute, std::uint64_t epoch) {
  return hash_to_g1(kAttrTag, scheme_detail::epoch_suffixed(attribute, epoch));
}

// Bytes bound into the DEM key and used as AEAD associated data.
inline Bytes ciphertext_header(const PolicyTree& tree, std::uint64_t epoch, const G1& c0) {
  ByteWriter w;
  w.blob(print_policy(tree));
  w.u64(epoch);
  w.raw(c0.encode());
  return std::move(w).take();
}

struct SetupResult {
  PublicParams pp;
  MasterKey mk;
  DAKey root;
};

inline SetupResult setup(Rng& rng, const GroupContext& ctx = GroupContext::bls12_381()) {
  Scalar alpha = Scalar::random(rng);
  Scalar a = Scalar::random(rng);
  Scalar tau = Scalar::random(rng);
  Seed seed = rng.bytes<32>();

  SetupResult out;
  out.pp = PublicParams{ctx, ctx.g1() * a, ctx.g2() * a, pair(ctx.g1() * alpha, ctx.g2()), 0};
  out.mk.alpha = alpha;
  out.mk.root_seed = seed;
  out.mk.epoch_seeds[0] = seed;
  out.root = DAKey{ctx.g2() * alpha + out.pp.a2 * tau, tau, seed, {std::string(kRootLabel)}, 0, false};
  return out;
}

inline DAKey delegate(const PublicParams& pp, const DAKey& parent, std::string_view child_label, Rng& rng) {
  validate_label(child_label);
  DAKey child = scheme_detail::shift(pp, parent, rng);
  child.path.emplace_back(child_label);
  return child;
}

// Mints a same-depth sibling that is indistinguishable from `da` as an
// issuer. The returned key is flagged `forged`.
inline DAKey rerandomize(const PublicParams& pp, const DAKey& da, const IssuerPath& forged_path, Rng& rng) {
  if (forged_path.size() != da.depth()) {
    throw Error(ErrorKind::kInvalidArgument, "forged path must keep the depth of the source DA");
  }
  for (const auto& label : forged_path) validate_label(label);
  DAKey sibling = scheme_detail::shift(pp, da, rng);
  sibling.path = forged_path;
  sibling.forged = true;
  return sibling;
}

inline MasterWitness recover_master_witness(const PublicParams& pp, const DAKey& da) {
  return MasterWitness{da.z - pp.a2 * da.tau};
}

inline UserKeyShard issue_user_key(const PublicParams& pp, const DAKey& da, std::string_view user_id,
                                   const AttributeSet& attributes) {
  if (attributes.empty()) throw Error(ErrorKind::kEmptyAttributes, "no attributes requested");
  if (user_id.empty()) throw Error(ErrorKind::kInvalidArgument, "empty user id");
  if (da.epoch != pp.current_epoch) {
    throw Error(ErrorKind::kEpochMismatch, "DA key is for epoch " + std::to_string(da.epoch) +
                                               ", current epoch is " + std::to_string(pp.current_epoch));
  }
  for (const auto& a : attributes) validate_attribute(a);

  Scalar t = scheme_detail::user_exponent(da.seed, da.epoch, user_id);
  UserKeyShard shard;
  shard.user_id = std::string(user_id);
  shard.epoch = da.epoch;
  shard.k = da.z + pp.a2 * (t - da.tau);
  shard.l = pp.ctx.g2() * t;
  for (const auto& a : attributes) shard.components.emplace(a, attribute_point(a, da.epoch) * t);
  shard.issuer_paths.push_back(da.path);
  return shard;
}

// e(g1, K) = Y * e(A1, L)
inline bool is_well_formed(const PublicParams& pp, const UserKey& key) {
  std::pair<G1, G2> terms[] = {{pp.ctx.g1(), key.k}, {-pp.a1, key.l}};
  return multi_pair(terms) == pp.y;
}

inline UserKey merge_shards(std::span<const UserKeyShard> shards) {
  if (shards.empty()) throw Error(ErrorKind::kInvalidArgument, "nothing to merge");
  UserKey out = shards.front();
  for (std::size_t i = 1; i < shards.size(); ++i) {
    const UserKeyShard& s = shards[i];
    if (s.user_id != out.user_id) {
      throw Error(ErrorKind::kMergeRefused, "shards belong to '" + out.user_id + "' and '" + s.user_id + "'");
    }
    if (s.epoch != out.epoch) throw Error(ErrorKind::kMergeRefused, "shards from different epochs");
    if (!(s.k == out.k) || !(s.l == out.l)) {
      throw Error(ErrorKind::kMergeRefused, "shards disagree on the user binding (K, L)");
    }
    for (const auto& [attr, point] : s.components) out.components.insert_or_assign(attr, point);
    out.issuer_paths.insert(out.issuer_paths.end(), s.issuer_paths.begin(), s.issuer_paths.end());
  }
  return out;
}

inline Ciphertext encrypt(const PublicParams& pp, const PolicyTree& tree, ByteView plaintext, Rng& rng) {
  Scalar s = Scalar::random(rng);
  SharePlan shares = assign_shares(tree, s, rng);

  Ciphertext ct;
  ct.tree = tree;
  ct.epoch = pp.current_epoch;
  ct.c0 = pp.ctx.g1() * s;
  ct.leaves.reserve(tree.leaf_count());
  for (const PolicyNode* leaf : tree.leaves()) {
    Scalar r = Scalar::random(rng);
    G1 h = attribute_point(leaf->attribute, ct.epoch);
    const Scalar& lambda = shares.leaf_shares[static_cast<std::size_t>(leaf->leaf_index)];
    ct.leaves.push_back({pp.a1 * lambda - h * r, pp.ctx.g2() * r});
  }

  Bytes header = ciphertext_header(ct.tree, ct.epoch, ct.c0);
  ByteWriter ikm;
  ikm.raw(pp.y.pow(s).encode());
  ikm.raw(header);
  ct.dem = dem_seal(hkdf_sha256(kKemTag, ikm.bytes()), plaintext, header, rng);
  return ct;
}

// Recovers the KEM secret Y^s from a key whose attributes satisfy the tree.
// Coefficients are folded into the G1 side so the whole computation is one
// multi-pairing.
inline Gt recover_kem_secret(const UserKey& key, const Ciphertext& ct) {
  if (key.epoch != ct.epoch) {
    throw Error(ErrorKind::kEpochMismatch, "key is for epoch " + std::to_string(key.epoch) +
                                               ", ciphertext for epoch " + std::to_string(ct.epoch));
  }
  if (ct.leaves.size() != ct.tree.leaf_count()) {
    throw Error(ErrorKind::kFormat, "ciphertext leaf count does not match its policy");
  }
  SatisfyingPlan plan = satisfying_plan(ct.tree, key.attributes());

  std::vector<std::pair<G1, G2>> terms;
  terms.emplace_back(ct.c0, key.k);
  for (const auto& w : plan.leaf_weights()) {
    const LeafComponent& leaf = ct.leaves[static_cast<std::size_t>(w.leaf_index)];
    const G1& kx = key.components.at(w.attribute);
    Scalar neg = -w.weight;
    terms.emplace_back(leaf.c * neg, key.l);
    terms.emplace_back(kx * neg, leaf.d);
  }
  return multi_pair(terms);
}

inline Bytes decrypt([[maybe_unused]] const PublicParams& pp, const UserKey& key, const Ciphertext& ct) {
  Gt kem = recover_kem_secret(key, ct);
  Bytes header = ciphertext_header(ct.tree, ct.epoch, ct.c0);
  ByteWriter ikm;
  ikm.raw(kem.encode());
  ikm.raw(header);
  return dem_open(hkdf_sha256(kKemTag, ikm.bytes()), ct.dem, header);
}

struct RekeyResult {
  PublicParams pp;
  DAKey root;
};

// Starts epoch e+1 with a fresh seed. alpha and Y are unchanged, so
// artifacts of earlier epochs keep working among themselves.
inline RekeyResult epoch_rekey(MasterKey& mk, const PublicParams& pp, Rng& rng) {
  if (!(pair(pp.ctx.g1() * mk.alpha, pp.ctx.g2()) == pp.y)) {
    throw Error(ErrorKind::kInvalidArgument, "master key does not match public parameters");
  }
  std::uint64_t next = pp.current_epoch + 1;
  Seed seed = rng.bytes<32>();
  mk.epoch_seeds[next] = seed;
  Scalar tau = Scalar::random(rng);

  RekeyResult out;
  out.pp = pp;
  out.pp.current_epoch = next;
  out.root = DAKey{pp.ctx.g2() * mk.alpha + pp.a2 * tau, tau, seed, {std::string(kRootLabel)}, next, false};
  return out;
}

}  // namespace dhabe
