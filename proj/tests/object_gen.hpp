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

// Random instances of every serializable object.

#pragma once

#include <random>

#include "dhabe/scheme.hpp"
#include "dhabe/trust.hpp"
#include "test_support.hpp"
#include "trust_oracle.hpp"

namespace dhabe::testing {

struct ObjectGen {
  std::mt19937_64 g;
  SeededRng rng;
  SetupResult vo;

  explicit ObjectGen(std::uint64_t seed) : g(seed), rng(seed ^ 0x5eed), vo(setup(rng)) {}

  std::string label() { return "L" + std::to_string(g() % 1000); }

  DAKey da() {
    DAKey k = vo.root;
    for (std::size_t d = g() % 4; d > 0; --d) k = delegate(vo.pp, k, label(), rng);
    if (k.depth() > 0 && g() % 3 == 0) {
      IssuerPath p = k.path;
      p.back() = "forged" + std::to_string(g() % 10);
      k = rerandomize(vo.pp, k, p, rng);
    }
    return k;
  }

  AttributeSet attrs() {
    AttributeSet out;
    auto pool = attribute_pool(8);
    for (std::size_t n = 1 + g() % 4; n > 0; --n) out.insert(pool[g() % pool.size()]);
    return out;
  }

  PublicParams public_params() { return setup(rng).pp; }

  MasterKey master_key() {
    SetupResult s = setup(rng);
    PublicParams pp = s.pp;
    for (std::size_t n = g() % 3; n > 0; --n) pp = epoch_rekey(s.mk, pp, rng).pp;
    return s.mk;
  }

  UserKey user_key() {
    std::string user = "user" + std::to_string(g() % 50);
    std::vector<UserKeyShard> shards;
    for (std::size_t n = 1 + g() % 3; n > 0; --n) shards.push_back(issue_user_key(vo.pp, da(), user, attrs()));
    return merge_shards(shards);
  }

  Ciphertext ciphertext() {
    PolicyTree tree = random_tree(g, attribute_pool(8), TreeShape{});
    Bytes pt(g() % 64);
    for (auto& b : pt) b = static_cast<std::uint8_t>(g());
    return encrypt(vo.pp, tree, pt, rng);
  }

  CredentialSet credentials() { return random_credentials(g); }

  AttributeMap attribute_map() {
    AttributeMap m;
    const auto& ps = small_principals();
    const auto& rs = small_role_names();
    for (std::size_t n = g() % 5; n > 0; --n) {
      AttributeSet a = attrs();
      m.entries.push_back(AttributeGrant{Role{ps[g() % ps.size()], rs[g() % rs.size()]},
                                         std::vector<std::string>(a.begin(), a.end()), label()});
    }
    return m;
  }
};

}  // namespace dhabe::testing
