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

#pragma once

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "dhabe/bytes.hpp"

namespace dhabe {

// Source of randomness for key generation and encryption. Instances are not
// shared between threads.
class Rng {
 public:
  virtual ~Rng() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  template <std::size_t N>
  std::array<std::uint8_t, N> bytes() {
    std::array<std::uint8_t, N> out{};
    fill(out);
    return out;
  }

  std::uint64_t next_u64() {
    auto b = bytes<8>();
    std::uint64_t v = 0;
    for (auto x : b) v = (v << 8) | x;
    return v;
  }

  // Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t uniform(std::uint64_t bound) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      std::uint64_t v = next_u64();
      if (v < limit) return v % bound;
    }
  }
};

// Operating-system randomness via OpenSSL's DRBG.
class SystemRng final : public Rng {
 public:
  void fill(std::span<std::uint8_t> out) override {
    if (out.empty()) return;
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
      throw std::runtime_error("RAND_bytes failed");
    }
  }
};

// ChaCha20 keystream keyed by SHA-256 of a 64-bit seed. Reproducible across
// runs and platforms; used by the scenario harness and by tests.
class SeededRng final : public Rng {
 public:
  explicit SeededRng(std::uint64_t seed) : ctx_(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free) {
    ByteWriter w;
    w.raw(std::string_view("dhabe/seeded-rng/v1"));
    w.u64(seed);
    Digest key = sha256(w.bytes());
    std::array<std::uint8_t, 16> iv{};
    if (!ctx_ || EVP_EncryptInit_ex(ctx_.get(), EVP_chacha20(), nullptr, key.data(), iv.data()) != 1) {
      throw std::runtime_error("chacha20 init failed");
    }
  }

  void fill(std::span<std::uint8_t> out) override {
    std::fill(out.begin(), out.end(), std::uint8_t{0});
    std::size_t done = 0;
    while (done < out.size()) {
      int chunk = static_cast<int>(std::min<std::size_t>(out.size() - done, 1 << 20));
      int written = 0;
      if (EVP_EncryptUpdate(ctx_.get(), out.data() + done, &written, out.data() + done, chunk) != 1) {
        throw std::runtime_error("chacha20 keystream failed");
      }
      done += static_cast<std::size_t>(written);
    }
  }

 private:
  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx_;
};

}  // namespace dhabe
