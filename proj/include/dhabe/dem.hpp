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

// Data encapsulation: HKDF-SHA256 key derivation and AES-256-GCM.

#pragma once

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/kdf.h>

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string_view>

#include "dhabe/bytes.hpp"
#include "dhabe/error.hpp"
#include "dhabe/rng.hpp"

namespace dhabe {

// Registry of authenticated ciphers; unknown ids are a format error.
inline constexpr std::uint8_t kDemAes256Gcm = 0x01;

using DemKey = std::array<std::uint8_t, 32>;

struct DemBlob {
  std::uint8_t alg_id = kDemAes256Gcm;
  Bytes nonce;
  Bytes body;  // ciphertext followed by the 16-byte tag

  friend bool operator==(const DemBlob&, const DemBlob&) = default;
};

inline void check_dem_alg(std::uint8_t alg_id) {
  if (alg_id != kDemAes256Gcm) {
    throw Error(ErrorKind::kFormat, "unknown DEM algorithm id " + std::to_string(alg_id));
  }
}

// HKDF-SHA256 with `salt` over `ikm`, empty info.
inline DemKey hkdf_sha256(std::string_view salt, ByteView ikm) {
  std::unique_ptr<EVP_KDF, decltype(&EVP_KDF_free)> kdf(EVP_KDF_fetch(nullptr, "HKDF", nullptr),
                                                        &EVP_KDF_free);
  std::unique_ptr<EVP_KDF_CTX, decltype(&EVP_KDF_CTX_free)> ctx(
      kdf ? EVP_KDF_CTX_new(kdf.get()) : nullptr, &EVP_KDF_CTX_free);
  if (!ctx) throw std::runtime_error("HKDF unavailable");
  char digest[] = "SHA256";
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_KDF_PARAM_DIGEST, digest, 0),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_KEY, const_cast<std::uint8_t*>(ikm.data()),
                                        ikm.size()),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_SALT, const_cast<char*>(salt.data()),
                                        salt.size()),
      OSSL_PARAM_construct_end(),
  };
  DemKey out{};
  if (EVP_KDF_derive(ctx.get(), out.data(), out.size(), params) != 1) {
    throw std::runtime_error("HKDF derive failed");
  }
  return out;
}

namespace dem_detail {

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

constexpr std::size_t kNonceSize = 12;
constexpr std::size_t kTagSize = 16;

}  // namespace dem_detail

inline DemBlob dem_seal(const DemKey& key, ByteView plaintext, ByteView aad, Rng& rng) {
  using namespace dem_detail;
  DemBlob blob;
  blob.nonce.resize(kNonceSize);
  rng.fill(blob.nonce);
  blob.body.resize(plaintext.size() + kTagSize);

  CipherCtx ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  int len = 0;
  bool ok = ctx && EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), blob.nonce.data()) == 1 &&
            EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1 &&
            EVP_EncryptUpdate(ctx.get(), blob.body.data(), &len, plaintext.data(),
                              static_cast<int>(plaintext.size())) == 1 &&
            EVP_EncryptFinal_ex(ctx.get(), blob.body.data() + len, &len) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagSize,
                                blob.body.data() + plaintext.size()) == 1;
  if (!ok) throw std::runtime_error("AES-GCM encryption failed");
  return blob;
}

// Throws kAuthenticationFailed on any tag mismatch.
inline Bytes dem_open(const DemKey& key, const DemBlob& blob, ByteView aad) {
  using namespace dem_detail;
  check_dem_alg(blob.alg_id);
  if (blob.nonce.size() != kNonceSize) throw Error(ErrorKind::kFormat, "bad DEM nonce length");
  if (blob.body.size() < kTagSize) throw Error(ErrorKind::kFormat, "DEM body shorter than tag");
  std::size_t n = blob.body.size() - kTagSize;
  Bytes out(n);
  Bytes tag(blob.body.end() - kTagSize, blob.body.end());

  CipherCtx ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  int len = 0;
  bool ok = ctx && EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), blob.nonce.data()) == 1 &&
            EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1 &&
            EVP_DecryptUpdate(ctx.get(), out.data(), &len, blob.body.data(), static_cast<int>(n)) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagSize, tag.data()) == 1;
  if (!ok) throw std::runtime_error("AES-GCM setup failed");
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &len) != 1) {
    throw Error(ErrorKind::kAuthenticationFailed, "DEM tag mismatch");
  }
  return out;
}

}  // namespace dhabe
