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

// The `dhabe` command-line tool. Exit codes:
//   0 success, 1 usage, 2 cryptographic failure, 3 trust-management denial,
//   4 format or serialization error.

#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dhabe/error.hpp"
#include "dhabe/harness.hpp"
#include "dhabe/rng.hpp"
#include "dhabe/scheme.hpp"
#include "dhabe/serialize.hpp"
#include "dhabe/trust.hpp"

namespace dhabe::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kCryptoFailure = 2,
  kTrustDenied = 3,
  kFormatError = 4,
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kPolicyNotSatisfied:
    case ErrorKind::kAuthenticationFailed:
    case ErrorKind::kEpochMismatch:
    case ErrorKind::kMergeRefused:
      return kCryptoFailure;
    case ErrorKind::kTrustDenied:
      return kTrustDenied;
    case ErrorKind::kFormat:
    case ErrorKind::kSyntax:
    case ErrorKind::kUndefinedLabel:
      return kFormatError;
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kThreshold:
    case ErrorKind::kEmptyAttributes:
      return kUsage;
  }
  return kUsage;
}

namespace detail {

// Unreadable or unwritable paths are usage errors, not format errors.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

inline std::string read_text(const std::string& path) {
  Bytes b = read_file(path);
  return {b.begin(), b.end()};
}

inline void write_file(const std::string& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()))) {
    throw IoError("cannot write " + path);
  }
}

template <class T>
T load(const std::string& path) {
  return deserialize<T>(read_file(path));
}

inline bool looks_serialized(ByteView data) {
  return is_armored(data) || (data.size() >= kMagic.size() && std::equal(kMagic.begin(), kMagic.end(), data.begin()));
}

// Credentials and attribute maps may be given as plain text or serialized.
inline CredentialSet load_credentials(const std::string& path) {
  Bytes data = read_file(path);
  if (looks_serialized(data)) return deserialize<CredentialSet>(data);
  return parse_credentials(std::string(data.begin(), data.end()));
}

inline AttributeMap load_attribute_map(const std::string& path) {
  Bytes data = read_file(path);
  if (looks_serialized(data)) return deserialize<AttributeMap>(data);
  return parse_attribute_map(std::string(data.begin(), data.end()));
}

struct Globals {
  bool armor = false;
  std::optional<std::uint64_t> seed;

  std::unique_ptr<Rng> rng() const {
    if (seed) return std::make_unique<SeededRng>(*seed);
    return std::make_unique<SystemRng>();
  }

  template <class T>
  void save(const std::string& path, const T& obj, std::ostream& out) const {
    Bytes bin = serialize(obj);
    if (armor) {
      std::string text = dhabe::armor(bin);
      write_file(path, as_bytes(text));
    } else {
      write_file(path, bin);
    }
    out << armor_label(peek_tag(bin)) << " " << path << " sha256:" << to_hex(sha256(bin)) << "\n";
  }
};

inline AttributeSet attribute_args(const std::vector<std::string>& raw) {
  AttributeSet out;
  for (const auto& item : raw) {
    for (const auto& a : parse_attribute_list(item)) out.insert(a);
  }
  return out;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Dynamic hierarchical attribute-based encryption", "dhabe"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--armor", g.armor, "Write objects in armored base64 form");
  app.add_option("--seed", g.seed, "Seed a deterministic generator (testing only)");

  std::string pp_path, mk_path, root_path, da_path, out_path, key_path, ct_path, in_path;
  std::string label, path_text, user, policy, message, creds_path, amap_path, role_text, principal;
  std::string out_pp, out_root, out_mk, scenario;
  std::vector<std::string> attrs, shards;
  bool force = false;

  CLI::App* setup_cmd = app.add_subcommand("setup", "Create a virtual organization");
  setup_cmd->add_option("--pp", pp_path, "Public parameters output")->required();
  setup_cmd->add_option("--mk", mk_path, "Master key output")->required();
  setup_cmd->add_option("--root", root_path, "Root DA key output")->required();

  CLI::App* delegate_cmd = app.add_subcommand("delegate", "Derive a child domain authority");
  delegate_cmd->add_option("--pp", pp_path)->required();
  delegate_cmd->add_option("--parent", da_path, "Parent DA key")->required();
  delegate_cmd->add_option("--label", label, "Child label")->required();
  delegate_cmd->add_option("--out", out_path)->required();

  CLI::App* rerand_cmd = app.add_subcommand("rerand", "Forge a same-depth sibling of a DA key");
  rerand_cmd->add_option("--pp", pp_path)->required();
  rerand_cmd->add_option("--da", da_path)->required();
  rerand_cmd->add_option("--path", path_text, "Path claimed by the forged key, e.g. root/hospA")->required();
  rerand_cmd->add_option("--out", out_path)->required();

  CLI::App* issue_cmd = app.add_subcommand("issue", "Issue a user key shard");
  issue_cmd->add_option("--pp", pp_path)->required();
  issue_cmd->add_option("--da", da_path)->required();
  issue_cmd->add_option("--user", user)->required();
  issue_cmd->add_option("--attrs", attrs, "Comma-separated attributes")->required();
  issue_cmd->add_option("--creds", creds_path, "Credential file");
  issue_cmd->add_option("--attr-map", amap_path, "Attribute map file");
  issue_cmd->add_flag("--force", force, "Skip the trust-management check");
  issue_cmd->add_option("--out", out_path)->required();

  CLI::App* merge_cmd = app.add_subcommand("merge", "Merge key shards of one user");
  merge_cmd->add_option("--out", out_path)->required();
  merge_cmd->add_option("shards", shards, "Shard files")->required();

  CLI::App* encrypt_cmd = app.add_subcommand("encrypt", "Encrypt under a policy");
  encrypt_cmd->add_option("--pp", pp_path)->required();
  encrypt_cmd->add_option("--policy", policy)->required();
  auto* in_opt = encrypt_cmd->add_option("--in", in_path, "Plaintext file");
  encrypt_cmd->add_option("--message", message, "Plaintext given inline")->excludes(in_opt);
  encrypt_cmd->add_option("--out", out_path)->required();

  CLI::App* decrypt_cmd = app.add_subcommand("decrypt", "Decrypt a ciphertext");
  decrypt_cmd->add_option("--pp", pp_path)->required();
  decrypt_cmd->add_option("--key", key_path)->required();
  decrypt_cmd->add_option("--ct", ct_path)->required();
  decrypt_cmd->add_option("--out", out_path, "Plaintext output (default stdout)");

  CLI::App* bump_cmd = app.add_subcommand("epoch-bump", "Start a new epoch");
  bump_cmd->add_option("--pp", pp_path)->required();
  bump_cmd->add_option("--mk", mk_path)->required();
  bump_cmd->add_option("--out-pp", out_pp)->required();
  bump_cmd->add_option("--out-root", out_root)->required();
  bump_cmd->add_option("--out-mk", out_mk, "Updated master key (default: overwrite --mk)");

  CLI::App* tm_cmd = app.add_subcommand("tm", "Trust-management queries");
  tm_cmd->require_subcommand(1);
  CLI::App* tm_eval = tm_cmd->add_subcommand("eval", "Evaluate role membership or issuable attributes");
  tm_eval->add_option("--creds", creds_path)->required();
  tm_eval->add_option("--role", role_text, "Print the members of P.r");
  tm_eval->add_option("--attr-map", amap_path);
  tm_eval->add_option("--principal", principal);
  tm_eval->add_option("--path", path_text, "Issuer path, e.g. root/hospA");

  CLI::App* witness_cmd = app.add_subcommand("witness", "Recover g2^alpha from any DA key");
  witness_cmd->add_option("--pp", pp_path)->required();
  witness_cmd->add_option("--da", da_path)->required();

  CLI::App* demo_cmd = app.add_subcommand("demo", "Run a scenario file, or the built-in 'healthcare'");
  demo_cmd->add_option("scenario", scenario)->required();

  std::vector<const char*> argv{"dhabe"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*setup_cmd) {
      auto rng = g.rng();
      SetupResult vo = setup(*rng);
      g.save(pp_path, vo.pp, out);
      g.save(mk_path, vo.mk, out);
      g.save(root_path, vo.root, out);
    } else if (*delegate_cmd) {
      auto rng = g.rng();
      PublicParams pp = load<PublicParams>(pp_path);
      g.save(out_path, delegate(pp, load<DAKey>(da_path), label, *rng), out);
    } else if (*rerand_cmd) {
      auto rng = g.rng();
      PublicParams pp = load<PublicParams>(pp_path);
      DAKey src = load<DAKey>(da_path);
      DAKey forged = rerandomize(pp, src, parse_path(path_text), *rng);
      err << "FLAW-DEMO: forged a DA key for " << format_path(forged.path)
          << " without the parent; its issued keys are indistinguishable from " << format_path(src.path) << "\n";
      g.save(out_path, forged, out);
    } else if (*issue_cmd) {
      PublicParams pp = load<PublicParams>(pp_path);
      DAKey da = load<DAKey>(da_path);
      AttributeSet wanted = attribute_args(attrs);
      if (force) {
        err << "warning: --force skips the trust-management check\n";
      } else {
        if (creds_path.empty() || amap_path.empty()) {
          err << "issue: --creds and --attr-map are required unless --force is given\n";
          return kUsage;
        }
        check_issuance(load_credentials(creds_path), load_attribute_map(amap_path), user, da.path, wanted);
      }
      g.save(out_path, issue_user_key(pp, da, user, wanted), out);
    } else if (*merge_cmd) {
      std::vector<UserKeyShard> parts;
      for (const auto& s : shards) parts.push_back(load<UserKey>(s));
      g.save(out_path, merge_shards(parts), out);
    } else if (*encrypt_cmd) {
      auto rng = g.rng();
      PublicParams pp = load<PublicParams>(pp_path);
      Bytes pt = in_path.empty() ? Bytes(message.begin(), message.end()) : read_file(in_path);
      g.save(out_path, encrypt(pp, parse_policy(policy), pt, *rng), out);
    } else if (*decrypt_cmd) {
      PublicParams pp = load<PublicParams>(pp_path);
      Bytes pt = decrypt(pp, load<UserKey>(key_path), load<Ciphertext>(ct_path));
      if (out_path.empty()) {
        out.write(reinterpret_cast<const char*>(pt.data()), static_cast<std::streamsize>(pt.size()));
      } else {
        write_file(out_path, pt);
      }
    } else if (*bump_cmd) {
      auto rng = g.rng();
      PublicParams pp = load<PublicParams>(pp_path);
      MasterKey mk = load<MasterKey>(mk_path);
      RekeyResult next = epoch_rekey(mk, pp, *rng);
      g.save(out_pp, next.pp, out);
      g.save(out_root, next.root, out);
      g.save(out_mk.empty() ? mk_path : out_mk, mk, out);
    } else if (*tm_eval) {
      CredentialSet creds = load_credentials(creds_path);
      if (!role_text.empty()) {
        std::size_t dot = role_text.find('.');
        Role role{role_text.substr(0, dot), dot == std::string::npos ? "" : role_text.substr(dot + 1)};
        if (!is_valid_principal(role.principal) || !is_valid_role_name(role.name)) {
          err << "tm eval: --role must look like Principal.role\n";
          return kUsage;
        }
        for (const auto& m : role_members(creds, role)) out << m << "\n";
      } else if (!amap_path.empty() && !principal.empty() && !path_text.empty()) {
        for (const auto& a : authorized_attributes(creds, load_attribute_map(amap_path), principal,
                                                   parse_path(path_text))) {
          out << a << "\n";
        }
      } else {
        err << "tm eval: give --role, or --attr-map with --principal and --path\n";
        return kUsage;
      }
    } else if (*witness_cmd) {
      PublicParams pp = load<PublicParams>(pp_path);
      out << to_hex(recover_master_witness(pp, load<DAKey>(da_path)).w.encode()) << "\n";
    } else if (*demo_cmd) {
      std::string text = scenario == "healthcare" ? std::string(healthcare_scenario()) : read_text(scenario);
      EventLog log = run_scenario(text);
      out << log.text();
      if (!log.all_passed()) {
        err << "demo: some expectations did not hold\n";
        return kCryptoFailure;
      }
    }
  } catch (const IoError& e) {
    err << "dhabe: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "dhabe: " << e.what() << "\n";
    return exit_code(e.kind());
  }
  return kOk;
}

}  // namespace dhabe::cli
