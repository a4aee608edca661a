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

// Scripted virtual-organization simulation.
//
// A scenario is a list of lines `EVENT key=value ...`; values containing
// spaces are double-quoted (with \" and \\ escapes). '#' starts a comment
// line. Events:
//
//   SEED value=N
//   SETUP
//   LOADCREDS text="..."             credentials, ';'-separated
//   LOADATTRMAP text="..."           attribute map, ';'-separated
//   DELEGATE parent=DA label=L [name=N]
//   RERAND da=DA path=a/b name=N     forged sibling of DA
//   KEYREQ da=DA user=U attrs=a,b [expect=issued|tm-denied]
//   COLLUDE users=U,V name=N         pools the users' keys into one
//   ENCRYPT policy="..." plaintext="..." label=L
//   DECRYPT user=U ct=L expect=ok|policy-denied|auth-fail|epoch-mismatch|tm-denied
//   EPOCHBUMP [exclude=DA,...]
//
// Runs are deterministic: one seeded generator drives every random choice.

#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dhabe/bytes.hpp"
#include "dhabe/error.hpp"
#include "dhabe/policy.hpp"
#include "dhabe/rng.hpp"
#include "dhabe/scheme.hpp"
#include "dhabe/serialize.hpp"
#include "dhabe/trust.hpp"

namespace dhabe {

struct ScenarioEvent {
  std::size_t line = 0;
  std::string kind;
  std::map<std::string, std::string> args;
};

struct Scenario {
  std::uint64_t seed = 0;
  std::vector<ScenarioEvent> events;
};

struct LogEntry {
  std::size_t line = 0;
  std::string kind;
  std::string outcome;
  bool passed = true;
  std::vector<std::pair<std::string, Digest>> digests;
  std::string text;
  // KEYREQ only.
  std::string user;
  AttributeSet requested;
  AttributeSet authorized;
  AttributeSet granted;
};

struct EventLog {
  std::vector<LogEntry> entries;
  std::map<std::string, std::size_t> op_counts;  // calls per scheme operation

  bool all_passed() const {
    return std::all_of(entries.begin(), entries.end(), [](const LogEntry& e) { return e.passed; });
  }

  std::string text() const {
    std::string out;
    for (const auto& e : entries) out += e.text + "\n";
    return out;
  }
};

inline constexpr std::string_view kDecryptOutcomes[] = {"ok", "policy-denied", "auth-fail", "epoch-mismatch",
                                                         "tm-denied"};

namespace harness_detail {

[[noreturn]] inline void syntax(const std::string& msg, std::size_t line) {
  throw SyntaxError(msg + " on line " + std::to_string(line), line);
}

inline const std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>>& grammar() {
  // event -> (required keys, optional keys)
  static const std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>> g = {
      {"SEED", {{"value"}, {}}},
      {"SETUP", {{}, {}}},
      {"LOADCREDS", {{"text"}, {}}},
      {"LOADATTRMAP", {{"text"}, {}}},
      {"DELEGATE", {{"parent", "label"}, {"name"}}},
      {"RERAND", {{"da", "path", "name"}, {}}},
      {"KEYREQ", {{"da", "user", "attrs"}, {"expect"}}},
      {"COLLUDE", {{"users", "name"}, {}}},
      {"ENCRYPT", {{"policy", "plaintext", "label"}, {}}},
      {"DECRYPT", {{"user", "ct", "expect"}, {}}},
      {"EPOCHBUMP", {{}, {"exclude"}}},
  };
  return g;
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(',', start);
    if (end == std::string_view::npos) end = s.size();
    std::string item(trust_detail::trim(s.substr(start, end - start)));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

inline std::string quote(std::string_view v) {
  bool plain = !v.empty() && std::none_of(v.begin(), v.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '"' || c == '\\';
  });
  if (plain) return std::string(v);
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string short_hex(const Digest& d) { return to_hex(ByteView(d.data(), 8)); }

}  // namespace harness_detail

inline Scenario parse_scenario(std::string_view text) {
  using namespace harness_detail;
  Scenario sc;
  std::size_t line_no = 0;
  for (std::string_view line : trust_detail::split(text, '\n')) {
    ++line_no;
    line = trust_detail::trim(line);
    if (line.empty() || line.front() == '#') continue;

    std::size_t i = 0;
    auto skip_ws = [&] {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    };
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    ScenarioEvent ev{line_no, std::string(line.substr(0, i)), {}};
    auto rule = grammar().find(ev.kind);
    if (rule == grammar().end()) syntax("unknown event '" + ev.kind + "'", line_no);

    for (skip_ws(); i < line.size(); skip_ws()) {
      std::size_t eq = line.find('=', i);
      if (eq == std::string_view::npos) syntax("expected key=value", line_no);
      std::string key(line.substr(i, eq - i));
      i = eq + 1;
      std::string value;
      if (i < line.size() && line[i] == '"') {
        ++i;
        bool closed = false;
        while (i < line.size()) {
          char c = line[i++];
          if (c == '"') {
            closed = true;
            break;
          }
          if (c == '\\') {
            if (i >= line.size()) break;
            c = line[i++];
          }
          value += c;
        }
        if (!closed) syntax("unterminated quoted value", line_no);
      } else {
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        value = std::string(line.substr(start, i - start));
      }
      const auto& [required, optional] = rule->second;
      if (!required.contains(key) && !optional.contains(key)) {
        syntax("unknown argument '" + key + "' for " + ev.kind, line_no);
      }
      if (!ev.args.emplace(key, value).second) syntax("duplicate argument '" + key + "'", line_no);
    }
    for (const auto& key : rule->second.first) {
      if (!ev.args.contains(key)) syntax(ev.kind + " requires " + key + "=", line_no);
    }

    if (ev.kind == "SEED") {
      try {
        std::size_t used = 0;
        sc.seed = std::stoull(ev.args["value"], &used);
        if (used != ev.args["value"].size()) throw std::invalid_argument("seed");
      } catch (const std::logic_error&) {
        syntax("SEED value must be an unsigned integer", line_no);
      }
      continue;
    }
    sc.events.push_back(std::move(ev));
  }
  return sc;
}

inline std::string print_scenario(const Scenario& sc) {
  std::string out = "SEED value=" + std::to_string(sc.seed) + "\n";
  for (const auto& ev : sc.events) {
    out += ev.kind;
    for (const auto& [k, v] : ev.args) out += " " + k + "=" + harness_detail::quote(v);
    out += "\n";
  }
  return out;
}

namespace harness_detail {

struct DaEntry {
  std::string name;
  std::string parent;  // empty for the root
  std::string source;  // RERAND only: the DA that was cloned
  DAKey key;
};

class Runner {
 public:
  explicit Runner(const Scenario& sc) : rng_(sc.seed) {}

  EventLog run(const Scenario& sc) {
    for (const auto& ev : sc.events) {
      entry_ = LogEntry{};
      entry_.line = ev.line;
      entry_.kind = ev.kind;
      dispatch(ev);
      std::string text = "[" + std::to_string(log_.entries.size() + 1) + "] " + ev.kind + " " + detail_;
      text += " => " + entry_.outcome;
      for (const auto& [name, d] : entry_.digests) text += " " + name + "=" + short_hex(d);
      if (!entry_.passed) text += " (UNEXPECTED)";
      entry_.text = std::move(text);
      detail_.clear();
      log_.entries.push_back(std::move(entry_));
    }
    return std::move(log_);
  }

 private:
  [[noreturn]] static void undefined(const std::string& what, const ScenarioEvent& ev) {
    throw Error(ErrorKind::kUndefinedLabel, what + " (line " + std::to_string(ev.line) + ")");
  }

  void count(const char* op) { ++log_.op_counts[op]; }

  void need_setup(const ScenarioEvent& ev) const {
    if (!vo_) undefined("no SETUP before " + ev.kind, ev);
  }

  DaEntry& da(const std::string& name, const ScenarioEvent& ev) {
    auto it = da_index_.find(name);
    if (it == da_index_.end()) undefined("unknown DA '" + name + "'", ev);
    return das_[it->second];
  }

  void add_da(DaEntry e, const ScenarioEvent& ev) {
    if (da_index_.contains(e.name)) {
      throw Error(ErrorKind::kInvalidArgument, "DA name '" + e.name + "' reused (line " + std::to_string(ev.line) + ")");
    }
    da_index_[e.name] = das_.size();
    das_.push_back(std::move(e));
  }

  void dispatch(const ScenarioEvent& ev) {
    const auto& a = ev.args;
    if (ev.kind == "SETUP") return on_setup(ev);
    if (ev.kind == "LOADCREDS") {
      CredentialSet more = parse_credentials(a.at("text"));
      creds_.credentials.insert(creds_.credentials.end(), more.credentials.begin(), more.credentials.end());
      detail_ = std::to_string(more.credentials.size()) + " credentials";
      entry_.outcome = "loaded";
      entry_.digests.emplace_back("creds", object_digest(creds_));
      return;
    }
    if (ev.kind == "LOADATTRMAP") {
      AttributeMap more = parse_attribute_map(a.at("text"));
      amap_.entries.insert(amap_.entries.end(), more.entries.begin(), more.entries.end());
      detail_ = std::to_string(more.entries.size()) + " grants";
      entry_.outcome = "loaded";
      entry_.digests.emplace_back("amap", object_digest(amap_));
      return;
    }
    need_setup(ev);
    if (ev.kind == "DELEGATE") return on_delegate(ev);
    if (ev.kind == "RERAND") return on_rerand(ev);
    if (ev.kind == "KEYREQ") return on_keyreq(ev);
    if (ev.kind == "COLLUDE") return on_collude(ev);
    if (ev.kind == "ENCRYPT") return on_encrypt(ev);
    if (ev.kind == "DECRYPT") return on_decrypt(ev);
    if (ev.kind == "EPOCHBUMP") return on_epoch_bump(ev);
    undefined("event " + ev.kind + " cannot run here", ev);
  }

  void on_setup(const ScenarioEvent& ev) {
    if (vo_) throw Error(ErrorKind::kInvalidArgument, "second SETUP (line " + std::to_string(ev.line) + ")");
    vo_ = setup(rng_);
    count("setup");
    add_da(DaEntry{std::string(kRootLabel), "", "", vo_->root}, ev);
    detail_ = "epoch=0";
    entry_.outcome = "ok";
    entry_.digests.emplace_back("pp", object_digest(vo_->pp));
    entry_.digests.emplace_back("root", object_digest(vo_->root));
  }

  void on_delegate(const ScenarioEvent& ev) {
    const auto& a = ev.args;
    const DaEntry& parent = da(a.at("parent"), ev);
    std::string name = a.contains("name") ? a.at("name") : a.at("label");
    PublicParams view = vo_->pp;
    view.current_epoch = parent.key.epoch;
    DAKey child = delegate(view, parent.key, a.at("label"), rng_);
    count("delegate");
    detail_ = parent.name + " -> " + name + " path=" + format_path(child.path) + " depth=" +
              std::to_string(child.depth());
    entry_.outcome = "ok";
    entry_.digests.emplace_back("da", object_digest(child));
    add_da(DaEntry{name, parent.name, "", std::move(child)}, ev);
  }

  void on_rerand(const ScenarioEvent& ev) {
    const auto& a = ev.args;
    const DaEntry& src = da(a.at("da"), ev);
    DAKey forged = rerandomize(vo_->pp, src.key, parse_path(a.at("path")), rng_);
    count("rerandomize");
    MasterWitness w1 = recover_master_witness(vo_->pp, src.key);
    MasterWitness w2 = recover_master_witness(vo_->pp, forged);
    count("recover_master_witness");
    count("recover_master_witness");
    bool same = w1.w == w2.w;
    detail_ = src.name + " -> " + a.at("name") + " path=" + format_path(forged.path) +
              " witness=" + (same ? "equal" : "different");
    entry_.outcome = "forged";
    entry_.digests.emplace_back("da", object_digest(forged));
    entry_.digests.emplace_back("witness", sha256(w1.w.encode()));
    add_da(DaEntry{a.at("name"), src.name, src.name, std::move(forged)}, ev);
  }

  void on_keyreq(const ScenarioEvent& ev) {
    const auto& a = ev.args;
    const DaEntry& issuer = da(a.at("da"), ev);
    const std::string& user = a.at("user");
    entry_.user = user;
    for (const auto& attr : split_list(a.at("attrs"))) entry_.requested.insert(attr);
    entry_.authorized = authorized_attributes(creds_, amap_, user, issuer.key.path);
    detail_ = issuer.name + " user=" + user + " attrs=" + join(entry_.requested);

    bool covered = !entry_.authorized.empty() &&
                   std::includes(entry_.authorized.begin(), entry_.authorized.end(), entry_.requested.begin(),
                                 entry_.requested.end());
    if (!covered) {
      denied_.insert(user);
      entry_.outcome = "tm-denied";
    } else {
      PublicParams view = vo_->pp;
      view.current_epoch = issuer.key.epoch;  // a stale DA still issues for its own epoch
      UserKeyShard shard = issue_user_key(view, issuer.key, user, entry_.requested);
      count("issue_user_key");
      bool wf = is_well_formed(view, shard);
      count("is_well_formed");
      entry_.granted = shard.attributes();
      wallets_[user][shard.epoch].push_back(shard);
      entry_.outcome = "issued";
      detail_ += " epoch=" + std::to_string(shard.epoch) + (wf ? " well-formed" : " MALFORMED");
      if (shard.epoch != vo_->pp.current_epoch) detail_ += " stale-issuer";
      if (!issuer.source.empty()) {
        const DaEntry& orig = da(issuer.source, ev);
        UserKeyShard twin = issue_user_key(view, orig.key, user, entry_.requested);
        count("issue_user_key");
        bool identical = twin.k == shard.k && twin.l == shard.l && twin.components == shard.components;
        detail_ += std::string(" forged-issuer ") + (identical ? "identical-to=" : "differs-from=") + orig.name;
      }
      entry_.digests.emplace_back("key", object_digest(shard));
    }
    if (a.contains("expect")) entry_.passed = entry_.outcome == a.at("expect");
  }

  void on_collude(const ScenarioEvent& ev) {
    const auto& a = ev.args;
    std::vector<std::string> users = split_list(a.at("users"));
    if (users.size() < 2) throw Error(ErrorKind::kInvalidArgument, "COLLUDE needs at least two users");
    std::optional<UserKey> pooled;
    for (const auto& u : users) {
      auto it = wallets_.find(u);
      if (it == wallets_.end() || it->second.empty()) undefined("user '" + u + "' holds no key", ev);
      auto& shards = it->second.rbegin()->second;
      UserKey key = merge_shards(shards);
      count("merge_shards");
      if (!pooled) {
        pooled = key;
        continue;
      }
      for (const auto& [attr, point] : key.components) pooled->components.insert_or_assign(attr, point);
      pooled->issuer_paths.insert(pooled->issuer_paths.end(), key.issuer_paths.begin(), key.issuer_paths.end());
    }
    wallets_[a.at("name")][pooled->epoch] = {*pooled};
    detail_ = a.at("name") + " <- " + join(std::set<std::string>(users.begin(), users.end())) +
              " attrs=" + join(pooled->attributes());
    entry_.outcome = "pooled";
    entry_.digests.emplace_back("key", object_digest(*pooled));
  }

  void on_encrypt(const ScenarioEvent& ev) {
    const auto& a = ev.args;
    if (cts_.contains(a.at("label"))) {
      throw Error(ErrorKind::kInvalidArgument, "ciphertext label reused (line " + std::to_string(ev.line) + ")");
    }
    PolicyTree tree = parse_policy(a.at("policy"));
    const std::string& pt = a.at("plaintext");
    Ciphertext ct = encrypt(vo_->pp, tree, as_bytes(pt), rng_);
    count("encrypt");
    detail_ = a.at("label") + " policy=" + quote(print_policy(tree)) + " epoch=" + std::to_string(ct.epoch);
    entry_.outcome = "ok";
    entry_.digests.emplace_back("ct", object_digest(ct));
    cts_.emplace(a.at("label"), std::make_pair(std::move(ct), pt));
  }

  void on_decrypt(const ScenarioEvent& ev) {
    const auto& a = ev.args;
    const std::string& user = a.at("user");
    auto ct_it = cts_.find(a.at("ct"));
    if (ct_it == cts_.end()) undefined("unknown ciphertext '" + a.at("ct") + "'", ev);
    const auto& [ct, plaintext] = ct_it->second;
    detail_ = user + " ct=" + a.at("ct");

    auto w = wallets_.find(user);
    if (w == wallets_.end() || w->second.empty()) {
      if (!denied_.contains(user)) undefined("user '" + user + "' never requested a key", ev);
      entry_.outcome = "tm-denied";
    } else {
      auto bucket = w->second.find(ct.epoch);
      const auto& shards = bucket != w->second.end() ? bucket->second : w->second.rbegin()->second;
      try {
        UserKey key = merge_shards(shards);
        count("merge_shards");
        count("decrypt");
        Bytes out = decrypt(vo_->pp, key, ct);
        entry_.outcome = std::string(out.begin(), out.end()) == plaintext ? "ok" : "wrong-plaintext";
      } catch (const Error& e) {
        switch (e.kind()) {
          case ErrorKind::kPolicyNotSatisfied: entry_.outcome = "policy-denied"; break;
          case ErrorKind::kAuthenticationFailed: entry_.outcome = "auth-fail"; break;
          case ErrorKind::kEpochMismatch: entry_.outcome = "epoch-mismatch"; break;
          case ErrorKind::kMergeRefused: entry_.outcome = "merge-refused"; break;
          default: throw;
        }
      }
    }
    const std::string& expect = a.at("expect");
    if (std::find(std::begin(kDecryptOutcomes), std::end(kDecryptOutcomes), expect) == std::end(kDecryptOutcomes)) {
      harness_detail::syntax("unknown expect value '" + expect + "'", ev.line);
    }
    entry_.passed = entry_.outcome == expect;
    detail_ += " expect=" + expect;
  }

  void on_epoch_bump(const ScenarioEvent& ev) {
    std::set<std::string> excluded;
    if (ev.args.contains("exclude")) {
      for (const auto& name : split_list(ev.args.at("exclude"))) {
        if (name == kRootLabel) throw Error(ErrorKind::kInvalidArgument, "the root cannot be excluded");
        excluded.insert(da(name, ev).name);
      }
    }
    std::uint64_t old_epoch = vo_->pp.current_epoch;
    RekeyResult next = epoch_rekey(vo_->mk, vo_->pp, rng_);
    count("epoch_rekey");
    vo_->pp = next.pp;
    vo_->root = next.root;

    std::vector<std::string> rekeyed, stale;
    for (auto& e : das_) {
      if (e.parent.empty()) {
        e.key = next.root;
        rekeyed.push_back(e.name);
        continue;
      }
      if (excluded.contains(e.parent)) excluded.insert(e.name);
      const DaEntry& parent = das_[da_index_.at(e.parent)];
      if (excluded.contains(e.name) || e.key.forged || parent.key.epoch != next.pp.current_epoch) {
        stale.push_back(e.name);
        continue;
      }
      e.key = delegate(vo_->pp, parent.key, e.key.path.back(), rng_);
      count("delegate");
      rekeyed.push_back(e.name);
    }
    detail_ = "epoch " + std::to_string(old_epoch) + "->" + std::to_string(vo_->pp.current_epoch) +
              " rekeyed=" + join(rekeyed) + " stale=" + join(stale);
    entry_.outcome = "ok";
    entry_.digests.emplace_back("pp", object_digest(vo_->pp));
  }

  template <class Range>
  static std::string join(const Range& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ",") + std::string(s);
    return out.empty() ? "-" : out;
  }

  SeededRng rng_;
  std::optional<SetupResult> vo_;
  std::vector<DaEntry> das_;
  std::map<std::string, std::size_t> da_index_;
  CredentialSet creds_;
  AttributeMap amap_;
  std::map<std::string, std::map<std::uint64_t, std::vector<UserKeyShard>>> wallets_;
  std::set<std::string> denied_;
  std::map<std::string, std::pair<Ciphertext, std::string>> cts_;

  EventLog log_;
  LogEntry entry_;
  std::string detail_;
};

}  // namespace harness_detail

inline EventLog run_scenario(const Scenario& sc) { return harness_detail::Runner(sc).run(sc); }

inline EventLog run_scenario(std::string_view text) { return run_scenario(parse_scenario(text)); }

// Two hospitals under one VO root.
inline std::string_view healthcare_scenario() {
  return R"scn(# Two hospitals form a virtual organization under a common root.
SEED value=20260101
SETUP
LOADCREDS text="HospA.doctor <- Alice; HospA.doctor <- Bob; HospA.doctor <- Mallory; HospB.cardio <- Alice; HospB.cardio <- Carol"
LOADATTRMAP text="HospA.doctor -> doctor @ hospA; HospB.cardio -> cardiology @ hospB"
DELEGATE parent=root label=hospA
DELEGATE parent=root label=hospB
DELEGATE parent=hospB label=cardio-lab name=cardioLab

# Alice holds attributes from both hospitals.
KEYREQ da=hospA user=Alice attrs=doctor expect=issued
KEYREQ da=hospB user=Alice attrs=cardiology expect=issued
KEYREQ da=hospA user=Bob attrs=doctor expect=issued
KEYREQ da=hospB user=Bob attrs=cardiology expect=tm-denied
KEYREQ da=hospA user=Eve attrs=doctor expect=tm-denied
KEYREQ da=hospB user=Carol attrs=cardiology expect=issued

ENCRYPT policy="doctor and cardiology" plaintext="patient 17: echo results" label=record
DECRYPT user=Alice ct=record expect=ok
DECRYPT user=Bob ct=record expect=policy-denied
DECRYPT user=Eve ct=record expect=tm-denied

# Bob and Carol pool their keys.
COLLUDE users=Bob,Carol name=BobCarol
DECRYPT user=BobCarol ct=record expect=auth-fail

# A forged sibling of hospital A issues keys nobody can tell apart.
RERAND da=hospA path=root/hospA name=rogue
KEYREQ da=rogue user=Mallory attrs=doctor expect=issued
ENCRYPT policy="doctor or 2 of (cardiology, surgeon, nurse)" plaintext="on-call roster" label=roster
DECRYPT user=Mallory ct=roster expect=ok

# Hospital B leaves the organization.
EPOCHBUMP exclude=hospB
KEYREQ da=hospA user=Alice attrs=doctor expect=issued
KEYREQ da=hospB user=Carol attrs=cardiology expect=issued
ENCRYPT policy="doctor or cardiology" plaintext="ward round notes" label=notes
DECRYPT user=Alice ct=notes expect=ok
DECRYPT user=Carol ct=notes expect=epoch-mismatch
DECRYPT user=Alice ct=record expect=ok
)scn";
}

}  // namespace dhabe
