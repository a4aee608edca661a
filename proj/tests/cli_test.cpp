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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dhabe/cli.hpp"

namespace dhabe {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dhabe_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(p(name)) << text; }

  std::string read(const std::string& name) const {
    std::ifstream in(p(name), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
  }

  // setup, one delegated hospital, credentials and a map.
  void organization() {
    ASSERT_EQ(run({"--seed", "1", "setup", "--pp", p("pp"), "--mk", p("mk"), "--root", p("root")}).code, 0);
    ASSERT_EQ(run({"--seed", "2", "delegate", "--pp", p("pp"), "--parent", p("root"), "--label", "hospA", "--out",
                   p("hospA")})
                  .code,
              0);
    write("creds", "HospA.doctor <- Alice\nHospA.nurse <- Bob\n");
    write("amap", "HospA.doctor -> doctor @ hospA\nHospA.nurse -> nurse @ hospA\n");
  }

  Result issue(const std::string& user, const std::string& attrs, const std::string& out) {
    return run({"issue", "--pp", p("pp"), "--da", p("hospA"), "--user", user, "--attrs", attrs, "--creds", p("creds"),
                "--attr-map", p("amap"), "--out", p(out)});
  }

  fs::path dir_;
};

TEST_F(CliTest, Pipeline) {
  organization();
  EXPECT_EQ(issue("Alice", "doctor", "alice").code, 0);
  Result enc = run({"encrypt", "--pp", p("pp"), "--policy", "doctor or nurse", "--message", "hello ward", "--out",
                    p("ct")});
  ASSERT_EQ(enc.code, 0) << enc.err;
  EXPECT_NE(enc.out.find("CIPHERTEXT"), std::string::npos);
  Result dec = run({"decrypt", "--pp", p("pp"), "--key", p("alice"), "--ct", p("ct")});
  EXPECT_EQ(dec.code, 0) << dec.err;
  EXPECT_EQ(dec.out, "hello ward");

  write("msg", std::string("bin\0ary", 7));
  ASSERT_EQ(run({"encrypt", "--pp", p("pp"), "--policy", "doctor", "--in", p("msg"), "--out", p("ct2")}).code, 0);
  ASSERT_EQ(run({"decrypt", "--pp", p("pp"), "--key", p("alice"), "--ct", p("ct2"), "--out", p("back")}).code, 0);
  EXPECT_EQ(read("back"), read("msg"));
}

TEST_F(CliTest, ArmorMatchesBinary) {
  ASSERT_EQ(run({"--seed", "5", "setup", "--pp", p("pp"), "--mk", p("mk"), "--root", p("root")}).code, 0);
  ASSERT_EQ(run({"--seed", "5", "--armor", "setup", "--pp", p("ppa"), "--mk", p("mka"), "--root", p("roota")}).code,
            0);
  std::string armored = read("ppa");
  EXPECT_EQ(armored.rfind("-----BEGIN DHABE PUBLIC PARAMS-----", 0), 0u);
  std::string bin = read("pp");
  EXPECT_EQ(unwrap(as_bytes(armored)), Bytes(bin.begin(), bin.end()));
  // Armored inputs are accepted anywhere.
  EXPECT_EQ(run({"--seed", "6", "delegate", "--pp", p("ppa"), "--parent", p("roota"), "--label", "x", "--out",
                 p("x")})
                .code,
            0);
}

TEST_F(CliTest, TrustDenialExits3) {
  organization();
  Result r = issue("Alice", "doctor,nurse", "k");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("trust-management denial"), std::string::npos);
  EXPECT_FALSE(fs::exists(p("k")));
  EXPECT_EQ(issue("Mallory", "doctor", "k").code, 3);

  Result forced = run({"issue", "--pp", p("pp"), "--da", p("hospA"), "--user", "Alice", "--attrs", "doctor,nurse",
                       "--force", "--out", p("k")});
  EXPECT_EQ(forced.code, 0);
  EXPECT_NE(forced.err.find("--force"), std::string::npos);
}

TEST_F(CliTest, PolicyDenialExits2) {
  organization();
  ASSERT_EQ(issue("Bob", "nurse", "bob").code, 0);
  ASSERT_EQ(run({"encrypt", "--pp", p("pp"), "--policy", "doctor and nurse", "--message", "m", "--out", p("ct")}).code,
            0);
  Result r = run({"decrypt", "--pp", p("pp"), "--key", p("bob"), "--ct", p("ct")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("policy not satisfied"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, MergeAcrossDomains) {
  organization();
  ASSERT_EQ(run({"--seed", "3", "delegate", "--pp", p("pp"), "--parent", p("root"), "--label", "hospB", "--out",
                 p("hospB")})
                .code,
            0);
  ASSERT_EQ(issue("Alice", "doctor", "a1").code, 0);
  ASSERT_EQ(run({"issue", "--pp", p("pp"), "--da", p("hospB"), "--user", "Alice", "--attrs", "cardiology", "--force",
                 "--out", p("a2")})
                .code,
            0);
  ASSERT_EQ(run({"merge", "--out", p("alice"), p("a1"), p("a2")}).code, 0);
  ASSERT_EQ(run({"encrypt", "--pp", p("pp"), "--policy", "doctor and cardiology", "--message", "ecg", "--out",
                 p("ct")})
                .code,
            0);
  EXPECT_EQ(run({"decrypt", "--pp", p("pp"), "--key", p("a1"), "--ct", p("ct")}).code, 2);
  Result r = run({"decrypt", "--pp", p("pp"), "--key", p("alice"), "--ct", p("ct")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "ecg");

  ASSERT_EQ(issue("Bob", "nurse", "b1").code, 0);
  Result refused = run({"merge", "--out", p("mixed"), p("a1"), p("b1")});
  EXPECT_EQ(refused.code, 2);
  EXPECT_NE(refused.err.find("merge refused"), std::string::npos);
}

TEST_F(CliTest, EpochBump) {
  organization();
  ASSERT_EQ(issue("Alice", "doctor", "old").code, 0);
  ASSERT_EQ(run({"encrypt", "--pp", p("pp"), "--policy", "doctor", "--message", "before", "--out", p("ct0")}).code, 0);
  ASSERT_EQ(run({"epoch-bump", "--pp", p("pp"), "--mk", p("mk"), "--out-pp", p("pp1"), "--out-root", p("root1")}).code,
            0);
  ASSERT_EQ(run({"encrypt", "--pp", p("pp1"), "--policy", "doctor", "--message", "after", "--out", p("ct1")}).code, 0);
  Result stale = run({"decrypt", "--pp", p("pp1"), "--key", p("old"), "--ct", p("ct1")});
  EXPECT_EQ(stale.code, 2);
  EXPECT_NE(stale.err.find("epoch mismatch"), std::string::npos);
  EXPECT_EQ(run({"decrypt", "--pp", p("pp"), "--key", p("old"), "--ct", p("ct0")}).out, "before");

  // The excluded hospital keeps its old key and cannot issue for the new epoch.
  Result old_da = run({"issue", "--pp", p("pp1"), "--da", p("hospA"), "--user", "Alice", "--attrs", "doctor",
                       "--force", "--out", p("k")});
  EXPECT_EQ(old_da.code, 2);

  ASSERT_EQ(run({"delegate", "--pp", p("pp1"), "--parent", p("root1"), "--label", "hospA", "--out", p("hospA1")}).code,
            0);
  ASSERT_EQ(run({"issue", "--pp", p("pp1"), "--da", p("hospA1"), "--user", "Alice", "--attrs", "doctor", "--creds",
                 p("creds"), "--attr-map", p("amap"), "--out", p("new")})
                .code,
            0);
  EXPECT_EQ(run({"decrypt", "--pp", p("pp1"), "--key", p("new"), "--ct", p("ct1")}).out, "after");
  // A second bump works from the rewritten master key.
  EXPECT_EQ(run({"epoch-bump", "--pp", p("pp1"), "--mk", p("mk"), "--out-pp", p("pp2"), "--out-root", p("root2")}).code,
            0);
}

TEST_F(CliTest, RerandAndWitness) {
  organization();
  Result r = run({"rerand", "--pp", p("pp"), "--da", p("hospA"), "--path", "root/clinic", "--out", p("rogue")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("FLAW-DEMO"), std::string::npos);
  Result w1 = run({"witness", "--pp", p("pp"), "--da", p("root")});
  Result w2 = run({"witness", "--pp", p("pp"), "--da", p("rogue")});
  EXPECT_EQ(w1.code, 0);
  EXPECT_EQ(w1.out.size(), 2 * 96 + 1);
  EXPECT_EQ(w1.out, w2.out);
  EXPECT_EQ(run({"rerand", "--pp", p("pp"), "--da", p("hospA"), "--path", "root", "--out", p("x")}).code, 1);
}

TEST_F(CliTest, TrustEval) {
  write("creds", "HospA.doctor <- Alice\nVO.member <- HospA.doctor\nVO.member <- Bob\n");
  write("amap", "VO.member -> staff @ root\n");
  Result r = run({"tm", "eval", "--creds", p("creds"), "--role", "VO.member"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "Alice\nBob\n");
  r = run({"tm", "eval", "--creds", p("creds"), "--attr-map", p("amap"), "--principal", "Alice", "--path",
           "root/hospA"});
  EXPECT_EQ(r.out, "staff\n");
  EXPECT_EQ(run({"tm", "eval", "--creds", p("creds")}).code, 1);
  write("bad", "VO.member <- \n");
  EXPECT_EQ(run({"tm", "eval", "--creds", p("bad"), "--role", "VO.member"}).code, 4);
}

TEST_F(CliTest, Demo) {
  Result r = run({"demo", "healthcare"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("DECRYPT Alice ct=record expect=ok => ok"), std::string::npos);
  write("fail.scn", "SETUP\nLOADCREDS text=\"O.s <- Ann\"\nLOADATTRMAP text=\"O.s -> s @ root\"\n"
                    "KEYREQ da=root user=Ann attrs=s\nENCRYPT policy=t plaintext=x label=c\n"
                    "DECRYPT user=Ann ct=c expect=ok\n");
  EXPECT_EQ(run({"demo", p("fail.scn")}).code, 2);
  write("broken.scn", "DECRYPT user=a ct=b expect=ok\n");
  EXPECT_EQ(run({"demo", p("broken.scn")}).code, 4);
}

TEST_F(CliTest, UsageErrorsExit1) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"setup", "--pp", p("pp")}).code, 1);
  EXPECT_EQ(run({"decrypt", "--pp", p("missing"), "--key", p("k"), "--ct", p("c")}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
  organization();
  EXPECT_EQ(run({"issue", "--pp", p("pp"), "--da", p("hospA"), "--user", "Alice", "--attrs", "doctor", "--out",
                 p("k")})
                .code,
            1);
}

TEST_F(CliTest, FormatErrorsExit4) {
  organization();
  write("junk", "not an object");
  EXPECT_EQ(run({"delegate", "--pp", p("junk"), "--parent", p("root"), "--label", "x", "--out", p("x")}).code, 4);
  // Right envelope, wrong object.
  EXPECT_EQ(run({"delegate", "--pp", p("root"), "--parent", p("root"), "--label", "x", "--out", p("x")}).code, 4);
  EXPECT_EQ(run({"encrypt", "--pp", p("pp"), "--policy", "a and (b", "--message", "m", "--out", p("x")}).code, 4);

  // Unknown DEM algorithm id.
  ASSERT_EQ(issue("Alice", "doctor", "alice").code, 0);
  ASSERT_EQ(run({"encrypt", "--pp", p("pp"), "--policy", "doctor", "--message", "m", "--out", p("ct")}).code, 0);
  Ciphertext ct = deserialize<Ciphertext>(as_bytes(read("ct")));
  ct.dem.alg_id = 0x42;
  Bytes bad = serialize(ct);
  std::ofstream(p("ct_bad"), std::ios::binary).write(reinterpret_cast<const char*>(bad.data()), bad.size());
  Result r = run({"decrypt", "--pp", p("pp"), "--key", p("alice"), "--ct", p("ct_bad")});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("unknown DEM algorithm"), std::string::npos);
}

TEST_F(CliTest, TamperedCiphertextFailsAuthentication) {
  organization();
  ASSERT_EQ(issue("Alice", "doctor", "alice").code, 0);
  ASSERT_EQ(run({"encrypt", "--pp", p("pp"), "--policy", "doctor", "--message", "secret", "--out", p("ct")}).code, 0);
  Ciphertext ct = deserialize<Ciphertext>(as_bytes(read("ct")));
  ct.dem.body[0] ^= 1;
  Bytes bad = serialize(ct);
  std::ofstream(p("ct_bad"), std::ios::binary).write(reinterpret_cast<const char*>(bad.data()), bad.size());
  Result r = run({"decrypt", "--pp", p("pp"), "--key", p("alice"), "--ct", p("ct_bad")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("authentication failed"), std::string::npos);
}

}  // namespace
}  // namespace dhabe
