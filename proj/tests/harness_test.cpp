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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dhabe/harness.hpp"

namespace dhabe {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorKind kind_of(std::string_view scenario) {
  try {
    run_scenario(scenario);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "scenario ran without error";
  return ErrorKind::kInvalidArgument;
}

TEST(Harness, HealthcarePasses) {
  EventLog log = run_scenario(healthcare_scenario());
  EXPECT_TRUE(log.all_passed()) << log.text();
  std::size_t decrypts = 0;
  for (const auto& e : log.entries) decrypts += e.kind == "DECRYPT";
  EXPECT_EQ(decrypts, 8u);
}

TEST(Harness, HealthcareStory) {
  std::string text = run_scenario(healthcare_scenario()).text();
  EXPECT_NE(text.find("witness=equal"), std::string::npos);
  EXPECT_NE(text.find("forged-issuer identical-to=hospA"), std::string::npos);
  EXPECT_NE(text.find("stale=hospB,cardioLab,rogue"), std::string::npos) << text;
  EXPECT_NE(text.find("stale-issuer"), std::string::npos);
}

TEST(Harness, CoversEveryOperation) {
  EventLog log = run_scenario(healthcare_scenario());
  for (const char* op : {"setup", "delegate", "rerandomize", "recover_master_witness", "issue_user_key",
                         "is_well_formed", "merge_shards", "encrypt", "decrypt", "epoch_rekey"}) {
    EXPECT_GT(log.op_counts[op], 0u) << op;
  }
}

TEST(Harness, TrustSoundness) {
  EventLog log = run_scenario(healthcare_scenario());
  std::size_t keyreqs = 0;
  for (const auto& e : log.entries) {
    if (e.kind != "KEYREQ") continue;
    ++keyreqs;
    EXPECT_TRUE(std::includes(e.authorized.begin(), e.authorized.end(), e.granted.begin(), e.granted.end()))
        << e.text;
    if (e.outcome == "tm-denied") EXPECT_TRUE(e.granted.empty());
  }
  EXPECT_GE(keyreqs, 8u);
}

TEST(Harness, Deterministic) {
  EXPECT_EQ(run_scenario(healthcare_scenario()).text(), run_scenario(healthcare_scenario()).text());
  // A different seed changes digests but not outcomes.
  std::string other(healthcare_scenario());
  other.replace(other.find("SEED value=20260101"), 19, "SEED value=7");
  EventLog a = run_scenario(healthcare_scenario()), b = run_scenario(other);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  EXPECT_NE(a.text(), b.text());
  for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_EQ(a.entries[i].outcome, b.entries[i].outcome);
}

TEST(Harness, GoldenLog) {
  fs::path golden = fs::path(DHABE_GOLDEN_DIR) / "healthcare.log";
  std::string text = run_scenario(healthcare_scenario()).text();
  if (std::getenv("DHABE_REGEN_GOLDEN")) std::ofstream(golden, std::ios::binary) << text;
  EXPECT_EQ(slurp(golden), text);
}

TEST(Harness, DemoFileMatchesBuiltin) {
  EXPECT_EQ(slurp(fs::path(DHABE_DEMO_DIR) / "healthcare.scn"), healthcare_scenario());
}

TEST(Harness, EmptyScenario) {
  EventLog log = run_scenario("");
  EXPECT_TRUE(log.entries.empty());
  EXPECT_TRUE(log.all_passed());
  EXPECT_TRUE(run_scenario("# nothing\n\nSEED value=3\n").entries.empty());
}

TEST(Harness, ParseAndPrint) {
  Scenario sc = parse_scenario("SEED value=9\nSETUP\nENCRYPT policy=\"a and \\\"b\\\"\" plaintext=x label=c\n");
  EXPECT_EQ(sc.seed, 9u);
  ASSERT_EQ(sc.events.size(), 2u);
  EXPECT_EQ(sc.events[1].args.at("policy"), "a and \"b\"");
  EXPECT_EQ(sc.events[1].line, 3u);
  Scenario again = parse_scenario(print_scenario(sc));
  EXPECT_EQ(again.events[1].args, sc.events[1].args);

  Scenario hc = parse_scenario(healthcare_scenario());
  EXPECT_EQ(run_scenario(print_scenario(hc)).text(), run_scenario(hc).text());
}

TEST(Harness, SyntaxErrors) {
  for (const char* bad : {"BOGUS", "SETUP x=1", "DELEGATE parent=root", "KEYREQ da=a user=b attrs=c attrs=d",
                          "ENCRYPT policy=\"open", "SEED value=abc", "DELEGATE parent root label=x"}) {
    EXPECT_THROW(parse_scenario(bad), SyntaxError) << bad;
  }
}

TEST(Harness, StructuralErrors) {
  EXPECT_EQ(kind_of("DELEGATE parent=root label=a"), ErrorKind::kUndefinedLabel);
  EXPECT_EQ(kind_of("SETUP\nDELEGATE parent=nowhere label=a"), ErrorKind::kUndefinedLabel);
  EXPECT_EQ(kind_of("SETUP\nDECRYPT user=a ct=b expect=ok"), ErrorKind::kUndefinedLabel);
  EXPECT_EQ(kind_of("SETUP\nENCRYPT policy=a plaintext=x label=c\nDECRYPT user=Nobody ct=c expect=ok"),
            ErrorKind::kUndefinedLabel);
  EXPECT_EQ(kind_of("SETUP\nKEYREQ da=ghost user=a attrs=b"), ErrorKind::kUndefinedLabel);
  EXPECT_EQ(kind_of("SETUP\nEPOCHBUMP exclude=ghost"), ErrorKind::kUndefinedLabel);
}

TEST(Harness, ExpectedFailuresDoNotAbort) {
  EventLog log = run_scenario(
      "SETUP\n"
      "LOADCREDS text=\"Org.staff <- Ann\"\n"
      "LOADATTRMAP text=\"Org.staff -> staff @ root\"\n"
      "KEYREQ da=root user=Ann attrs=staff\n"
      "ENCRYPT policy=\"staff and boss\" plaintext=p label=c\n"
      "DECRYPT user=Ann ct=c expect=ok\n"
      "DECRYPT user=Ann ct=c expect=policy-denied\n");
  ASSERT_EQ(log.entries.size(), 7u);
  EXPECT_FALSE(log.entries[5].passed);
  EXPECT_TRUE(log.entries[6].passed);
  EXPECT_FALSE(log.all_passed());
  EXPECT_NE(log.entries[5].text.find("(UNEXPECTED)"), std::string::npos);
}

}  // namespace
}  // namespace dhabe
