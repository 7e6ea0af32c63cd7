// Copyright 2026 The SynthAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "synthaudit/workbench.h"

#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "synthaudit/errors.h"

namespace synthaudit {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(ConfigTest, ParsesCommentsBlanksAndOverrides) {
  Config c = Config::Parse(
      "# header\n"
      "\n"
      "  seed = 7  \n"
      "dataset.kind=gauss\n"
      "seed = 9\n"
      "dp.epsilon = 0.5, 1 ,inf\n");
  EXPECT_EQ(c.GetUint("seed"), 9u);
  EXPECT_EQ(c.GetString("dataset.kind"), "gauss");
  EXPECT_EQ(c.GetDoubleList("dp.epsilon"),
            (std::vector<double>{0.5, 1.0, kInf}));
  // Documented defaults fill the rest.
  EXPECT_EQ(c.GetUint("dataset.n"), 6000u);
  EXPECT_TRUE(c.GetBool("attack.run_search"));
  EXPECT_FALSE(c.Has("dataset.n"));
  EXPECT_EQ(c.GetOptionalDouble("dp.delta"), std::nullopt);
}

TEST(ConfigTest, ParseErrorsCarryTheLine) {
  try {
    Config::Parse("seed = 1\n# fine\nno equals here\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    Config::Parse("seed = 1\nmystery.key = 4\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_THAT(e.what(), HasSubstr("mystery.key"));
  }
  EXPECT_THROW(Config::Parse(" = 3\n"), ParseError);
}

TEST(ConfigTest, TypedGettersRejectBadText) {
  Config c;
  EXPECT_THROW(c.Set("no.such.key", "1"), InvalidArgument);
  c.Set("seed", "x12");
  EXPECT_THROW(c.GetUint("seed"), InvalidArgument);
  c.Set("attack.run_search", "maybe");
  EXPECT_THROW(c.GetBool("attack.run_search"), InvalidArgument);
  c.Set("dataset.resolution", "0.1.2");
  EXPECT_THROW(c.GetDouble("dataset.resolution"), InvalidArgument);
  c.Set("attack.run_search", "no");
  EXPECT_FALSE(c.GetBool("attack.run_search"));
  EXPECT_THROW(Config::Load("/nonexistent/synthaudit.conf"), InvalidArgument);
}

TEST(ConfigTest, CanonicalIsSortedExplicitAssignments) {
  Config a = Config::Parse("seed=1\ndataset.kind=gauss\n");
  Config b;
  b.Set("dataset.kind", "gauss");
  b.Set("seed", "1");
  EXPECT_EQ(a.Canonical(), "dataset.kind=gauss\nseed=1\n");
  EXPECT_EQ(a.Canonical(), b.Canonical());
}

TEST(ConfigTest, EveryDocumentedKeyIsUniqueAndHelped) {
  std::set<std::string_view> names;
  for (const ConfigKey& k : DocumentedConfigKeys()) {
    EXPECT_TRUE(names.insert(k.name).second) << k.name;
    EXPECT_FALSE(k.help.empty()) << k.name;
  }
  // Every default resolves into a valid spec.
  EXPECT_NO_THROW(SpecFromConfig(Config()));
}

TEST(Fnv1aTest, PublishedVectors) {
  EXPECT_EQ(Fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(SpecTest, DefaultsAndValidation) {
  ExperimentSpec s = SpecFromConfig(Config());
  EXPECT_EQ(s.dataset.kind, "censuslite");
  EXPECT_EQ(s.dataset.n, 6000u);
  EXPECT_EQ(s.epsilons, (std::vector<double>{kInf}));
  EXPECT_EQ(s.model.kind, ModelKind::kIndependent);
  EXPECT_EQ(s.utility_scale, 10u);
  // Categorical data: small clusters or low density.
  EXPECT_EQ(s.attack.locator.strategy, LocatorStrategy::kCombined);
  EXPECT_EQ(s.config_hash.size(), 16u);

  Config gauss = Config::Parse("dataset.kind = gauss\n");
  EXPECT_EQ(SpecFromConfig(gauss).attack.locator.strategy,
            LocatorStrategy::kLowDensity);

  for (const char* bad :
       {"dataset.kind = parquet", "dataset.kind = csv", "dp.epsilon = 0",
        "dp.epsilon = -1", "sweep.utility_scale = 0", "model.kind = gan",
        "attack.kind = guess", "locator.strategy = vibes"}) {
    EXPECT_THROW(SpecFromConfig(Config::Parse(bad)), InvalidArgument) << bad;
  }
}

TEST(SpecTest, HashCoversConfigAndSeed) {
  Config a = Config::Parse("dataset.n = 100\n");
  Config b = Config::Parse("dataset.n = 100\n");
  Config c = Config::Parse("dataset.n = 101\n");
  EXPECT_EQ(SpecFromConfig(a).config_hash, SpecFromConfig(b).config_hash);
  EXPECT_NE(SpecFromConfig(a).config_hash, SpecFromConfig(c).config_hash);
  b.Set("seed", "4");
  EXPECT_NE(SpecFromConfig(a).config_hash, SpecFromConfig(b).config_hash);
  char want[17];
  std::snprintf(want, sizeof(want), "%016llx",
                static_cast<unsigned long long>(
                    Fnv1a("dataset.n=100\nseed=0\n")));
  EXPECT_EQ(SpecFromConfig(a).config_hash, want);
}

TEST(SpecTest, DatasetLoadingIsDeterministic) {
  Config c = Config::Parse("dataset.kind = gauss\ndataset.n = 300\n");
  ExperimentSpec s = SpecFromConfig(c);
  EXPECT_EQ(LoadDataset(s), LoadDataset(s));
  EXPECT_EQ(LoadDataset(s).num_rows(), 300u);
  EXPECT_EQ(LoadDataset(s).num_cols(), 2u);
}

RunReport Sample() {
  RunReport r;
  r.name = "demo";
  r.seed = 3;
  r.config_hash = "00000000deadbeef";
  r.Check("first", true, "fine");
  r.Check("second", false);
  r.Measure("cell a", "recall", 0.1 + 0.2);
  r.Measure("cell a", "precision", 1.0);
  r.Measure("b", "recall", 1.0 / 3.0);
  r.Time("total", 1.5);
  r.attacks["cell a"] = "{}";
  return r;
}

TEST(RunReportTest, FindAndPassed) {
  RunReport r = Sample();
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.Find("cell a", "recall"), 0.1 + 0.2);
  EXPECT_EQ(r.Find("b", "precision"), std::nullopt);
  RunReport ok;
  ok.Check("only", true);
  EXPECT_TRUE(ok.passed());
}

TEST(RunReportTest, JsonRoundTripsExactly) {
  RunReport r = Sample();
  // Attack payloads are written but not read back.
  EXPECT_TRUE(RunReportFromJson(RunReportToJson(r)).attacks.empty());
  r.attacks.clear();
  const std::string json = RunReportToJson(r);
  RunReport back = RunReportFromJson(json);
  EXPECT_EQ(RunReportToJson(back), json);
  ASSERT_EQ(back.measurements.size(), 3u);
  EXPECT_EQ(back.measurements[0].value, 0.1 + 0.2);
  EXPECT_EQ(back.measurements[2].value, 1.0 / 3.0);
  EXPECT_EQ(back.assertions[1].passed, false);
  // Timings stay out of the deterministic JSON.
  EXPECT_THAT(json, ::testing::Not(HasSubstr("1.5")));
  EXPECT_THROW(RunReportFromJson("{"), ParseError);
}

TEST(RunReportTest, CsvUsesSeventeenDigits) {
  const std::string csv = MeasurementsToCsv(Sample());
  EXPECT_THAT(csv, StartsWith("experiment,cell,metric,value\n"));
  EXPECT_THAT(csv, HasSubstr("demo,cell a,recall,0.30000000000000004\n"));
  EXPECT_THAT(csv, HasSubstr("demo,b,recall,0.33333333333333331\n"));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(std::stod(line.substr(line.rfind(',') + 1)), 0.1 + 0.2);
}

TEST(RunReportTest, WritesAllFilesAndRenders) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "synthaudit_report_test";
  fs::remove_all(dir);
  WriteRunReport(Sample(), dir.string());
  for (const char* f : {"demo.json", "demo.csv", "demo.timings.json",
                        "demo.cell_a.attack.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  std::ifstream in(dir / "demo.json");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), RunReportToJson(Sample()));
  fs::remove_all(dir);

  const std::string text = RenderReport(Sample());
  EXPECT_THAT(text, HasSubstr("FAIL"));
  EXPECT_THAT(text, HasSubstr("[FAILED] second"));
  EXPECT_THAT(text, HasSubstr("[ok] first: fine"));
}

TEST(ReproductionTest, SynthEqualToTestPassesWithIdenticalBytes) {
  RunReport a = Ce1(0);
  RunReport b = Ce1(0);
  EXPECT_TRUE(a.passed()) << RenderReport(a);
  EXPECT_EQ(RunReportToJson(a), RunReportToJson(b));
  EXPECT_NE(RunReportToJson(Ce1(1)), RunReportToJson(a));
}

TEST(RunAttackTest, SmallReconstructionIsDeterministic) {
  Config c = Config::Parse(
      "dataset.n = 600\n"
      "model.kind = random\n"
      "attack.rounds = 2\n"
      "seed = 5\n");
  ExperimentSpec s = SpecFromConfig(c);
  RunReport a = RunAttack(s);
  RunReport b = RunAttack(s);
  EXPECT_EQ(RunReportToJson(a), RunReportToJson(b));
  EXPECT_EQ(a.attacks, b.attacks);
  ASSERT_FALSE(a.measurements.empty());
  for (const Measurement& m : a.measurements) {
    if (m.metric == "precision") EXPECT_EQ(m.value, 1.0) << m.cell;
  }
}

}  // namespace
}  // namespace synthaudit
