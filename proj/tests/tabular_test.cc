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

#include "synthaudit/tabular.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "synthaudit/errors.h"
#include "synthaudit/random.h"

namespace synthaudit {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

// Pins the (schema, values) constructor; a bare brace list is ambiguous.
Dataset Make(Schema schema, std::vector<double> values) {
  return Dataset(std::move(schema), std::move(values));
}

Schema TwoCats() {
  return {ColumnSchema::Categorical("a", {"x", "y", "z"}),
          ColumnSchema::Categorical("b", {"p", "q"})};
}

std::map<std::string, int> Multiset(const Dataset& ds) {
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < ds.num_rows(); ++i) ++out[RecordKey(ds.row(i))];
  return out;
}

TEST(ColumnSchemaTest, CodeOfFindsLabelPosition) {
  ColumnSchema c = ColumnSchema::Categorical("c", {"lo", "mid", "hi"});
  EXPECT_EQ(c.CodeOf("hi"), 2u);
  EXPECT_EQ(c.CodeOf("lo"), 0u);
  EXPECT_FALSE(c.CodeOf("none").has_value());
  EXPECT_EQ(c.cardinality(), 3u);
}

TEST(ColumnSchemaTest, ValidateRejectsEmptySupportAndBadBounds) {
  EXPECT_THROW(ValidateSchema({ColumnSchema::Categorical("c", {})}),
               InvalidArgument);
  EXPECT_THROW(ValidateSchema({ColumnSchema::Continuous("x", 1.0, 1.0)}),
               InvalidArgument);
  EXPECT_NO_THROW(ValidateSchema(TwoCats()));
}

TEST(DatasetTest, RejectsOutOfSupportCodes) {
  EXPECT_THROW(Make(TwoCats(), {0, 2}), InvalidArgument);
  EXPECT_THROW(Make(TwoCats(), {0.5, 1}), InvalidArgument);
  EXPECT_THROW(Make(TwoCats(), {0, 1, 2}), InvalidArgument);
}

TEST(DatasetTest, RowAccessIsRowMajor) {
  Dataset ds = Make(TwoCats(), {0, 1, 2, 0});
  EXPECT_EQ(ds.num_rows(), 2u);
  EXPECT_EQ(ds.num_cols(), 2u);
  EXPECT_EQ(ds.at(1, 0), 2.0);
  EXPECT_THAT(ds.record(0), ElementsAre(0.0, 1.0));
  EXPECT_TRUE(ds.AllCategorical());
  EXPECT_FALSE(ds.AllContinuous());
}

TEST(DatasetTest, SelectConcatAndBuilderAgree) {
  Dataset ds = Make(TwoCats(), {0, 1, 2, 0, 1, 1});
  std::vector<std::size_t> pick = {2, 0};
  Dataset sel = ds.Select(pick);
  EXPECT_THAT(sel.record(0), ElementsAre(1.0, 1.0));
  EXPECT_THAT(sel.record(1), ElementsAre(0.0, 1.0));
  Dataset both = sel.Concat(ds);
  EXPECT_EQ(both.num_rows(), 5u);
  DatasetBuilder b(TwoCats());
  for (std::size_t i = 0; i < ds.num_rows(); ++i) b.AddRow(ds.row(i));
  EXPECT_EQ(std::move(b).Build(), ds);
  std::vector<std::size_t> bad = {3};
  EXPECT_THROW(ds.Select(bad), InvalidArgument);
}

TEST(DatasetTest, ConcatRejectsSchemaMismatch) {
  Dataset a = Make(TwoCats(), {0, 1});
  Dataset b = Make(
      {ColumnSchema::Continuous("x"), ColumnSchema::Continuous("y")},
      {0.5, 0.25});
  EXPECT_THROW(a.Concat(b), SchemaMismatch);
}

TEST(CanonicalizeTest, NegativeZeroAndRoundingNoiseCollapse) {
  EXPECT_FALSE(std::signbit(Canonicalize(-0.0)));
  EXPECT_EQ(Canonicalize(0.1 + 0.2), Canonicalize(0.3));
  EXPECT_EQ(RecordKey(std::vector<double>{Canonicalize(0.1 + 0.2)}),
            RecordKey(std::vector<double>{Canonicalize(0.3)}));
  // Stored rows are canonical, so their keys already agree.
  Dataset a = Make({ColumnSchema::Continuous("x")}, {0.1 + 0.2});
  Dataset b = Make({ColumnSchema::Continuous("x")}, {0.3});
  EXPECT_EQ(RecordKey(a.row(0)), RecordKey(b.row(0)));
  EXPECT_NE(RecordKey(std::vector<double>{0.3}),
            RecordKey(std::vector<double>{0.3001}));
}

TEST(CanonicalizeTest, IsIdempotentOnRandomValues) {
  Rng rng(7);
  std::normal_distribution<double> normal(0.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    double v = Canonicalize(normal(rng));
    ASSERT_EQ(Canonicalize(v), v);
  }
}

TEST(GenGaussTest, DeterministicAndQuantized) {
  Dataset a = GenGauss(3, 500, 11, 0.04);
  EXPECT_EQ(a, GenGauss(3, 500, 11, 0.04));
  EXPECT_NE(a, GenGauss(3, 500, 12, 0.04));
  EXPECT_EQ(a.num_rows(), 500u);
  EXPECT_EQ(a.num_cols(), 3u);
  for (double v : a.values()) {
    double steps = v / 0.04;
    EXPECT_NEAR(steps, std::round(steps), 1e-6);
  }
}

TEST(GenGaussTest, MomentsMatchStandardNormal) {
  Dataset a = GenGauss(2, 20000, 3);
  double sum = 0.0, sq = 0.0;
  for (double v : a.values()) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(a.values().size());
  // Standard errors are about 0.005 and 0.007.
  EXPECT_NEAR(sum / n, 0.0, 0.03);
  EXPECT_NEAR(sq / n, 1.0, 0.04);
}

TEST(QuantizeGaussTest, RoundsToNearestGridPoint) {
  EXPECT_DOUBLE_EQ(QuantizeGauss(0.05, 0.1), 0.0);
  EXPECT_DOUBLE_EQ(QuantizeGauss(0.26, 0.1), 0.30000000000000004);
  EXPECT_DOUBLE_EQ(QuantizeGauss(0.26, 0.0), 0.26);
}

TEST(CensusLiteTest, AllCategoricalAndDeterministic) {
  Dataset a = GenCensusLite(600, 5);
  EXPECT_TRUE(a.AllCategorical());
  EXPECT_EQ(a.num_rows(), 600u);
  EXPECT_EQ(a, GenCensusLite(600, 5));
  EXPECT_NE(a, GenCensusLite(600, 6));
}

TEST(CensusLiteTest, HasRepeatedRowsAndRareRows) {
  Dataset a = GenCensusLite(6000, 1);
  auto counts = Multiset(a);
  int singletons = 0, max_count = 0;
  for (const auto& [key, c] : counts) {
    singletons += c == 1;
    max_count = std::max(max_count, c);
  }
  EXPECT_GT(max_count, 10);
  EXPECT_GT(singletons, 0);
}

TEST(SplitTest, HalvesPartitionTheRows) {
  Dataset ds = GenGauss(2, 1000, 9);
  auto [train, test] = Split(ds, 4);
  EXPECT_EQ(train.num_rows(), 500u);
  EXPECT_EQ(test.num_rows(), 500u);
  EXPECT_EQ(Multiset(train.Concat(test)), Multiset(ds));
  auto again = Split(ds, 4);
  EXPECT_EQ(again.first, train);
  EXPECT_NE(Split(ds, 5).first, train);
  EXPECT_THROW(Split(GenGauss(2, 3, 1), 0), InvalidArgument);
}

TEST(OutlierLabelTest, RadiusRuleMatchesNormOracle) {
  Dataset ds = GenGauss(2, 2000, 21);
  OutlierSet out = LabelOutliers(ds, RadiusRule{2.15});
  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    if (std::hypot(ds.at(i, 0), ds.at(i, 1)) > 2.15) expected.push_back(i);
  }
  EXPECT_EQ(out.indices, expected);
  // P(chi2_2 > 2.15^2) = exp(-2.15^2 / 2), about 9.9%.
  EXPECT_NEAR(static_cast<double>(expected.size()) / 2000.0,
              std::exp(-2.15 * 2.15 / 2.0), 0.02);
}

TEST(OutlierLabelTest, DesignatedClassSelectsLabel) {
  Dataset ds = Make(TwoCats(), {0, 1, 2, 0, 2, 1});
  OutlierSet out = LabelOutliers(ds, DesignatedClassRule{0, "z"});
  EXPECT_THAT(out.indices, ElementsAre(1u, 2u));
  EXPECT_THROW(LabelOutliers(ds, DesignatedClassRule{0, "w"}),
               InvalidArgument);
  EXPECT_THROW(LabelOutliers(ds, RadiusRule{}), InvalidArgument);
}

TEST(OutlierLabelTest, GmmRuleStaysWithinBudget) {
  Dataset ds = GenCensusLite(2000, 3);
  OutlierSet out =
      LabelOutliers(ds, GmmSmallestRule{10, DefaultOutlierBudget(2000), 1});
  EXPECT_LE(out.indices.size(), 200u);
  EXPECT_FALSE(out.indices.empty());
  EXPECT_TRUE(std::is_sorted(out.indices.begin(), out.indices.end()));
}

TEST(OutlierLabelTest, DefaultBudgetIsTenPercent) {
  EXPECT_EQ(DefaultOutlierBudget(1000), 100u);
  EXPECT_EQ(DefaultOutlierBudget(3000), 300u);
}

TEST(DiscretizerTest, UniformEdgesMatchClosedForm) {
  Schema s = {ColumnSchema::Continuous("x")};
  Dataset ds = Make(s, {0.0, 1.0, 4.0, 10.0});
  Discretizer d = Discretizer::Fit(ds, BinStrategy::kUniform, 5);
  EXPECT_THAT(d.edges(0), ElementsAre(2.0, 4.0, 6.0, 8.0));
  EXPECT_EQ(d.BinOf(0, 4.0), 1u);  // an edge belongs to the lower bin
  EXPECT_EQ(d.BinOf(0, 4.5), 2u);
  EXPECT_EQ(d.BinOf(0, -3.0), 0u);
  EXPECT_EQ(d.BinOf(0, 99.0), 4u);
  Dataset out = d.Apply(ds);
  EXPECT_TRUE(out.AllCategorical());
  EXPECT_THAT(out.values(), ElementsAre(0.0, 0.0, 1.0, 4.0));
}

TEST(DiscretizerTest, QuantileBinsAreBalanced) {
  Dataset ds = GenGauss(1, 10000, 2);
  Discretizer d = Discretizer::Fit(ds, BinStrategy::kQuantile, 10);
  Dataset out = d.Apply(ds);
  std::vector<int> counts(10, 0);
  for (double v : out.values()) ++counts[static_cast<int>(v)];
  for (int c : counts) EXPECT_NEAR(c, 1000, 2);
}

TEST(DiscretizerTest, RejectsBadInputs) {
  EXPECT_THROW(Discretizer::Fit(GenGauss(1, 10, 1), BinStrategy::kUniform, 1),
               InvalidArgument);
  EXPECT_THROW(Discretizer::Fit(Make(TwoCats(), {0, 0}),
                                BinStrategy::kUniform, 4),
               InvalidArgument);
  Discretizer d = Discretizer::Fit(GenGauss(2, 10, 1), BinStrategy::kUniform, 4);
  EXPECT_THROW(d.Apply(GenGauss(3, 10, 1)), SchemaMismatch);
}

TEST(CsvTest, RoundTripsMixedSchema) {
  Schema s = {ColumnSchema::Categorical("c", {"a,b", "q\"x", "plain"}),
              ColumnSchema::Continuous("x", -5.0, 5.0)};
  Dataset ds = Make(s, {0, -1.25, 1, 0.1, 2, 4.999999999});
  Dataset back = ParseCsv(FormatCsv(ds));
  EXPECT_EQ(back, ds);
}

TEST(CsvTest, SupportFromDataWhenUnlisted) {
  Dataset ds = ParseCsv("c:cat,x:num\nred,1\nblue,2\nred,3\n");
  EXPECT_THAT(ds.schema()[0].support, ElementsAre("red", "blue"));
  EXPECT_THAT(ds.values(), ElementsAre(0.0, 1.0, 1.0, 2.0, 0.0, 3.0));
}

TEST(CsvTest, ErrorsCarryLineNumbers) {
  try {
    ParseCsv("x:num\n1\noops\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_THAT(e.what(), HasSubstr("not a number"));
  }
  EXPECT_THROW(ParseCsv("x:float\n1\n"), ParseError);
  EXPECT_THROW(ParseCsv("x:num,y:num\n1\n"), ParseError);
  EXPECT_THROW(ParseCsv("c:cat(a|b)\nc\n"), ParseError);
  EXPECT_THROW(ParseCsv("x:num(0|1)\n2\n"), ParseError);
  EXPECT_THROW(ParseCsv(""), ParseError);
}

}  // namespace
}  // namespace synthaudit
