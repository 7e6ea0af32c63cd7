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

#include "synthaudit/provider.h"

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "synthaudit/errors.h"
#include "synthaudit/metrics.h"
#include "synthaudit/tabular.h"

namespace synthaudit {
namespace {

using ::testing::HasSubstr;

ProviderConfig Independent(uint64_t seed = 1) {
  ProviderConfig c;
  c.model.kind = ModelKind::kIndependent;
  c.seed = seed;
  return c;
}

ProviderConfig Oracle(uint64_t seed = 1) {
  ProviderConfig c;
  c.model.kind = ModelKind::kOracle;
  c.model.oracle_dim = 2;
  c.seed = seed;
  return c;
}

void ExpectSameReport(const PrivacyReport& a, const PrivacyReport& b) {
  EXPECT_EQ(a.all_pass, b.all_pass);
  EXPECT_EQ(a.ims.share_synth, b.ims.share_synth);
  EXPECT_EQ(a.ims.share_test, b.ims.share_test);
  for (auto [x, y] : {std::pair{a.dcr, b.dcr}, std::pair{a.nndr, b.nndr}}) {
    EXPECT_EQ(x.pct5_synth, y.pct5_synth);
    EXPECT_EQ(x.pct5_test, y.pct5_test);
    EXPECT_EQ(x.mean_synth, y.mean_synth);
    EXPECT_EQ(x.mean_test, y.mean_test);
    EXPECT_EQ(x.pass, y.pass);
  }
}

TEST(ProviderTest, SplitsIntoHalvesThatPartitionTheData) {
  Dataset data = GenGauss(2, 400, 3);
  Provider p(data, Oracle());
  const Dataset& train = harness::HiddenTrain(p);
  const Dataset& test = harness::HiddenTest(p);
  EXPECT_EQ(train.num_rows(), 200u);
  EXPECT_EQ(test.num_rows(), 200u);
  EXPECT_EQ(p.train_size(), 200u);
  std::vector<double> all(train.values().begin(), train.values().end());
  all.insert(all.end(), test.values().begin(), test.values().end());
  std::vector<double> want(data.values().begin(), data.values().end());
  // Same multiset of rows: compare sorted row pairs.
  auto rows = [](const std::vector<double>& v) {
    std::vector<std::pair<double, double>> r;
    for (std::size_t i = 0; i < v.size(); i += 2) r.push_back({v[i], v[i + 1]});
    std::sort(r.begin(), r.end());
    return r;
  };
  EXPECT_EQ(rows(all), rows(want));
  EXPECT_THROW(Provider(GenGauss(2, 401, 3), Oracle()), InvalidArgument);
}

TEST(ProviderTest, SeededSamplesRepeatAndUnseededOnesAdvance) {
  Provider p(GenCensusLite(400, 2), Independent());
  EXPECT_EQ(p.Sample(50, 9), p.Sample(50, 9));
  EXPECT_NE(p.Sample(50, std::nullopt), p.Sample(50, std::nullopt));
  // A second provider with the same config replays the unseeded stream.
  Provider a(GenCensusLite(400, 2), Independent());
  Provider b(GenCensusLite(400, 2), Independent());
  EXPECT_EQ(a.Sample(30, std::nullopt), b.Sample(30, std::nullopt));
  EXPECT_EQ(a.Stats(), (CallStats{1, 0}));
}

TEST(ProviderTest, MetricsMatchADirectEvaluatorAndHideFailingScores) {
  Provider p(GenGauss(2, 400, 4), Oracle());
  MetricsEvaluator direct(harness::HiddenTrain(p), harness::HiddenTest(p),
                          Metric::kEuclidean);
  // The test half passes by construction; the train half fails.
  MetricsResponse ok = p.Metrics(harness::HiddenTest(p));
  EXPECT_TRUE(ok.all_pass());
  ASSERT_TRUE(ok.scores.has_value());
  ExpectSameReport(*ok.scores, direct.Evaluate(harness::HiddenTest(p)));
  MetricsResponse bad = p.Metrics(harness::HiddenTrain(p));
  EXPECT_FALSE(bad.ims);
  EXPECT_FALSE(bad.all_pass());
  EXPECT_FALSE(bad.scores.has_value());
  EXPECT_EQ(p.Stats(), (CallStats{0, 2}));
}

TEST(ProviderTest, SchemaMismatchIsNotCharged) {
  ProviderConfig c = Oracle();
  c.quota = 1;
  Provider p(GenGauss(2, 100, 5), c);
  EXPECT_THROW(p.Metrics(GenGauss(3, 10, 5)), SchemaMismatch);
  EXPECT_EQ(p.Stats(), (CallStats{0, 0}));
  EXPECT_NO_THROW(p.Sample(5, 1));
}

TEST(ProviderTest, QuotaCoversBothCallKinds) {
  ProviderConfig c = Oracle();
  c.quota = 3;
  Provider p(GenGauss(2, 100, 6), c);
  p.Sample(5, 1);
  p.Metrics(harness::HiddenTest(p));
  p.Sample(5, 2);
  EXPECT_THROW(p.Sample(5, 3), QuotaExceeded);
  EXPECT_THROW(p.Metrics(harness::HiddenTest(p)), QuotaExceeded);
  EXPECT_EQ(p.Stats(), (CallStats{2, 1}));
}

TEST(ProviderTest, SimilarityFilterRemovesNearTrainSamples) {
  ProviderConfig c = Oracle();
  c.model.oracle_resolution = 0.5;
  c.filters.similarity_tau = 0.0;
  Provider p(GenGauss(2, 2000, 7, 0.5), c);
  Dataset s = p.Sample(2000, 3);
  EXPECT_LT(s.num_rows(), 2000u);
  EXPECT_EQ(ImsMatches(harness::HiddenTrain(p), s), 0u);
  ProviderConfig neg = Oracle();
  neg.filters.similarity_tau = -1.0;
  EXPECT_THROW(Provider(GenGauss(2, 100, 7), neg), InvalidArgument);
}

TEST(ProviderTest, OutlierFilterCapsDistanceToTrain) {
  ProviderConfig c = Oracle();
  c.filters.outlier_percentile = 90.0;
  Provider p(GenGauss(2, 1000, 8), c);
  const Dataset& train = harness::HiddenTrain(p);
  const double threshold = OutlierThreshold(train, 90.0, Metric::kEuclidean);
  Dataset s = p.Sample(3000, 1);
  EXPECT_LT(s.num_rows(), 3000u);
  for (const NnResult& r : NnDistances(s, train, Metric::kEuclidean)) {
    EXPECT_LE(r.d1, threshold);
  }
}

TEST(ProviderTest, DpBudgetReachesTheModel) {
  ProviderConfig c = Independent();
  c.dp = DpBudget{0.5, std::nullopt};
  Provider p(GenCensusLite(400, 2), c);
  ASSERT_TRUE(p.model().dp().has_value());
  EXPECT_EQ(p.model().dp()->epsilon, 0.5);
  EXPECT_EQ(p.metric(), Metric::kHamming);
}

TEST(AuditingClientTest, CountsWhatPassesThrough) {
  ProviderConfig c = Oracle();
  c.quota = 2;
  Provider p(GenGauss(2, 100, 9), c);
  AuditingClient audit(p);
  audit.Sample(3, 1);
  audit.Metrics(harness::HiddenTest(p));
  EXPECT_THROW(audit.Sample(3, 2), QuotaExceeded);
  EXPECT_EQ(audit.observed(), (CallStats{1, 1}));
  EXPECT_EQ(audit.Stats(), p.Stats());
}

TEST(WireTest, RoundTripsSchemasRecordsAndResponses) {
  Dataset census = GenCensusLite(20, 1);
  EXPECT_EQ(SchemaFromJson(SchemaToJson(census.schema())), census.schema());
  EXPECT_EQ(DecodeSampleResponse(EncodeSampleResponse(census)), census);
  Dataset gauss = GenGauss(3, 20, 1);
  EXPECT_EQ(DecodeSampleResponse(EncodeSampleResponse(gauss)), gauss);
  EXPECT_EQ(DecodeRecords(EncodeRecords(gauss), gauss.schema()), gauss);
  Dataset empty = gauss.Select(std::vector<std::size_t>{});
  EXPECT_EQ(DecodeRecords(EncodeRecords(empty), gauss.schema()), empty);
  EXPECT_EQ(DecodeStats(EncodeStats({4, 7})), (CallStats{4, 7}));

  MetricsResponse fail{true, false, true, std::nullopt};
  MetricsResponse f2 = DecodeMetricsResponse(EncodeMetricsResponse(fail));
  EXPECT_TRUE(f2.ims);
  EXPECT_FALSE(f2.dcr);
  EXPECT_TRUE(f2.nndr);
  EXPECT_FALSE(f2.scores.has_value());

  MetricsResponse pass{true, true, true, PrivacyReport{}};
  pass.scores->dcr.pct5_synth = 0.1 + 0.2;
  pass.scores->nndr.mean_test = 1.0 / 3.0;
  pass.scores->all_pass = true;
  MetricsResponse p2 = DecodeMetricsResponse(EncodeMetricsResponse(pass));
  ASSERT_TRUE(p2.scores.has_value());
  ExpectSameReport(*p2.scores, *pass.scores);
}

TEST(WireTest, CategoricalCellsTravelAsLabels) {
  Schema schema = {ColumnSchema::Categorical("c", {"red", "blue"})};
  Dataset d(schema, std::vector<double>{1.0, 0.0});
  const std::string text = EncodeRecords(d);
  EXPECT_THAT(text, HasSubstr("\"blue\""));
  EXPECT_THAT(text, HasSubstr("\"red\""));
  EXPECT_THROW(DecodeRecords(R"({"records": [["green"]]})", schema),
               InvalidArgument);
  EXPECT_THROW(DecodeRecords(R"({"records": [["red", "blue"]]})", schema),
               InvalidArgument);
  EXPECT_THROW(DecodeRecords("{not json", schema), ParseError);
}

TEST(BindAddressTest, ParsesAndRejects) {
  EXPECT_EQ(ParseBindAddress("127.0.0.1:8080"),
            (std::pair<std::string, int>{"127.0.0.1", 8080}));
  EXPECT_EQ(ParseBindAddress("localhost:0"),
            (std::pair<std::string, int>{"localhost", 0}));
  for (const char* bad : {"8080", ":80", "host:", "host:x1", "host:80x",
                          "host:70000", "host:-1"}) {
    EXPECT_THROW(ParseBindAddress(bad), InvalidArgument) << bad;
  }
}

// Two providers with the same config, one reached in process and one over
// HTTP, answer every request identically.
TEST(HttpTest, RemoteMatchesInProcess) {
  Dataset data = GenCensusLite(400, 11);
  Provider local(data, Independent(5));
  Provider served(data, Independent(5));
  Provider other(data, Independent(6));
  ProviderServer server(served);
  const int port = server.Start("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  RemoteProvider remote("127.0.0.1", port);

  EXPECT_EQ(remote.Sample(40, 3), local.Sample(40, 3));
  EXPECT_EQ(remote.Sample(40, std::nullopt), local.Sample(40, std::nullopt));
  for (const Dataset& probe :
       {harness::HiddenTest(local), harness::HiddenTrain(local),
        other.Sample(200, 8)}) {
    MetricsResponse a = local.Metrics(probe);
    MetricsResponse b = remote.Metrics(probe);
    EXPECT_EQ(a.ims, b.ims);
    EXPECT_EQ(a.dcr, b.dcr);
    EXPECT_EQ(a.nndr, b.nndr);
    ASSERT_EQ(a.scores.has_value(), b.scores.has_value());
    if (a.scores) ExpectSameReport(*a.scores, *b.scores);
  }
  EXPECT_EQ(remote.Stats(), local.Stats());
  server.Stop();
}

TEST(HttpTest, MapsErrorsToStatusCodes) {
  ProviderConfig c = Oracle();
  c.quota = 1;
  Provider p(GenGauss(2, 100, 12), c);
  ProviderServer server(p);
  const int port = server.Start("127.0.0.1", 0);
  httplib::Client http("127.0.0.1", port);
  auto malformed = http.Post("/v1/sample", "{oops", "application/json");
  ASSERT_TRUE(malformed);
  EXPECT_EQ(malformed->status, 422);
  auto negative = http.Post("/v1/sample", R"({"n": -3})", "application/json");
  ASSERT_TRUE(negative);
  EXPECT_EQ(negative->status, 400);
  auto wrong = http.Post("/v1/metrics", R"({"records": [[1.0, 2.0, 3.0]]})",
                         "application/json");
  ASSERT_TRUE(wrong);
  EXPECT_EQ(wrong->status, 400);

  RemoteProvider remote("127.0.0.1", port);
  EXPECT_NO_THROW(remote.Sample(2, 1));
  EXPECT_THROW(remote.Sample(2, 1), QuotaExceeded);
  auto stats = http.Get("/v1/stats");
  ASSERT_TRUE(stats);
  EXPECT_EQ(DecodeStats(stats->body), (CallStats{1, 0}));
  server.Stop();
}

TEST(HttpTest, UnreachableServerIsARemoteError) {
  // Bind then release a port so nothing listens on it.
  Provider p(GenGauss(2, 100, 13), Oracle());
  int port = 0;
  {
    ProviderServer server(p);
    port = server.Start("127.0.0.1", 0);
    server.Stop();
  }
  RemoteProvider remote("127.0.0.1", port);
  EXPECT_THROW(remote.Stats(), RemoteError);
}

}  // namespace
}  // namespace synthaudit
