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

// The black-box synthetic-data provider: it owns a private train/test split
// and a fitted model, and answers only two kinds of requests, "sample" and
// "evaluate these records". Adversaries reach it through ProviderClient.

#ifndef SYNTHAUDIT_PROVIDER_H_
#define SYNTHAUDIT_PROVIDER_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "synthaudit/metrics.h"
#include "synthaudit/synthesis.h"
#include "synthaudit/tabular.h"

namespace synthaudit {

struct CallStats {
  std::size_t sample_calls = 0;
  std::size_t metric_calls = 0;

  friend bool operator==(const CallStats&, const CallStats&) = default;
};

struct MetricsResponse {
  bool ims = false;
  bool dcr = false;
  bool nndr = false;
  // Present exactly when all three flags are true.
  std::optional<PrivacyReport> scores;

  bool all_pass() const { return ims && dcr && nndr; }
};

// The only surface an adversary may use.
class ProviderClient {
 public:
  virtual ~ProviderClient() = default;
  // Without a seed the provider draws the next seed from its own stream.
  virtual Dataset Sample(std::size_t n, std::optional<uint64_t> seed) = 0;
  virtual MetricsResponse Metrics(const Dataset& synth) = 0;
  virtual CallStats Stats() = 0;
};

struct FilterConfig {
  // Similarity filter: drop samples within this distance of a train record.
  std::optional<double> similarity_tau;
  // Outlier filter: drop samples farther from train than this percentile of
  // train leave-self-out distances.
  std::optional<double> outlier_percentile;
};

struct ProviderConfig {
  ModelSpec model;
  std::optional<DpBudget> dp;
  // Defaults to the schema's natural metric.
  std::optional<Metric> metric;
  FilterConfig filters;
  uint64_t seed = 0;
  // Total calls (sample + metrics) allowed; unset means unlimited.
  std::optional<std::size_t> quota;
};

class Provider;
namespace harness {
// Ground truth for evaluation code. Attack code never includes this path:
// it only sees ProviderClient.
const Dataset& HiddenTrain(const Provider& provider);
const Dataset& HiddenTest(const Provider& provider);
}  // namespace harness

class Provider : public ProviderClient {
 public:
  // Splits `data` into equal train/test halves and fits the model on train.
  // Throws InvalidArgument on odd sizes; fit errors propagate.
  Provider(const Dataset& data, const ProviderConfig& config);

  Dataset Sample(std::size_t n, std::optional<uint64_t> seed) override;
  MetricsResponse Metrics(const Dataset& synth) override;
  CallStats Stats() override;

  const Schema& schema() const { return train_.schema(); }
  Metric metric() const { return evaluator_->metric(); }
  const GeneratorModel& model() const { return *model_; }
  std::size_t train_size() const { return train_.num_rows(); }

 private:
  friend const Dataset& harness::HiddenTrain(const Provider&);
  friend const Dataset& harness::HiddenTest(const Provider&);
  void Charge();

  ProviderConfig config_;
  Dataset train_;
  Dataset test_;
  std::shared_ptr<const GeneratorModel> model_;
  std::unique_ptr<MetricsEvaluator> evaluator_;
  std::unique_ptr<NnIndex> train_index_;
  double outlier_threshold_ = 0.0;
  std::atomic<std::size_t> sample_calls_{0};
  std::atomic<std::size_t> metric_calls_{0};
  std::atomic<std::size_t> charged_{0};
  std::atomic<uint64_t> unseeded_{0};
};

// Passes calls through to another client while keeping its own ledger, so a
// harness can check that an attack's reported usage matches what reached the
// provider.
class AuditingClient : public ProviderClient {
 public:
  explicit AuditingClient(ProviderClient& inner) : inner_(inner) {}
  Dataset Sample(std::size_t n, std::optional<uint64_t> seed) override;
  MetricsResponse Metrics(const Dataset& synth) override;
  CallStats Stats() override;
  CallStats observed() const { return {samples_, metrics_}; }

 private:
  ProviderClient& inner_;
  std::size_t samples_ = 0;
  std::size_t metrics_ = 0;
};

// ---------------------------------------------------------------------------
// HTTP facade.
//
//   POST /v1/sample   {"n": int, "seed": int?}  -> {"records": [...], "schema": [...]}
//   POST /v1/metrics  {"records": [[...], ...]} -> {"flags": {...}, "scores": {...}|null}
//   GET  /v1/stats                              -> {"sample_calls": int, "metric_calls": int}
//
// Categorical cells travel as labels, continuous cells as JSON numbers.
// Errors: 400 schema mismatch or bad request values, 422 malformed JSON,
// 429 quota exhausted.

class ProviderServer {
 public:
  explicit ProviderServer(Provider& provider);
  ~ProviderServer();
  ProviderServer(const ProviderServer&) = delete;
  ProviderServer& operator=(const ProviderServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  // Returns the bound port.
  int Start(const std::string& host, int port);
  // Binds and serves on the calling thread until Stop() is called elsewhere.
  // `on_bound` receives the port before serving starts.
  void Run(const std::string& host, int port,
           const std::function<void(int)>& on_bound);
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class RemoteProvider : public ProviderClient {
 public:
  RemoteProvider(const std::string& host, int port);
  ~RemoteProvider() override;

  Dataset Sample(std::size_t n, std::optional<uint64_t> seed) override;
  MetricsResponse Metrics(const Dataset& synth) override;
  CallStats Stats() override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// "host:port" -> (host, port). Throws InvalidArgument when malformed.
std::pair<std::string, int> ParseBindAddress(const std::string& address);

// ---------------------------------------------------------------------------
// Wire encoding, shared by the server, the client and the CLI.

std::string SchemaToJson(const Schema& schema);
Schema SchemaFromJson(const std::string& text);
// {"records": [...], "schema": [...]}
std::string EncodeSampleResponse(const Dataset& ds);
Dataset DecodeSampleResponse(const std::string& text);
// {"records": [...]} decoded against a known schema.
std::string EncodeRecords(const Dataset& ds);
Dataset DecodeRecords(const std::string& text, const Schema& schema);
std::string EncodeMetricsResponse(const MetricsResponse& response);
MetricsResponse DecodeMetricsResponse(const std::string& text);
std::string EncodeStats(const CallStats& stats);
CallStats DecodeStats(const std::string& text);

}  // namespace synthaudit

#endif  // SYNTHAUDIT_PROVIDER_H_
