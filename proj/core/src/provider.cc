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

#include "synthaudit/errors.h"
#include "synthaudit/random.h"

namespace synthaudit {

namespace harness {
const Dataset& HiddenTrain(const Provider& provider) { return provider.train_; }
const Dataset& HiddenTest(const Provider& provider) { return provider.test_; }
}  // namespace harness

Provider::Provider(const Dataset& data, const ProviderConfig& config)
    : config_(config) {
  std::tie(train_, test_) = Split(data, DeriveSeed(config.seed, "provider_split"));
  model_ = FitModel(config.model, train_, config.dp,
                    DeriveSeed(config.seed, "provider_fit"));
  RequireSameSchema(train_.schema(), model_->schema(), "model");
  Metric metric = config.metric.value_or(DefaultMetric(train_.schema()));
  evaluator_ = std::make_unique<MetricsEvaluator>(train_, test_, metric);
  if (config.filters.outlier_percentile) {
    train_index_ = std::make_unique<NnIndex>(train_, metric);
    outlier_threshold_ =
        OutlierThreshold(train_, *config.filters.outlier_percentile, metric);
  }
  if (config.filters.similarity_tau && *config.filters.similarity_tau < 0.0) {
    throw InvalidArgument("similarity threshold must be >= 0");
  }
}

void Provider::Charge() {
  std::size_t used = charged_.fetch_add(1);
  if (config_.quota && used >= *config_.quota) {
    charged_.fetch_sub(1);
    throw QuotaExceeded("call quota of " + std::to_string(*config_.quota) +
                        " exhausted");
  }
}

Dataset Provider::Sample(std::size_t n, std::optional<uint64_t> seed) {
  Charge();
  uint64_t s = seed ? *seed
                    : DeriveSeed(config_.seed, "provider_sample",
                                 unseeded_.fetch_add(1));
  Dataset out = model_->Sample(n, s);
  const FilterConfig& f = config_.filters;
  if (f.similarity_tau) {
    out = SimilarityFilter(train_, out, *f.similarity_tau, metric());
  }
  if (f.outlier_percentile) {
    out = OutlierFilterWithThreshold(*train_index_, out, outlier_threshold_);
  }
  sample_calls_.fetch_add(1);
  return out.WithProvenance("provider_sample");
}

MetricsResponse Provider::Metrics(const Dataset& synth) {
  Charge();
  PrivacyReport report;
  try {
    report = evaluator_->Evaluate(synth);
  } catch (...) {
    charged_.fetch_sub(1);
    throw;
  }
  metric_calls_.fetch_add(1);
  MetricsResponse response{report.ims.pass, report.dcr.pass, report.nndr.pass,
                           std::nullopt};
  if (report.all_pass) response.scores = report;
  return response;
}

CallStats Provider::Stats() {
  return {sample_calls_.load(), metric_calls_.load()};
}

Dataset AuditingClient::Sample(std::size_t n, std::optional<uint64_t> seed) {
  Dataset out = inner_.Sample(n, seed);
  ++samples_;
  return out;
}

MetricsResponse AuditingClient::Metrics(const Dataset& synth) {
  MetricsResponse out = inner_.Metrics(synth);
  ++metrics_;
  return out;
}

CallStats AuditingClient::Stats() { return inner_.Stats(); }

}  // namespace synthaudit
