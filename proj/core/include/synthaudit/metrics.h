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

// Nearest-neighbor kernels, the similarity-based privacy tests (identical
// match share, distance to closest record, nearest-neighbor distance ratio)
// and the similarity and outlier filters.

#ifndef SYNTHAUDIT_METRICS_H_
#define SYNTHAUDIT_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "synthaudit/tabular.h"

namespace synthaudit {

enum class Metric { kHamming, kEuclidean };

std::string_view MetricName(Metric metric);
Metric ParseMetric(std::string_view name);

// Hamming for all-categorical schemas, Euclidean for all-continuous ones.
// Mixed schemas throw InvalidArgument.
Metric DefaultMetric(const Schema& schema);

struct NnResult {
  double d1 = 0.0;
  double d2 = 0.0;
  std::size_t nn_index = 0;

  friend bool operator==(const NnResult&, const NnResult&) = default;
};

// Exact brute-force nearest and second-nearest neighbors against a fixed
// reference set. Ties go to the lowest reference index; d2 may equal d1 when
// the reference holds duplicates.
class NnIndex {
 public:
  // Throws InvalidArgument if the reference has fewer than 2 rows or the
  // metric does not fit the schema.
  NnIndex(const Dataset& reference, Metric metric);

  NnResult Query(std::span<const double> row) const;
  std::vector<NnResult> QueryAll(const Dataset& query) const;

  Metric metric() const { return metric_; }
  const Dataset& reference() const { return reference_; }

 private:
  Dataset reference_;
  Metric metric_;
  // Byte-packed categorical codes when every cardinality fits in a byte.
  bool packed_ = false;
  std::vector<uint8_t> bytes_;
};

std::vector<NnResult> NnDistances(const Dataset& query,
                                  const Dataset& reference, Metric metric);

// d1 / d2, with d2 = 0 mapped to 1.
double DistanceRatio(const NnResult& nn);

// Linear interpolation between order statistics at rank p/100 * (m - 1).
// Throws InvalidArgument on empty input or p outside [0, 100].
double Percentile(std::vector<double> values, double p);

// Exact-match membership on canonical record keys.
class RecordSet {
 public:
  RecordSet() = default;
  explicit RecordSet(const Dataset& ds);
  bool Contains(std::span<const double> row) const;
  std::size_t size() const { return keys_.size(); }

 private:
  std::unordered_set<std::string> keys_;
};

// Number / fraction of synth rows with an exact train match.
std::size_t ImsMatches(const Dataset& train, const Dataset& synth);
double ImsShare(const Dataset& train, const Dataset& synth);

struct ImsStats {
  double share_synth = 0.0;
  double share_test = 0.0;
  bool pass = false;
};

struct DistanceStats {
  double pct5_synth = 0.0;
  double pct5_test = 0.0;
  double mean_synth = 0.0;
  double mean_test = 0.0;
  bool pass = false;
};

struct PrivacyReport {
  ImsStats ims;
  DistanceStats dcr;
  DistanceStats nndr;
  bool all_pass = false;
};

// Evaluates synthetic datasets against a fixed (train, test) pair. The
// train index and the train-vs-test statistics are computed once; every
// Evaluate call recomputes the synthetic side in full.
class MetricsEvaluator {
 public:
  MetricsEvaluator(Dataset train, Dataset test, Metric metric);

  PrivacyReport Evaluate(const Dataset& synth) const;

  Metric metric() const { return index_.metric(); }
  const Schema& schema() const { return index_.reference().schema(); }

 private:
  NnIndex index_;
  RecordSet train_keys_;
  double share_test_ = 0.0;
  double dcr_pct5_test_ = 0.0, dcr_mean_test_ = 0.0;
  double nndr_pct5_test_ = 0.0, nndr_mean_test_ = 0.0;
};

// One-shot convenience over MetricsEvaluator.
PrivacyReport EvaluatePrivacy(const Dataset& train, const Dataset& test,
                              const Dataset& synth, Metric metric);

// Drops synth rows whose nearest train distance is <= tau; keeps order.
Dataset SimilarityFilter(const Dataset& train, const Dataset& synth,
                         double tau, Metric metric);

// p-th percentile of leave-self-out nearest-neighbor distances within train.
double OutlierThreshold(const Dataset& train, double p, Metric metric);

// Drops synth rows whose nearest train distance exceeds
// OutlierThreshold(train, p).
Dataset OutlierFilter(const Dataset& train, const Dataset& synth, double p,
                      Metric metric);
Dataset OutlierFilterWithThreshold(const NnIndex& train_index,
                                   const Dataset& synth, double threshold);

// Distance from `row` to its k-th nearest row of `reference` (k >= 1).
double KthNeighborDistance(const Dataset& reference, std::span<const double> row,
                           std::size_t k, Metric metric);

// Density form of the outlier filter: rows are scored by the distance to
// their k-th nearest train record rather than the nearest, so a synthetic
// row hugging an isolated train record still counts as an outlier. With
// k = 1 this is OutlierFilter.
double DensityOutlierThreshold(const Dataset& train, double p, std::size_t k,
                               Metric metric);
Dataset DensityOutlierFilter(const Dataset& train, const Dataset& synth,
                             double p, std::size_t k, Metric metric);

// Stable JSON object with the PrivacyReport field names.
std::string ReportToJson(const PrivacyReport& report);

}  // namespace synthaudit

#endif  // SYNTHAUDIT_METRICS_H_
