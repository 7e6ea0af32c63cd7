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

#include "synthaudit/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "synthaudit/errors.h"

namespace synthaudit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Running nearest / second-nearest with lowest-index tie breaking.
struct Best2 {
  double d1 = kInf, d2 = kInf;
  std::size_t i1 = 0;
  void Offer(double d, std::size_t i) {
    if (d < d1) {
      d2 = d1;
      d1 = d;
      i1 = i;
    } else if (d < d2) {
      d2 = d;
    }
  }
};

struct Statistics {
  double pct5, mean;
};

Statistics Summarize(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return {Percentile(values, 5.0), sum / static_cast<double>(values.size())};
}

}  // namespace

std::string_view MetricName(Metric metric) {
  return metric == Metric::kHamming ? "hamming" : "euclidean";
}

Metric ParseMetric(std::string_view name) {
  if (name == "hamming") return Metric::kHamming;
  if (name == "euclidean") return Metric::kEuclidean;
  throw InvalidArgument("unknown metric '" + std::string(name) +
                        "' (expected hamming or euclidean)");
}

Metric DefaultMetric(const Schema& schema) {
  bool any_cat = false, any_num = false;
  for (const ColumnSchema& c : schema) (c.categorical() ? any_cat : any_num) = true;
  if (any_cat && any_num) {
    throw InvalidArgument(
        "mixed categorical/continuous schema has no distance; discretize first");
  }
  return any_num ? Metric::kEuclidean : Metric::kHamming;
}

NnIndex::NnIndex(const Dataset& reference, Metric metric)
    : reference_(reference), metric_(metric) {
  if (reference.num_rows() < 2) {
    throw InvalidArgument("nearest-neighbor reference needs at least 2 rows");
  }
  if (metric == Metric::kEuclidean && !reference.AllContinuous()) {
    throw InvalidArgument("euclidean distance needs continuous columns");
  }
  if (metric == Metric::kHamming) {
    packed_ = reference.AllCategorical();
    for (const ColumnSchema& c : reference.schema()) {
      if (c.cardinality() > 256) packed_ = false;
    }
    if (packed_) {
      bytes_.resize(reference.values().size());
      for (std::size_t i = 0; i < bytes_.size(); ++i) {
        bytes_[i] = static_cast<uint8_t>(reference.values()[i]);
      }
    }
  }
}

NnResult NnIndex::Query(std::span<const double> row) const {
  const std::size_t d = reference_.num_cols();
  const std::size_t n = reference_.num_rows();
  Best2 best;
  if (packed_) {
    uint8_t q[256];
    std::vector<uint8_t> wide;
    uint8_t* qp = q;
    if (d > sizeof(q)) {
      wide.resize(d);
      qp = wide.data();
    }
    for (std::size_t j = 0; j < d; ++j) qp[j] = static_cast<uint8_t>(row[j]);
    const uint8_t* r = bytes_.data();
    for (std::size_t i = 0; i < n; ++i, r += d) {
      unsigned mismatches = 0;
      for (std::size_t j = 0; j < d; ++j) mismatches += r[j] != qp[j];
      best.Offer(static_cast<double>(mismatches), i);
    }
  } else if (metric_ == Metric::kHamming) {
    const double* r = reference_.values().data();
    for (std::size_t i = 0; i < n; ++i, r += d) {
      unsigned mismatches = 0;
      for (std::size_t j = 0; j < d; ++j) mismatches += r[j] != row[j];
      best.Offer(static_cast<double>(mismatches), i);
    }
  } else {
    // Compare squared distances; sqrt is monotone so ties are preserved.
    const double* r = reference_.values().data();
    for (std::size_t i = 0; i < n; ++i, r += d) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        double t = r[j] - row[j];
        s += t * t;
      }
      best.Offer(s, i);
    }
    best.d1 = std::sqrt(best.d1);
    best.d2 = std::sqrt(best.d2);
  }
  return {best.d1, best.d2, best.i1};
}

std::vector<NnResult> NnIndex::QueryAll(const Dataset& query) const {
  RequireSameSchema(reference_.schema(), query.schema(), "nearest-neighbor query");
  std::vector<NnResult> out;
  out.reserve(query.num_rows());
  for (std::size_t i = 0; i < query.num_rows(); ++i) out.push_back(Query(query.row(i)));
  return out;
}

std::vector<NnResult> NnDistances(const Dataset& query,
                                  const Dataset& reference, Metric metric) {
  return NnIndex(reference, metric).QueryAll(query);
}

double DistanceRatio(const NnResult& nn) {
  if (nn.d2 == 0.0) return 1.0;
  return nn.d1 / nn.d2;
}

double Percentile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("percentile of an empty sample");
  if (!(p >= 0.0 && p <= 100.0)) {
    throw InvalidArgument("percentile must lie in [0, 100]");
  }
  std::sort(values.begin(), values.end());
  double rank = p / 100.0 * static_cast<double>(values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  if (lo + 1 >= values.size()) return values.back();
  double frac = rank - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

RecordSet::RecordSet(const Dataset& ds) {
  keys_.reserve(ds.num_rows());
  for (std::size_t i = 0; i < ds.num_rows(); ++i) keys_.insert(RecordKey(ds.row(i)));
}

bool RecordSet::Contains(std::span<const double> row) const {
  return keys_.contains(RecordKey(row));
}

std::size_t ImsMatches(const Dataset& train, const Dataset& synth) {
  RequireSameSchema(train.schema(), synth.schema(), "identical match share");
  RecordSet keys(train);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < synth.num_rows(); ++i) matches += keys.Contains(synth.row(i));
  return matches;
}

double ImsShare(const Dataset& train, const Dataset& synth) {
  if (synth.empty()) throw InvalidArgument("identical match share of an empty dataset");
  return static_cast<double>(ImsMatches(train, synth)) /
         static_cast<double>(synth.num_rows());
}

MetricsEvaluator::MetricsEvaluator(Dataset train, Dataset test, Metric metric)
    : index_(train, metric), train_keys_(train) {
  RequireSameSchema(train.schema(), test.schema(), "train/test");
  if (test.num_rows() < 2) throw InvalidArgument("test set needs at least 2 rows");
  std::vector<double> d1, ratio;
  std::size_t matches = 0;
  for (std::size_t i = 0; i < test.num_rows(); ++i) {
    NnResult nn = index_.Query(test.row(i));
    d1.push_back(nn.d1);
    ratio.push_back(DistanceRatio(nn));
    matches += train_keys_.Contains(test.row(i));
  }
  share_test_ = static_cast<double>(matches) / static_cast<double>(test.num_rows());
  Statistics dcr = Summarize(d1), nndr = Summarize(ratio);
  dcr_pct5_test_ = dcr.pct5;
  dcr_mean_test_ = dcr.mean;
  nndr_pct5_test_ = nndr.pct5;
  nndr_mean_test_ = nndr.mean;
}

PrivacyReport MetricsEvaluator::Evaluate(const Dataset& synth) const {
  RequireSameSchema(schema(), synth.schema(), "synthetic data");
  if (synth.empty()) throw InvalidArgument("cannot evaluate an empty synthetic dataset");
  // Repeated rows are common (padding copies); query each distinct row once.
  std::unordered_map<std::string, std::pair<NnResult, bool>> seen;
  std::vector<double> d1, ratio;
  d1.reserve(synth.num_rows());
  ratio.reserve(synth.num_rows());
  std::size_t matches = 0;
  for (std::size_t i = 0; i < synth.num_rows(); ++i) {
    auto row = synth.row(i);
    auto [it, fresh] = seen.try_emplace(RecordKey(row));
    if (fresh) it->second = {index_.Query(row), train_keys_.Contains(row)};
    const auto& [nn, match] = it->second;
    d1.push_back(nn.d1);
    ratio.push_back(DistanceRatio(nn));
    matches += match;
  }
  PrivacyReport r;
  r.ims.share_synth = static_cast<double>(matches) / static_cast<double>(synth.num_rows());
  r.ims.share_test = share_test_;
  r.ims.pass = r.ims.share_synth <= r.ims.share_test;
  Statistics dcr = Summarize(d1), nndr = Summarize(ratio);
  r.dcr = {dcr.pct5, dcr_pct5_test_, dcr.mean, dcr_mean_test_,
           dcr.pct5 >= dcr_pct5_test_};
  r.nndr = {nndr.pct5, nndr_pct5_test_, nndr.mean, nndr_mean_test_,
            nndr.pct5 >= nndr_pct5_test_};
  r.all_pass = r.ims.pass && r.dcr.pass && r.nndr.pass;
  return r;
}

PrivacyReport EvaluatePrivacy(const Dataset& train, const Dataset& test,
                              const Dataset& synth, Metric metric) {
  return MetricsEvaluator(train, test, metric).Evaluate(synth);
}

Dataset SimilarityFilter(const Dataset& train, const Dataset& synth,
                         double tau, Metric metric) {
  if (!(tau >= 0.0)) throw InvalidArgument("similarity threshold must be >= 0");
  RequireSameSchema(train.schema(), synth.schema(), "similarity filter");
  std::vector<std::size_t> keep;
  if (tau == 0.0) {
    // d1 <= 0 is an exact match on canonical values.
    RecordSet keys(train);
    for (std::size_t i = 0; i < synth.num_rows(); ++i) {
      if (!keys.Contains(synth.row(i))) keep.push_back(i);
    }
  } else {
    NnIndex index(train, metric);
    for (std::size_t i = 0; i < synth.num_rows(); ++i) {
      if (index.Query(synth.row(i)).d1 > tau) keep.push_back(i);
    }
  }
  return synth.Select(keep);
}

double OutlierThreshold(const Dataset& train, double p, Metric metric) {
  if (!(p > 0.0 && p < 100.0)) throw InvalidArgument("percentile must lie in (0, 100)");
  NnIndex index(train, metric);
  // Each row finds itself (or an identical copy) first, so d2 is its
  // leave-self-out nearest distance.
  std::vector<double> loo;
  for (std::size_t i = 0; i < train.num_rows(); ++i) loo.push_back(index.Query(train.row(i)).d2);
  return Percentile(std::move(loo), p);
}

Dataset OutlierFilterWithThreshold(const NnIndex& train_index,
                                   const Dataset& synth, double threshold) {
  RequireSameSchema(train_index.reference().schema(), synth.schema(), "outlier filter");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < synth.num_rows(); ++i) {
    if (train_index.Query(synth.row(i)).d1 <= threshold) keep.push_back(i);
  }
  return synth.Select(keep);
}

Dataset OutlierFilter(const Dataset& train, const Dataset& synth, double p,
                      Metric metric) {
  double threshold = OutlierThreshold(train, p, metric);
  return OutlierFilterWithThreshold(NnIndex(train, metric), synth, threshold);
}

double KthNeighborDistance(const Dataset& reference, std::span<const double> row,
                           std::size_t k, Metric metric) {
  if (k == 0 || k > reference.num_rows()) {
    throw InvalidArgument("k must lie in [1, reference rows]");
  }
  const std::size_t d = reference.num_cols();
  std::vector<double> dist(reference.num_rows());
  for (std::size_t i = 0; i < reference.num_rows(); ++i) {
    auto r = reference.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (metric == Metric::kHamming) {
        s += r[j] != row[j];
      } else {
        double t = r[j] - row[j];
        s += t * t;
      }
    }
    dist[i] = metric == Metric::kHamming ? s : std::sqrt(s);
  }
  std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
  return dist[k - 1];
}

double DensityOutlierThreshold(const Dataset& train, double p, std::size_t k,
                               Metric metric) {
  if (!(p > 0.0 && p < 100.0)) throw InvalidArgument("percentile must lie in (0, 100)");
  if (train.num_rows() < k + 1) throw InvalidArgument("train needs more than k rows");
  // The (k+1)-th neighbor of a train row, counting itself, is its k-th
  // leave-self-out neighbor.
  std::vector<double> scores;
  for (std::size_t i = 0; i < train.num_rows(); ++i) {
    scores.push_back(KthNeighborDistance(train, train.row(i), k + 1, metric));
  }
  return Percentile(std::move(scores), p);
}

Dataset DensityOutlierFilter(const Dataset& train, const Dataset& synth,
                             double p, std::size_t k, Metric metric) {
  RequireSameSchema(train.schema(), synth.schema(), "outlier filter");
  const double threshold = DensityOutlierThreshold(train, p, k, metric);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < synth.num_rows(); ++i) {
    if (KthNeighborDistance(train, synth.row(i), k, metric) <= threshold) {
      keep.push_back(i);
    }
  }
  return synth.Select(keep);
}

}  // namespace synthaudit
