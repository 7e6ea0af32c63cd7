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

// Diagonal-covariance Gaussian mixtures fitted by expectation-maximization.
// Categorical columns are one-hot encoded before fitting.

#ifndef SYNTHAUDIT_MIXTURE_H_
#define SYNTHAUDIT_MIXTURE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "synthaudit/tabular.h"

namespace synthaudit {

// Maps rows of a fixed schema to dense feature vectors: reals pass through,
// categorical codes expand to one-hot blocks.
class FeatureEncoder {
 public:
  FeatureEncoder() = default;
  explicit FeatureEncoder(const Schema& schema);

  std::size_t width() const { return width_; }
  const Schema& schema() const { return schema_; }
  void Encode(std::span<const double> row, std::span<double> out) const;
  std::vector<double> EncodeAll(const Dataset& ds) const;

 private:
  Schema schema_;
  std::vector<std::size_t> offsets_;
  std::size_t width_ = 0;
};

struct GmmOptions {
  std::size_t max_iters = 200;
  // Stop once the mean per-row log-likelihood improves by less than this.
  double tol = 1e-6;
  uint64_t seed = 0;
  double variance_floor = 1e-6;
};

class GmmModel {
 public:
  std::size_t k() const { return weights_.size(); }
  std::size_t dim() const { return encoder_.width(); }
  const FeatureEncoder& encoder() const { return encoder_; }
  const std::vector<double>& weights() const { return weights_; }
  // Row-major k x dim.
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& variances() const { return variances_; }
  std::span<const double> mean(std::size_t c) const {
    return {means_.data() + c * dim(), dim()};
  }
  // Total log-likelihood after each EM iteration (non-decreasing).
  const std::vector<double>& log_likelihood_trace() const {
    return ll_trace_;
  }
  std::size_t iterations() const { return ll_trace_.size(); }
  double variance_floor() const { return variance_floor_; }

  // log(w_c) + log N(x | c) for every component, for one encoded row.
  void ComponentLogDensities(std::span<const double> x,
                             std::span<double> out) const;

 private:
  friend GmmModel FitGmm(const Dataset&, std::size_t, const GmmOptions&);
  friend GmmModel MakeGmmForTesting(const Schema&, std::vector<double>,
                                    std::vector<double>, std::vector<double>);
  void RefreshNormalizers();

  FeatureEncoder encoder_;
  std::vector<double> weights_;
  std::vector<double> means_;
  std::vector<double> variances_;
  std::vector<double> log_norm_;  // per component: log w - 0.5 sum log(2 pi var)
  std::vector<double> ll_trace_;
  double variance_floor_ = 1e-6;
};

// EM with k-means++ seeding. Throws InvalidArgument if k == 0 or the dataset
// has fewer rows than components; throws std::logic_error if the
// log-likelihood ever decreases beyond rounding noise.
GmmModel FitGmm(const Dataset& points, std::size_t k,
                const GmmOptions& options = {});

// Builds a model from explicit parameters (weights, row-major means and
// variances); used by tests that need hand-placed components.
GmmModel MakeGmmForTesting(const Schema& schema, std::vector<double> weights,
                           std::vector<double> means,
                           std::vector<double> variances);

// Per-row argmax-responsibility label; ties go to the lowest component index.
std::vector<int> Predict(const GmmModel& model, const Dataset& points);

// Per-row mixture log-density log p(x).
std::vector<double> LogDensity(const GmmModel& model, const Dataset& points);

// Row-major n x k posterior responsibilities.
std::vector<double> Responsibilities(const GmmModel& model,
                                     const Dataset& points);

// Cluster ids chosen greedily smallest-first (ties by lower id) while the
// running total stays within `budget`. Empty clusters are never selected.
std::vector<int> SmallestClusters(std::size_t k,
                                  std::span<const int> assignments,
                                  std::size_t budget);
std::vector<int> SmallestClustersBySize(std::span<const std::size_t> sizes,
                                        std::size_t budget);

}  // namespace synthaudit

#endif  // SYNTHAUDIT_MIXTURE_H_
