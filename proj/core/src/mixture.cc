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

#include "synthaudit/mixture.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "synthaudit/errors.h"
#include "synthaudit/random.h"

namespace synthaudit {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogSumExp(std::span<const double> v) {
  double m = *std::max_element(v.begin(), v.end());
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double SquaredDistance(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

// k-means++ seeding: returns k row indices.
std::vector<std::size_t> SeedCenters(const std::vector<double>& x,
                                     std::size_t n, std::size_t d,
                                     std::size_t k, Rng& rng) {
  std::vector<std::size_t> centers;
  centers.push_back(static_cast<std::size_t>(SampleUniform(rng) * n));
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    const double* c = x.data() + centers.back() * d;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], SquaredDistance(x.data() + i * d, c, d));
      total += best[i];
    }
    std::size_t pick;
    if (total <= 0.0) {
      // Fewer distinct points than components; fall back to uniform picks.
      pick = static_cast<std::size_t>(SampleUniform(rng) * n);
    } else {
      double u = SampleUniform(rng) * total;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        u -= best[i];
        if (u < 0.0) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(pick);
  }
  return centers;
}

}  // namespace

FeatureEncoder::FeatureEncoder(const Schema& schema) : schema_(schema) {
  offsets_.reserve(schema.size());
  for (const ColumnSchema& col : schema) {
    offsets_.push_back(width_);
    width_ += col.categorical() ? col.cardinality() : 1;
  }
}

void FeatureEncoder::Encode(std::span<const double> row,
                            std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].categorical()) {
      out[offsets_[c] + static_cast<std::size_t>(row[c])] = 1.0;
    } else {
      out[offsets_[c]] = row[c];
    }
  }
}

std::vector<double> FeatureEncoder::EncodeAll(const Dataset& ds) const {
  RequireSameSchema(schema_, ds.schema(), "mixture input");
  std::vector<double> out(ds.num_rows() * width_);
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    Encode(ds.row(i), {out.data() + i * width_, width_});
  }
  return out;
}

void GmmModel::RefreshNormalizers() {
  const std::size_t d = dim();
  log_norm_.assign(k(), 0.0);
  for (std::size_t c = 0; c < k(); ++c) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      s += std::log(2.0 * std::numbers::pi * variances_[c * d + j]);
    }
    log_norm_[c] =
        (weights_[c] > 0.0 ? std::log(weights_[c]) : kNegInf) - 0.5 * s;
  }
}

void GmmModel::ComponentLogDensities(std::span<const double> x,
                                     std::span<double> out) const {
  const std::size_t d = dim();
  for (std::size_t c = 0; c < k(); ++c) {
    const double* mu = means_.data() + c * d;
    const double* var = variances_.data() + c * d;
    double q = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double t = x[j] - mu[j];
      q += t * t / var[j];
    }
    out[c] = log_norm_[c] - 0.5 * q;
  }
}

GmmModel FitGmm(const Dataset& points, std::size_t k,
                const GmmOptions& options) {
  if (k == 0) throw InvalidArgument("mixture needs at least one component");
  if (points.num_rows() < k) {
    throw InvalidArgument("mixture with " + std::to_string(k) +
                          " components needs at least that many points, got " +
                          std::to_string(points.num_rows()));
  }
  GmmModel model;
  model.encoder_ = FeatureEncoder(points.schema());
  model.variance_floor_ = options.variance_floor;
  const std::size_t n = points.num_rows();
  const std::size_t d = model.encoder_.width();
  const std::vector<double> x = model.encoder_.EncodeAll(points);

  // Initialization: k-means++ centers, shared global variance, equal weights.
  Rng rng = MakeRng(options.seed, "gmm_init");
  std::vector<std::size_t> centers = SeedCenters(x, n, d, k, rng);
  std::vector<double> global_mean(d, 0.0), global_var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) global_mean[j] += x[i * d + j];
  }
  for (double& m : global_mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double t = x[i * d + j] - global_mean[j];
      global_var[j] += t * t;
    }
  }
  model.weights_.assign(k, 1.0 / static_cast<double>(k));
  model.means_.resize(k * d);
  model.variances_.resize(k * d);
  for (std::size_t c = 0; c < k; ++c) {
    std::copy_n(x.begin() + centers[c] * d, d, model.means_.begin() + c * d);
    for (std::size_t j = 0; j < d; ++j) {
      model.variances_[c * d + j] = std::max(
          global_var[j] / static_cast<double>(n), options.variance_floor);
    }
  }
  model.RefreshNormalizers();

  std::vector<double> resp(n * k);
  std::vector<double> nk(k);
  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    // E-step.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::span<double> r(resp.data() + i * k, k);
      model.ComponentLogDensities({x.data() + i * d, d}, r);
      double lse = LogSumExp(r);
      ll += lse;
      for (double& v : r) v = std::exp(v - lse);
    }
    if (!model.ll_trace_.empty()) {
      double prev = model.ll_trace_.back();
      double slack = 1e-9 * std::max(1.0, std::fabs(prev));
      if (ll < prev - slack) {
        throw std::logic_error("EM log-likelihood decreased from " +
                               std::to_string(prev) + " to " +
                               std::to_string(ll));
      }
    }
    model.ll_trace_.push_back(ll);
    std::size_t t = model.ll_trace_.size();
    if (t >= 2 && (model.ll_trace_[t - 1] - model.ll_trace_[t - 2]) /
                          static_cast<double>(n) <
                      options.tol) {
      break;
    }
    if (iter + 1 == options.max_iters) break;

    // M-step.
    std::fill(nk.begin(), nk.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) nk[c] += resp[i * k + c];
    }
    for (std::size_t c = 0; c < k; ++c) {
      model.weights_[c] = nk[c] / static_cast<double>(n);
      // A component that lost all mass keeps its previous shape.
      if (nk[c] <= 1e-300) continue;
      double* mu = model.means_.data() + c * d;
      double* var = model.variances_.data() + c * d;
      std::fill(mu, mu + d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double r = resp[i * k + c];
        if (r == 0.0) continue;
        for (std::size_t j = 0; j < d; ++j) mu[j] += r * x[i * d + j];
      }
      for (std::size_t j = 0; j < d; ++j) mu[j] /= nk[c];
      std::fill(var, var + d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double r = resp[i * k + c];
        if (r == 0.0) continue;
        for (std::size_t j = 0; j < d; ++j) {
          double e = x[i * d + j] - mu[j];
          var[j] += r * e * e;
        }
      }
      for (std::size_t j = 0; j < d; ++j) {
        var[j] = std::max(var[j] / nk[c], options.variance_floor);
      }
    }
    double wsum = std::accumulate(model.weights_.begin(),
                                  model.weights_.end(), 0.0);
    for (double& w : model.weights_) w /= wsum;
    model.RefreshNormalizers();
  }
  return model;
}

GmmModel MakeGmmForTesting(const Schema& schema, std::vector<double> weights,
                           std::vector<double> means,
                           std::vector<double> variances) {
  GmmModel model;
  model.encoder_ = FeatureEncoder(schema);
  const std::size_t d = model.encoder_.width();
  if (weights.empty() || means.size() != weights.size() * d ||
      variances.size() != weights.size() * d) {
    throw InvalidArgument("mixture parameter shapes do not match");
  }
  model.weights_ = std::move(weights);
  model.means_ = std::move(means);
  model.variances_ = std::move(variances);
  model.RefreshNormalizers();
  return model;
}

std::vector<int> Predict(const GmmModel& model, const Dataset& points) {
  const std::size_t d = model.dim(), k = model.k();
  std::vector<double> x = model.encoder().EncodeAll(points);
  std::vector<double> lp(k);
  std::vector<int> labels(points.num_rows());
  for (std::size_t i = 0; i < points.num_rows(); ++i) {
    model.ComponentLogDensities({x.data() + i * d, d}, lp);
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (lp[c] > lp[best]) best = c;
    }
    labels[i] = static_cast<int>(best);
  }
  return labels;
}

std::vector<double> LogDensity(const GmmModel& model, const Dataset& points) {
  const std::size_t d = model.dim(), k = model.k();
  std::vector<double> x = model.encoder().EncodeAll(points);
  std::vector<double> lp(k);
  std::vector<double> out(points.num_rows());
  for (std::size_t i = 0; i < points.num_rows(); ++i) {
    model.ComponentLogDensities({x.data() + i * d, d}, lp);
    out[i] = LogSumExp(lp);
  }
  return out;
}

std::vector<double> Responsibilities(const GmmModel& model,
                                     const Dataset& points) {
  const std::size_t d = model.dim(), k = model.k();
  std::vector<double> x = model.encoder().EncodeAll(points);
  std::vector<double> out(points.num_rows() * k);
  for (std::size_t i = 0; i < points.num_rows(); ++i) {
    std::span<double> r(out.data() + i * k, k);
    model.ComponentLogDensities({x.data() + i * d, d}, r);
    double lse = LogSumExp(r);
    for (double& v : r) v = std::exp(v - lse);
  }
  return out;
}

std::vector<int> SmallestClustersBySize(std::span<const std::size_t> sizes,
                                        std::size_t budget) {
  std::vector<int> order;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] > 0) order.push_back(static_cast<int>(c));
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return sizes[a] < sizes[b]; });
  std::vector<int> chosen;
  std::size_t total = 0;
  for (int c : order) {
    if (total + sizes[c] > budget) break;
    total += sizes[c];
    chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<int> SmallestClusters(std::size_t k,
                                  std::span<const int> assignments,
                                  std::size_t budget) {
  std::vector<std::size_t> sizes(k, 0);
  for (int a : assignments) {
    if (a < 0 || static_cast<std::size_t>(a) >= k) {
      throw InvalidArgument("cluster assignment out of range");
    }
    ++sizes[a];
  }
  return SmallestClustersBySize(sizes, budget);
}

}  // namespace synthaudit
