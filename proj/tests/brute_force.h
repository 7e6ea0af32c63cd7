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

// Deliberately naive reimplementations used as test oracles. Nothing here
// shares code with the library beyond the Dataset container.

#ifndef SYNTHAUDIT_TESTS_BRUTE_FORCE_H_
#define SYNTHAUDIT_TESTS_BRUTE_FORCE_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "synthaudit/tabular.h"

namespace synthaudit::brute {

inline double Hamming(std::span<const double> a, std::span<const double> b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i] ? 1 : 0;
  return d;
}

inline double Euclidean(std::span<const double> a, std::span<const double> b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    long double t = static_cast<long double>(a[i]) - b[i];
    s += t * t;
  }
  return static_cast<double>(std::sqrt(s));
}

struct Nn {
  double d1;
  double d2;
  std::size_t index;
};

// Sorts every (distance, index) pair; the first is the nearest with ties to
// the lowest index.
inline Nn Nearest(const Dataset& ref, std::span<const double> q,
                  bool hamming) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t j = 0; j < ref.num_rows(); ++j) {
    all.push_back({hamming ? Hamming(ref.row(j), q) : Euclidean(ref.row(j), q),
                   j});
  }
  std::sort(all.begin(), all.end());
  return {all[0].first, all[1].first, all[0].second};
}

inline double MatchShare(const Dataset& train, const Dataset& synth) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < synth.num_rows(); ++i) {
    for (std::size_t j = 0; j < train.num_rows(); ++j) {
      bool same = true;
      for (std::size_t c = 0; c < train.num_cols() && same; ++c) {
        same = synth.at(i, c) == train.at(j, c);
      }
      if (same) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(synth.num_rows());
}

// Linear interpolation between closest ranks, written out longhand.
inline double Pct(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p / 100.0;
  const double below = std::floor(h);
  const std::size_t i = static_cast<std::size_t>(below);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (h - below) * (v[i + 1] - v[i]);
}

// Random categorical data with small supports so duplicates and ties are
// common.
inline Dataset RandomCategorical(std::mt19937_64& rng, std::size_t rows,
                                 std::size_t cols) {
  Schema schema;
  std::vector<std::size_t> cards;
  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t card = 2 + rng() % 4;
    cards.push_back(card);
    std::vector<std::string> support;
    for (std::size_t v = 0; v < card; ++v) support.push_back(std::to_string(v));
    schema.push_back(ColumnSchema::Categorical("c" + std::to_string(c), support));
  }
  std::vector<double> values;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      values.push_back(static_cast<double>(rng() % cards[c]));
    }
  }
  return Dataset(schema, values);
}

inline Dataset RandomContinuous(std::mt19937_64& rng, std::size_t rows,
                                std::size_t cols, double grid) {
  Schema schema;
  for (std::size_t c = 0; c < cols; ++c) {
    schema.push_back(ColumnSchema::Continuous("x" + std::to_string(c)));
  }
  std::normal_distribution<double> normal;
  std::vector<double> values;
  for (std::size_t i = 0; i < rows * cols; ++i) {
    double v = normal(rng);
    // A coarse grid forces exact ties in some instances.
    values.push_back(grid > 0 ? std::round(v / grid) * grid : v);
  }
  return Dataset(schema, values);
}

}  // namespace synthaudit::brute

#endif  // SYNTHAUDIT_TESTS_BRUTE_FORCE_H_
