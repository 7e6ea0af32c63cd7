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

// Generative models behind a common sampling interface, optional
// differentially private training, and a marginal/mutual-information utility
// score.

#ifndef SYNTHAUDIT_SYNTHESIS_H_
#define SYNTHAUDIT_SYNTHESIS_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthaudit/tabular.h"

namespace synthaudit {

enum class ModelKind { kOracle, kRandom, kIndependent, kPrivBayesLite, kExternal };

std::string_view ModelKindName(ModelKind kind);
// Accepts oracle, random, independent, privbayes_lite, external.
ModelKind ParseModelKind(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::kIndependent;
  // Oracle: dimensionality and grid resolution of the standard normal it
  // samples (resolution 0 means continuous).
  std::size_t oracle_dim = 2;
  double oracle_resolution = 0.0;
  std::size_t max_parents = 2;
  // External: directory of CSV files replayed round-robin.
  std::string external_dir;
};

struct DpBudget {
  double epsilon = std::numeric_limits<double>::infinity();
  // Unset means 1/n for the fitting data. Recorded for reporting; the
  // implemented mechanisms are pure epsilon-DP.
  std::optional<double> delta;

  bool finite() const { return epsilon < std::numeric_limits<double>::infinity(); }
};

// Throws InvalidArgument unless epsilon > 0 and delta in [0, 1).
void ValidateBudget(const DpBudget& dp);

class GeneratorModel;

// Fits `spec` on `train`. The oracle ignores `train` entirely. Throws
// InvalidArgument on empty training data, on DP requests for kinds without a
// DP mechanism, and on continuous columns where the model needs categorical
// data.
std::shared_ptr<const GeneratorModel> FitModel(
    const ModelSpec& spec, const Dataset& train,
    const std::optional<DpBudget>& dp, uint64_t seed);

class GeneratorModel {
 public:
  virtual ~GeneratorModel() = default;
  virtual ModelKind kind() const = 0;
  virtual const Schema& schema() const = 0;
  // Deterministic in (model, n, seed) for every kind except kExternal, whose
  // output is the next file in its rotation.
  virtual Dataset Sample(std::size_t n, uint64_t seed) const = 0;

  const std::optional<DpBudget>& dp() const { return dp_; }

 private:
  friend std::shared_ptr<const GeneratorModel> FitModel(
      const ModelSpec&, const Dataset&, const std::optional<DpBudget>&,
      uint64_t);
  std::optional<DpBudget> dp_;
};

// Introspection for tests.
struct BayesNode {
  std::size_t column;
  std::vector<std::size_t> parents;
};
// Network of a fitted privbayes_lite model in sampling order.
const std::vector<BayesNode>& NetworkOf(const GeneratorModel& model);
// Per-column probability vectors of a fitted independent model.
const std::vector<std::vector<double>>& MarginalsOf(const GeneratorModel& model);

// Fraction-of-rows 1-way marginals of a categorical column.
std::vector<double> Marginal(const Dataset& ds, std::size_t col);

// Mutual information of two categorical columns, in nats.
double MutualInformation(const Dataset& ds, std::size_t a, std::size_t b);

// MI normalized by the smaller of the two entropies; 0 when that entropy is 0.
double NormalizedMutualInformation(const Dataset& ds, std::size_t a,
                                   std::size_t b);

struct UtilityScore {
  double marginal_diff = 0.0;
  double mi_diff = 0.0;
};

// Requires equal, all-categorical schemas.
UtilityScore Utility(const Dataset& train, const Dataset& synth);

}  // namespace synthaudit

#endif  // SYNTHAUDIT_SYNTHESIS_H_
