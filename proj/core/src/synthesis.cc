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

#include "synthaudit/synthesis.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>

#include "synthaudit/errors.h"
#include "synthaudit/random.h"

namespace synthaudit {
namespace {

// Index drawn from unnormalized nonnegative weights. All-zero weights fall
// back to uniform.
std::size_t DrawIndex(const std::vector<double>& weights, Rng& rng) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (total <= 0.0) {
    return std::min(weights.size() - 1,
                    static_cast<std::size_t>(SampleUniform(rng) *
                                             static_cast<double>(weights.size())));
  }
  double u = SampleUniform(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  // Rounding left u >= 0; return the last index with positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return 0;
}

void RequireCategorical(const Dataset& train, std::string_view model) {
  if (!train.AllCategorical()) {
    throw InvalidArgument(std::string(model) +
                          " needs categorical columns; discretize first");
  }
}

// Values a column may emit: the category codes of a categorical column or the
// distinct observed values of a continuous one, each with its train count.
struct ColumnValues {
  std::vector<double> values;
  std::vector<double> counts;
};

ColumnValues CountColumn(const Dataset& train, std::size_t c) {
  ColumnValues out;
  const ColumnSchema& col = train.schema()[c];
  if (col.categorical()) {
    out.counts.assign(col.cardinality(), 0.0);
    for (std::size_t i = 0; i < col.cardinality(); ++i) {
      out.values.push_back(static_cast<double>(i));
    }
    for (std::size_t r = 0; r < train.num_rows(); ++r) {
      out.counts[static_cast<std::size_t>(train.at(r, c))] += 1.0;
    }
  } else {
    std::map<double, double> counts;
    for (std::size_t r = 0; r < train.num_rows(); ++r) counts[train.at(r, c)] += 1.0;
    for (auto [v, n] : counts) {
      out.values.push_back(v);
      out.counts.push_back(n);
    }
  }
  return out;
}

class OracleModel : public GeneratorModel {
 public:
  OracleModel(std::size_t dim, double resolution)
      : dim_(dim),
        resolution_(resolution),
        schema_(GenGauss(dim, 0, 0).schema()) {}
  ModelKind kind() const override { return ModelKind::kOracle; }
  const Schema& schema() const override { return schema_; }
  Dataset Sample(std::size_t n, uint64_t seed) const override {
    return GenGauss(dim_, n, DeriveSeed(seed, "oracle"), resolution_)
        .WithProvenance("oracle");
  }

 private:
  std::size_t dim_;
  double resolution_;
  Schema schema_;
};

// Per-column sampler shared by the random and independent models.
class ColumnwiseModel : public GeneratorModel {
 public:
  ColumnwiseModel(ModelKind kind, Schema schema,
                  std::vector<std::vector<double>> values,
                  std::vector<std::vector<double>> probs)
      : kind_(kind),
        schema_(std::move(schema)),
        values_(std::move(values)),
        probs_(std::move(probs)) {}

  ModelKind kind() const override { return kind_; }
  const Schema& schema() const override { return schema_; }
  Dataset Sample(std::size_t n, uint64_t seed) const override {
    Rng rng = MakeRng(seed, ModelKindName(kind_));
    std::vector<double> out(n * schema_.size());
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < schema_.size(); ++c) {
        out[r * schema_.size() + c] = values_[c][DrawIndex(probs_[c], rng)];
      }
    }
    return Dataset(schema_, std::move(out), std::string(ModelKindName(kind_)));
  }
  const std::vector<std::vector<double>>& probs() const { return probs_; }

 private:
  ModelKind kind_;
  Schema schema_;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<double>> probs_;
};

std::shared_ptr<ColumnwiseModel> FitRandom(const Dataset& train) {
  std::vector<std::vector<double>> values, probs;
  for (std::size_t c = 0; c < train.num_cols(); ++c) {
    ColumnValues cv = CountColumn(train, c);
    std::vector<double> seen;
    for (std::size_t i = 0; i < cv.values.size(); ++i) {
      if (cv.counts[i] > 0.0) seen.push_back(cv.values[i]);
    }
    probs.emplace_back(seen.size(), 1.0 / static_cast<double>(seen.size()));
    values.push_back(std::move(seen));
  }
  return std::make_shared<ColumnwiseModel>(ModelKind::kRandom, train.schema(),
                                           std::move(values), std::move(probs));
}

std::shared_ptr<ColumnwiseModel> FitIndependent(
    const Dataset& train, const std::optional<DpBudget>& dp, uint64_t seed) {
  const bool noisy = dp.has_value() && dp->finite();
  if (noisy) RequireCategorical(train, "DP independent model");
  // Each column's histogram gets an equal share of epsilon; one record moves
  // one count per column by 1.
  const double column_eps =
      noisy ? dp->epsilon / static_cast<double>(train.num_cols()) : 0.0;
  Rng rng = MakeRng(seed, "independent_dp");
  std::vector<std::vector<double>> values, probs;
  for (std::size_t c = 0; c < train.num_cols(); ++c) {
    ColumnValues cv = CountColumn(train, c);
    if (noisy) {
      for (double& count : cv.counts) {
        count = std::max(0.0, count + SampleLaplace(rng, 1.0 / column_eps));
      }
    }
    double total = std::accumulate(cv.counts.begin(), cv.counts.end(), 0.0);
    if (total <= 0.0) {
      std::fill(cv.counts.begin(), cv.counts.end(), 1.0);
      total = static_cast<double>(cv.counts.size());
    }
    for (double& count : cv.counts) count /= total;
    values.push_back(std::move(cv.values));
    probs.push_back(std::move(cv.counts));
  }
  return std::make_shared<ColumnwiseModel>(ModelKind::kIndependent,
                                           train.schema(), std::move(values),
                                           std::move(probs));
}

// Joint counts of a column and a parent set; cells are indexed by
// (parent configuration, value) with the last parent varying fastest.
struct CondTable {
  std::vector<std::size_t> parent_cards;
  std::size_t card = 0;
  std::vector<double> counts;  // configs x card

  std::size_t Config(std::span<const double> row,
                     const std::vector<std::size_t>& parents) const {
    std::size_t idx = 0;
    for (std::size_t p = 0; p < parents.size(); ++p) {
      idx = idx * parent_cards[p] + static_cast<std::size_t>(row[parents[p]]);
    }
    return idx;
  }
};

CondTable CountTable(const Dataset& ds, std::size_t col,
                     const std::vector<std::size_t>& parents) {
  CondTable t;
  std::size_t configs = 1;
  for (std::size_t p : parents) {
    t.parent_cards.push_back(ds.schema()[p].cardinality());
    configs *= t.parent_cards.back();
  }
  t.card = ds.schema()[col].cardinality();
  t.counts.assign(configs * t.card, 0.0);
  for (std::size_t r = 0; r < ds.num_rows(); ++r) {
    auto row = ds.row(r);
    t.counts[t.Config(row, parents) * t.card +
             static_cast<std::size_t>(row[col])] += 1.0;
  }
  return t;
}

// I(X; Pi) from a joint count table.
double TableMutualInformation(const CondTable& t) {
  const std::size_t configs = t.counts.size() / t.card;
  double n = std::accumulate(t.counts.begin(), t.counts.end(), 0.0);
  if (n <= 0.0) return 0.0;
  std::vector<double> px(t.card, 0.0), pc(configs, 0.0);
  for (std::size_t c = 0; c < configs; ++c) {
    for (std::size_t x = 0; x < t.card; ++x) {
      px[x] += t.counts[c * t.card + x];
      pc[c] += t.counts[c * t.card + x];
    }
  }
  double mi = 0.0;
  for (std::size_t c = 0; c < configs; ++c) {
    for (std::size_t x = 0; x < t.card; ++x) {
      double v = t.counts[c * t.card + x];
      if (v > 0.0) mi += v / n * std::log(v * n / (px[x] * pc[c]));
    }
  }
  return std::max(0.0, mi);
}

// Sensitivity of empirical mutual information under add/remove of one record,
// for n records (the bound used by PrivBayes for general domains).
double MutualInformationSensitivity(double n) {
  if (n <= 1.0) return std::log(2.0);
  return 2.0 / n * std::log((n + 1.0) / 2.0) +
         (n - 1.0) / n * std::log((n + 1.0) / (n - 1.0));
}

void Combinations(const std::vector<std::size_t>& pool, std::size_t size,
                  std::size_t start, std::vector<std::size_t>& current,
                  std::vector<std::vector<std::size_t>>& out) {
  if (current.size() == size) {
    out.push_back(current);
    return;
  }
  for (std::size_t i = start; i < pool.size(); ++i) {
    current.push_back(pool[i]);
    Combinations(pool, size, i + 1, current, out);
    current.pop_back();
  }
}

class PrivBayesModel : public GeneratorModel {
 public:
  PrivBayesModel(Schema schema, std::vector<BayesNode> network,
                 std::vector<CondTable> tables)
      : schema_(std::move(schema)),
        network_(std::move(network)),
        tables_(std::move(tables)) {}

  ModelKind kind() const override { return ModelKind::kPrivBayesLite; }
  const Schema& schema() const override { return schema_; }
  Dataset Sample(std::size_t n, uint64_t seed) const override {
    Rng rng = MakeRng(seed, "privbayes_lite");
    const std::size_t d = schema_.size();
    std::vector<double> out(n * d);
    std::vector<double> weights;
    for (std::size_t r = 0; r < n; ++r) {
      std::span<double> row(out.data() + r * d, d);
      for (std::size_t i = 0; i < network_.size(); ++i) {
        const CondTable& t = tables_[i];
        std::size_t config = t.Config(row, network_[i].parents);
        weights.assign(t.counts.begin() + config * t.card,
                       t.counts.begin() + (config + 1) * t.card);
        row[network_[i].column] = static_cast<double>(DrawIndex(weights, rng));
      }
    }
    return Dataset(schema_, std::move(out), "privbayes_lite");
  }
  const std::vector<BayesNode>& network() const { return network_; }

 private:
  Schema schema_;
  std::vector<BayesNode> network_;
  std::vector<CondTable> tables_;  // aligned with network_
};

std::shared_ptr<PrivBayesModel> FitPrivBayes(const Dataset& train,
                                             std::size_t max_parents,
                                             const std::optional<DpBudget>& dp,
                                             uint64_t seed) {
  RequireCategorical(train, "privbayes_lite");
  const std::size_t d = train.num_cols();
  const bool noisy = dp.has_value() && dp->finite();
  const double n = static_cast<double>(train.num_rows());
  Rng rng = MakeRng(seed, "privbayes_lite_fit");

  // Structure: column 0 first, then repeatedly the (column, parent set) pair
  // with the highest mutual information, chosen by the exponential mechanism
  // when a budget is set. Half of epsilon is spread over the d - 1 choices.
  std::vector<BayesNode> network{{0, {}}};
  std::vector<std::size_t> selected{0};
  std::vector<bool> used(d, false);
  used[0] = true;
  const double step_eps = noisy && d > 1 ? dp->epsilon / 2.0 / (d - 1) : 0.0;
  const double sensitivity = MutualInformationSensitivity(n);
  while (network.size() < d) {
    std::vector<std::vector<std::size_t>> parent_sets;
    std::vector<std::size_t> scratch;
    Combinations(selected, std::min(max_parents, selected.size()), 0, scratch,
                 parent_sets);
    std::vector<BayesNode> candidates;
    std::vector<double> scores;
    for (std::size_t col = 0; col < d; ++col) {
      if (used[col]) continue;
      for (const auto& parents : parent_sets) {
        candidates.push_back({col, parents});
        scores.push_back(TableMutualInformation(CountTable(train, col, parents)));
      }
    }
    std::size_t pick = 0;
    if (noisy) {
      double top = *std::max_element(scores.begin(), scores.end());
      std::vector<double> w(scores.size());
      for (std::size_t i = 0; i < scores.size(); ++i) {
        w[i] = std::exp(step_eps * (scores[i] - top) / (2.0 * sensitivity));
      }
      pick = DrawIndex(w, rng);
    } else {
      for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[pick]) pick = i;
      }
    }
    network.push_back(candidates[pick]);
    selected.push_back(candidates[pick].column);
    std::sort(selected.begin(), selected.end());
    used[candidates[pick].column] = true;
  }

  // Parameters: d joint count tables, each of L1 sensitivity 1, sharing the
  // other half of epsilon.
  std::vector<CondTable> tables;
  for (const BayesNode& node : network) {
    CondTable t = CountTable(train, node.column, node.parents);
    if (noisy) {
      double scale = 2.0 * static_cast<double>(d) / dp->epsilon;
      for (double& v : t.counts) v = std::max(0.0, v + SampleLaplace(rng, scale));
    }
    tables.push_back(std::move(t));
  }
  return std::make_shared<PrivBayesModel>(train.schema(), std::move(network),
                                          std::move(tables));
}

class ExternalModel : public GeneratorModel {
 public:
  ExternalModel(Schema schema, std::vector<Dataset> files)
      : schema_(std::move(schema)), files_(std::move(files)) {}
  ModelKind kind() const override { return ModelKind::kExternal; }
  const Schema& schema() const override { return schema_; }
  Dataset Sample(std::size_t n, uint64_t seed) const override {
    const Dataset& next = files_[cursor_.fetch_add(1) % files_.size()];
    if (next.num_rows() <= n) return next;
    std::vector<std::size_t> head(n);
    std::iota(head.begin(), head.end(), 0);
    return next.Select(head);
  }

 private:
  Schema schema_;
  std::vector<Dataset> files_;
  mutable std::atomic<std::size_t> cursor_{0};
};

std::shared_ptr<ExternalModel> LoadExternal(const std::string& dir,
                                            const Dataset& train) {
  namespace fs = std::filesystem;
  if (dir.empty() || !fs::is_directory(dir)) {
    throw InvalidArgument("external model directory '" + dir +
                          "' does not exist");
  }
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      paths.push_back(entry.path().string());
    }
  }
  if (paths.empty()) {
    throw InvalidArgument("external model directory '" + dir +
                          "' contains no .csv files");
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Dataset> files;
  for (const std::string& p : paths) {
    files.push_back(ReadCsv(p));
    RequireSameSchema(train.schema(), files.back().schema(), p);
  }
  return std::make_shared<ExternalModel>(train.schema(), std::move(files));
}

std::vector<double> CellCounts(const Dataset& ds, std::size_t a, std::size_t b,
                               std::size_t* card_b) {
  *card_b = ds.schema()[b].cardinality();
  std::vector<double> counts(ds.schema()[a].cardinality() * *card_b, 0.0);
  for (std::size_t r = 0; r < ds.num_rows(); ++r) {
    counts[static_cast<std::size_t>(ds.at(r, a)) * *card_b +
           static_cast<std::size_t>(ds.at(r, b))] += 1.0;
  }
  return counts;
}

double Entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

}  // namespace

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kOracle:
      return "oracle";
    case ModelKind::kRandom:
      return "random";
    case ModelKind::kIndependent:
      return "independent";
    case ModelKind::kPrivBayesLite:
      return "privbayes_lite";
    case ModelKind::kExternal:
      return "external";
  }
  return "unknown";
}

ModelKind ParseModelKind(std::string_view name) {
  for (ModelKind k : {ModelKind::kOracle, ModelKind::kRandom,
                      ModelKind::kIndependent, ModelKind::kPrivBayesLite,
                      ModelKind::kExternal}) {
    if (ModelKindName(k) == name) return k;
  }
  throw InvalidArgument("unknown model kind '" + std::string(name) + "'");
}

void ValidateBudget(const DpBudget& dp) {
  if (!(dp.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (dp.delta && !(*dp.delta >= 0.0 && *dp.delta < 1.0)) {
    throw InvalidArgument("delta must lie in [0, 1)");
  }
}

std::shared_ptr<const GeneratorModel> FitModel(
    const ModelSpec& spec, const Dataset& train,
    const std::optional<DpBudget>& dp, uint64_t seed) {
  std::optional<DpBudget> budget = dp;
  if (budget) {
    ValidateBudget(*budget);
    if (!budget->delta && !train.empty()) {
      budget->delta = 1.0 / static_cast<double>(train.num_rows());
    }
  }
  if (spec.kind == ModelKind::kOracle) {
    if (spec.oracle_dim == 0) throw InvalidArgument("oracle needs dim >= 1");
    if (budget && budget->finite()) {
      throw InvalidArgument("the oracle does not train and takes no budget");
    }
    return std::make_shared<OracleModel>(spec.oracle_dim,
                                         spec.oracle_resolution);
  }
  if (train.empty()) throw InvalidArgument("cannot fit on an empty dataset");
  if (budget && budget->finite() &&
      (spec.kind == ModelKind::kRandom || spec.kind == ModelKind::kExternal)) {
    throw InvalidArgument(std::string(ModelKindName(spec.kind)) +
                          " has no DP training mechanism");
  }
  std::shared_ptr<GeneratorModel> model;
  switch (spec.kind) {
    case ModelKind::kRandom:
      model = FitRandom(train);
      break;
    case ModelKind::kIndependent:
      model = FitIndependent(train, budget, seed);
      break;
    case ModelKind::kPrivBayesLite:
      model = FitPrivBayes(train, spec.max_parents, budget, seed);
      break;
    case ModelKind::kExternal:
      model = LoadExternal(spec.external_dir, train);
      break;
    case ModelKind::kOracle:
      break;
  }
  model->dp_ = budget;
  return model;
}

const std::vector<BayesNode>& NetworkOf(const GeneratorModel& model) {
  const auto* pb = dynamic_cast<const PrivBayesModel*>(&model);
  if (pb == nullptr) throw InvalidArgument("not a privbayes_lite model");
  return pb->network();
}

const std::vector<std::vector<double>>& MarginalsOf(
    const GeneratorModel& model) {
  const auto* cw = dynamic_cast<const ColumnwiseModel*>(&model);
  if (cw == nullptr || cw->kind() != ModelKind::kIndependent) {
    throw InvalidArgument("not an independent model");
  }
  return cw->probs();
}

std::vector<double> Marginal(const Dataset& ds, std::size_t col) {
  const ColumnSchema& c = ds.schema().at(col);
  if (!c.categorical()) throw InvalidArgument("marginal of a real column");
  std::vector<double> p(c.cardinality(), 0.0);
  if (ds.empty()) return p;
  for (std::size_t r = 0; r < ds.num_rows(); ++r) {
    p[static_cast<std::size_t>(ds.at(r, col))] += 1.0;
  }
  for (double& v : p) v /= static_cast<double>(ds.num_rows());
  return p;
}

double MutualInformation(const Dataset& ds, std::size_t a, std::size_t b) {
  if (ds.empty()) return 0.0;
  std::size_t cb;
  std::vector<double> joint = CellCounts(ds, a, b, &cb);
  std::vector<double> pa = Marginal(ds, a), pb = Marginal(ds, b);
  const double n = static_cast<double>(ds.num_rows());
  double mi = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < cb; ++j) {
      double pij = joint[i * cb + j] / n;
      if (pij > 0.0) mi += pij * std::log(pij / (pa[i] * pb[j]));
    }
  }
  return std::max(0.0, mi);
}

double NormalizedMutualInformation(const Dataset& ds, std::size_t a,
                                   std::size_t b) {
  double h = std::min(Entropy(Marginal(ds, a)), Entropy(Marginal(ds, b)));
  if (h <= 1e-12) return 0.0;
  return std::clamp(MutualInformation(ds, a, b) / h, 0.0, 1.0);
}

UtilityScore Utility(const Dataset& train, const Dataset& synth) {
  RequireSameSchema(train.schema(), synth.schema(), "utility");
  if (!train.AllCategorical()) {
    throw InvalidArgument("utility is defined on categorical columns");
  }
  UtilityScore score;
  const std::size_t d = train.num_cols();
  if (d == 0) return score;
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> p = Marginal(train, c), q = Marginal(synth, c);
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::fabs(p[i] - q[i]);
    score.marginal_diff += 0.5 * tv;
  }
  score.marginal_diff /= static_cast<double>(d);
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      score.mi_diff += std::fabs(NormalizedMutualInformation(train, a, b) -
                                 NormalizedMutualInformation(synth, a, b));
      ++pairs;
    }
  }
  if (pairs > 0) score.mi_diff /= static_cast<double>(pairs);
  return score;
}

}  // namespace synthaudit
