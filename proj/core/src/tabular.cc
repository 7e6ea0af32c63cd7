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

#include "synthaudit/tabular.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include "synthaudit/errors.h"
#include "synthaudit/mixture.h"
#include "synthaudit/random.h"

namespace synthaudit {

ColumnSchema ColumnSchema::Categorical(std::string name,
                                       std::vector<std::string> support) {
  ColumnSchema c;
  c.name = std::move(name);
  c.kind = ColumnKind::kCategorical;
  c.support = std::move(support);
  return c;
}

ColumnSchema ColumnSchema::Continuous(std::string name, double min,
                                      double max) {
  ColumnSchema c;
  c.name = std::move(name);
  c.kind = ColumnKind::kContinuous;
  c.min = min;
  c.max = max;
  return c;
}

std::optional<uint32_t> ColumnSchema::CodeOf(std::string_view label) const {
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] == label) return static_cast<uint32_t>(i);
  }
  return std::nullopt;
}

void ValidateSchema(const Schema& schema) {
  for (const ColumnSchema& c : schema) {
    if (c.categorical()) {
      if (c.support.empty()) {
        throw InvalidArgument("column '" + c.name + "' has an empty support");
      }
      std::set<std::string_view> seen;
      for (const std::string& label : c.support) {
        if (!seen.insert(label).second) {
          throw InvalidArgument("column '" + c.name +
                                "' repeats category label '" + label + "'");
        }
      }
    } else if (!(c.min < c.max)) {
      throw InvalidArgument("column '" + c.name + "' requires min < max");
    }
  }
}

void RequireSameSchema(const Schema& a, const Schema& b,
                       std::string_view what) {
  if (a != b) {
    throw SchemaMismatch("schema mismatch: " + std::string(what));
  }
}

namespace {

constexpr std::array<double, 23> kPow10 = {
    1e0,  1e1,  1e2,  1e3,  1e4,  1e5,  1e6,  1e7,  1e8,  1e9,  1e10, 1e11,
    1e12, 1e13, 1e14, 1e15, 1e16, 1e17, 1e18, 1e19, 1e20, 1e21, 1e22};

double CanonicalizeSlow(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.11e", value);
  return std::strtod(buf, nullptr);
}

double CanonicalizeFast(double value, bool* ok) {
  double mag = std::fabs(value);
  int exponent = static_cast<int>(std::floor(std::log10(mag)));
  int shift = 11 - exponent;
  *ok = shift >= 0 && shift < static_cast<int>(kPow10.size());
  if (!*ok) return value;
  double scale = kPow10[shift];
  return std::nearbyint(value * scale) / scale;
}

}  // namespace

double Canonicalize(double value) {
  if (value == 0.0) return 0.0;
  if (!std::isfinite(value)) return value;
  bool ok = false;
  double fast = CanonicalizeFast(value, &ok);
  if (ok) {
    bool again_ok = false;
    double again = CanonicalizeFast(fast, &again_ok);
    if (again_ok && again == fast) return fast == 0.0 ? 0.0 : fast;
  }
  double slow = CanonicalizeSlow(value);
  return slow == 0.0 ? 0.0 : slow;
}

std::string RecordKey(std::span<const double> row) {
  std::string key(row.size() * sizeof(double), '\0');
  std::memcpy(key.data(), row.data(), key.size());
  return key;
}

std::string RecordText(const Schema& schema, std::span<const double> row) {
  std::string out;
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (c > 0) out += ',';
    if (c < schema.size() && schema[c].categorical()) {
      out += schema[c].support.at(static_cast<std::size_t>(row[c]));
    } else {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.12g", row[c]);
      out += buf;
    }
  }
  return out;
}

namespace {

void ValidateRow(const Schema& schema, const double* row, std::size_t index) {
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const ColumnSchema& col = schema[c];
    double v = row[c];
    if (col.categorical()) {
      if (!(v >= 0.0) || v != std::floor(v) ||
          v >= static_cast<double>(col.cardinality())) {
        throw InvalidArgument("row " + std::to_string(index) + ", column '" +
                              col.name + "': category code out of support");
      }
    } else if (!std::isfinite(v) || v < col.min || v > col.max) {
      throw InvalidArgument("row " + std::to_string(index) + ", column '" +
                            col.name + "': value outside [min, max]");
    }
  }
}

}  // namespace

Dataset::Dataset(Schema schema, std::string provenance)
    : schema_(std::move(schema)), provenance_(std::move(provenance)) {
  ValidateSchema(schema_);
}

Dataset::Dataset(Schema schema, std::vector<double> values,
                 std::string provenance)
    : schema_(std::move(schema)),
      values_(std::move(values)),
      provenance_(std::move(provenance)) {
  ValidateSchema(schema_);
  const std::size_t cols = schema_.size();
  if (cols == 0) {
    if (!values_.empty()) {
      throw InvalidArgument("values supplied for an empty schema");
    }
    return;
  }
  if (values_.size() % cols != 0) {
    throw InvalidArgument("value count is not a multiple of the column count");
  }
  num_rows_ = values_.size() / cols;
  for (double& v : values_) v = Canonicalize(v);
  for (std::size_t r = 0; r < num_rows_; ++r) {
    ValidateRow(schema_, values_.data() + r * cols, r);
  }
}

Dataset Dataset::FromRows(Schema schema, const std::vector<Record>& rows,
                          std::string provenance) {
  std::vector<double> values;
  values.reserve(rows.size() * schema.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != schema.size()) {
      throw InvalidArgument("row " + std::to_string(r) + " has " +
                            std::to_string(rows[r].size()) +
                            " entries, expected " +
                            std::to_string(schema.size()));
    }
    values.insert(values.end(), rows[r].begin(), rows[r].end());
  }
  return Dataset(std::move(schema), std::move(values), std::move(provenance));
}

bool Dataset::AllCategorical() const {
  return std::all_of(schema_.begin(), schema_.end(),
                     [](const ColumnSchema& c) { return c.categorical(); });
}

bool Dataset::AllContinuous() const {
  return std::none_of(schema_.begin(), schema_.end(),
                      [](const ColumnSchema& c) { return c.categorical(); });
}

Dataset Dataset::Select(std::span<const std::size_t> indices) const {
  Dataset out;
  out.schema_ = schema_;
  out.provenance_ = provenance_;
  out.values_.reserve(indices.size() * num_cols());
  for (std::size_t i : indices) {
    if (i >= num_rows_) throw InvalidArgument("row index out of range");
    auto r = row(i);
    out.values_.insert(out.values_.end(), r.begin(), r.end());
  }
  out.num_rows_ = indices.size();
  return out;
}

Dataset Dataset::Concat(const Dataset& other) const {
  RequireSameSchema(schema_, other.schema_, "Concat");
  Dataset out = *this;
  out.values_.insert(out.values_.end(), other.values_.begin(),
                     other.values_.end());
  out.num_rows_ += other.num_rows_;
  return out;
}

Dataset Dataset::WithProvenance(std::string provenance) const {
  Dataset out = *this;
  out.provenance_ = std::move(provenance);
  return out;
}

void DatasetBuilder::AddRow(std::span<const double> row) {
  if (row.size() != schema_.size()) {
    throw InvalidArgument("row width does not match the schema");
  }
  values_.insert(values_.end(), row.begin(), row.end());
}

Dataset DatasetBuilder::Build(std::string provenance) && {
  return Dataset(std::move(schema_), std::move(values_),
                 std::move(provenance));
}

// ---------------------------------------------------------------------------

double QuantizeGauss(double z, double resolution) {
  if (resolution <= 0.0) return z;
  return std::nearbyint(z / resolution) * resolution;
}

Dataset GenGauss(std::size_t dim, std::size_t n, uint64_t seed,
                 double resolution) {
  if (dim == 0) throw InvalidArgument("GenGauss requires dim >= 1");
  Schema schema;
  for (std::size_t d = 0; d < dim; ++d) {
    schema.push_back(ColumnSchema::Continuous("x" + std::to_string(d)));
  }
  Rng rng = MakeRng(seed, "gen_gauss");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values(dim * n);
  for (double& v : values) v = QuantizeGauss(normal(rng), resolution);
  char prov[64];
  std::snprintf(prov, sizeof(prov), "gauss%zud", dim);
  return Dataset(std::move(schema), std::move(values), prov);
}

namespace {

struct CensusColumn {
  const char* name;
  std::vector<std::string> labels;
};

const std::vector<CensusColumn>& CensusColumns() {
  static const std::vector<CensusColumn> kColumns = {
      {"age",
       {"17-24", "25-32", "33-40", "41-48", "49-56", "57-64", "65-74",
        "75+"}},
      {"education",
       {"primary", "high-school", "some-college", "bachelors", "masters",
        "doctorate"}},
      {"marital_status",
       {"never-married", "married", "divorced", "separated", "widowed"}},
      {"relationship",
       {"own-child", "husband", "wife", "unmarried", "not-in-family"}},
      {"sex", {"female", "male"}},
      {"income", {"<=50K", ">50K"}},
  };
  return kColumns;
}

// Each profile puts most of its mass on one value per column and some on a
// secondary value; the rest is spread over the remaining categories.
struct Profile {
  double weight;
  std::array<int, 6> main;
  std::array<int, 6> alt;
};

constexpr double kMainMass = 0.90;
constexpr double kAltMass = 0.07;
constexpr double kNoiseRows = 0.02;

// Ten well-separated groups: eight common ones (two of them shared by a
// pair of profiles that differ only in their secondary values) and two rare
// profiles far from everything else.
constexpr std::array<Profile, 12> kProfiles = {{
    {0.110, {1, 1, 0, 0, 0, 0}, {0, 2, 0, 4, 1, 0}},
    {0.060, {1, 1, 0, 0, 0, 0}, {2, 1, 0, 3, 0, 0}},
    {0.140, {3, 3, 1, 1, 1, 1}, {4, 4, 1, 1, 1, 0}},
    {0.040, {3, 3, 1, 1, 1, 1}, {3, 2, 1, 2, 1, 1}},
    {0.120, {2, 2, 1, 2, 0, 0}, {3, 3, 1, 2, 0, 1}},
    {0.110, {4, 1, 2, 3, 0, 0}, {5, 2, 3, 4, 0, 0}},
    {0.100, {5, 1, 1, 1, 1, 0}, {4, 0, 1, 1, 1, 1}},
    {0.090, {2, 4, 0, 4, 0, 1}, {1, 3, 0, 4, 1, 1}},
    {0.080, {6, 0, 4, 4, 0, 0}, {5, 1, 4, 3, 0, 0}},
    {0.105, {3, 2, 3, 4, 1, 0}, {4, 1, 2, 4, 1, 0}},
    // The two rare profiles populate low-density regions.
    {0.020, {7, 5, 4, 3, 1, 1}, {6, 4, 4, 3, 1, 1}},
    {0.025, {0, 5, 3, 2, 0, 1}, {1, 4, 3, 2, 0, 1}},
}};

int DrawColumnValue(Rng& rng, int main, int alt, int cardinality) {
  double u = SampleUniform(rng);
  if (u < kMainMass) return main;
  if (u < kMainMass + kAltMass && alt != main) return alt;
  // Uniform over the categories other than main and alt.
  std::vector<int> rest;
  for (int v = 0; v < cardinality; ++v) {
    if (v != main && v != alt) rest.push_back(v);
  }
  if (rest.empty()) return main;
  std::uniform_int_distribution<std::size_t> pick(0, rest.size() - 1);
  return rest[pick(rng)];
}

}  // namespace

Dataset GenCensusLite(std::size_t n, uint64_t seed) {
  const auto& columns = CensusColumns();
  Schema schema;
  for (const CensusColumn& c : columns) {
    schema.push_back(ColumnSchema::Categorical(c.name, c.labels));
  }
  std::vector<double> weights;
  for (const Profile& p : kProfiles) weights.push_back(p.weight);
  std::discrete_distribution<std::size_t> pick_profile(weights.begin(),
                                                       weights.end());
  Rng rng = MakeRng(seed, "gen_censuslite");
  std::vector<double> values;
  values.reserve(n * columns.size());
  for (std::size_t r = 0; r < n; ++r) {
    bool noise = SampleUniform(rng) < kNoiseRows;
    const Profile& profile = kProfiles[pick_profile(rng)];
    for (std::size_t c = 0; c < columns.size(); ++c) {
      int card = static_cast<int>(columns[c].labels.size());
      int v;
      if (noise) {
        std::uniform_int_distribution<int> uni(0, card - 1);
        v = uni(rng);
      } else {
        v = DrawColumnValue(rng, profile.main[c], profile.alt[c], card);
      }
      values.push_back(v);
    }
  }
  return Dataset(std::move(schema), std::move(values), "censuslite");
}

std::pair<Dataset, Dataset> Split(const Dataset& ds, uint64_t seed) {
  if (ds.num_rows() % 2 != 0) {
    throw InvalidArgument("Split requires an even number of rows, got " +
                          std::to_string(ds.num_rows()));
  }
  std::vector<std::size_t> order(ds.num_rows());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = MakeRng(seed, "split");
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t half = order.size() / 2;
  std::span<const std::size_t> all(order);
  return {ds.Select(all.first(half)).WithProvenance(ds.provenance() + "/train"),
          ds.Select(all.subspan(half)).WithProvenance(ds.provenance() +
                                                      "/test")};
}

// ---------------------------------------------------------------------------

std::size_t DefaultOutlierBudget(std::size_t n) { return n / 10; }

OutlierSet LabelOutliers(const Dataset& ds, const OutlierRule& rule) {
  OutlierSet out;
  out.rule = rule;
  if (const auto* radius = std::get_if<RadiusRule>(&rule)) {
    if (!ds.AllContinuous()) {
      throw InvalidArgument("radius rule requires all-continuous data");
    }
    const double r2 = radius->radius * radius->radius;
    for (std::size_t i = 0; i < ds.num_rows(); ++i) {
      double norm2 = 0.0;
      for (double v : ds.row(i)) norm2 += v * v;
      if (norm2 > r2) out.indices.push_back(i);
    }
  } else if (const auto* gmm = std::get_if<GmmSmallestRule>(&rule)) {
    GmmModel model = FitGmm(ds, gmm->k, GmmOptions{.seed = gmm->seed});
    std::vector<int> labels = Predict(model, ds);
    std::vector<int> chosen = SmallestClusters(model.k(), labels, gmm->budget);
    std::vector<char> selected(model.k(), 0);
    for (int c : chosen) selected[c] = 1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (selected[labels[i]]) out.indices.push_back(i);
    }
  } else {
    const auto& designated = std::get<DesignatedClassRule>(rule);
    if (designated.column >= ds.num_cols() ||
        !ds.schema()[designated.column].categorical()) {
      throw InvalidArgument("designated-class rule needs a categorical column");
    }
    auto code = ds.schema()[designated.column].CodeOf(designated.label);
    if (!code) {
      throw InvalidArgument("label '" + designated.label +
                            "' is not in the column support");
    }
    for (std::size_t i = 0; i < ds.num_rows(); ++i) {
      if (ds.at(i, designated.column) == *code) out.indices.push_back(i);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Discretizer Discretizer::Fit(const Dataset& ds, BinStrategy strategy,
                             std::size_t n_bins) {
  if (n_bins < 2) throw InvalidArgument("n_bins must be at least 2");
  if (ds.AllCategorical()) {
    throw InvalidArgument("discretization needs a continuous column");
  }
  if (ds.empty()) throw InvalidArgument("cannot fit a discretizer on no rows");
  Discretizer d;
  d.strategy_ = strategy;
  d.n_bins_ = n_bins;
  d.input_schema_ = ds.schema();
  d.edges_.resize(ds.num_cols());
  std::vector<std::string> labels;
  for (std::size_t b = 0; b < n_bins; ++b) {
    labels.push_back("b" + std::to_string(b));
  }
  for (std::size_t c = 0; c < ds.num_cols(); ++c) {
    const ColumnSchema& col = ds.schema()[c];
    if (col.categorical()) {
      d.output_schema_.push_back(col);
      continue;
    }
    std::vector<double> column(ds.num_rows());
    for (std::size_t r = 0; r < ds.num_rows(); ++r) column[r] = ds.at(r, c);
    std::sort(column.begin(), column.end());
    std::vector<double>& edges = d.edges_[c];
    for (std::size_t b = 1; b < n_bins; ++b) {
      double edge;
      if (strategy == BinStrategy::kUniform) {
        edge = column.front() + (column.back() - column.front()) *
                                    static_cast<double>(b) /
                                    static_cast<double>(n_bins);
      } else {
        double rank = static_cast<double>(b) / static_cast<double>(n_bins) *
                      static_cast<double>(column.size() - 1);
        std::size_t lo = static_cast<std::size_t>(std::floor(rank));
        std::size_t hi = std::min(lo + 1, column.size() - 1);
        double frac = rank - static_cast<double>(lo);
        edge = column[lo] + frac * (column[hi] - column[lo]);
      }
      edges.push_back(edge);
    }
    // Strictly increasing edges: collapse duplicates by nudging upward.
    for (std::size_t i = 1; i < edges.size(); ++i) {
      if (!(edges[i] > edges[i - 1])) {
        edges[i] = std::nextafter(edges[i - 1],
                                  std::numeric_limits<double>::infinity());
      }
    }
    d.output_schema_.push_back(ColumnSchema::Categorical(col.name, labels));
  }
  return d;
}

std::size_t Discretizer::BinOf(std::size_t col, double value) const {
  const std::vector<double>& edges = edges_.at(col);
  // First edge >= value: a value equal to an edge stays in the lower bin.
  auto it = std::lower_bound(edges.begin(), edges.end(), value);
  return static_cast<std::size_t>(it - edges.begin());
}

Dataset Discretizer::Apply(const Dataset& ds) const {
  RequireSameSchema(input_schema_, ds.schema(), "Discretizer::Apply");
  std::vector<double> values(ds.values().size());
  const std::size_t cols = ds.num_cols();
  for (std::size_t r = 0; r < ds.num_rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double v = ds.at(r, c);
      values[r * cols + c] = input_schema_[c].categorical()
                                 ? v
                                 : static_cast<double>(BinOf(c, v));
    }
  }
  return Dataset(output_schema_, std::move(values),
                 ds.provenance() + "/discretized");
}

}  // namespace synthaudit
