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

// Typed tabular data: schemas, immutable datasets, the dataset generators
// used throughout the workbench, outlier labeling and discretization.

#ifndef SYNTHAUDIT_TABULAR_H_
#define SYNTHAUDIT_TABULAR_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace synthaudit {

enum class ColumnKind { kCategorical, kContinuous };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  // Ordered category labels; the position of a label is its code.
  std::vector<std::string> support;
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();

  static ColumnSchema Categorical(std::string name,
                                  std::vector<std::string> support);
  static ColumnSchema Continuous(
      std::string name,
      double min = -std::numeric_limits<double>::infinity(),
      double max = std::numeric_limits<double>::infinity());

  bool categorical() const { return kind == ColumnKind::kCategorical; }
  std::size_t cardinality() const { return support.size(); }
  std::optional<uint32_t> CodeOf(std::string_view label) const;

  friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;
};

using Schema = std::vector<ColumnSchema>;

// Throws InvalidArgument if labels repeat, a categorical column is empty, or
// a continuous column has min >= max.
void ValidateSchema(const Schema& schema);

// Throws SchemaMismatch naming `what` unless the schemas are equal.
void RequireSameSchema(const Schema& a, const Schema& b, std::string_view what);

// A row: one value per column. Categorical entries hold the category code.
using Record = std::vector<double>;

// Rounds to 12 significant decimal digits and maps -0 to +0. Idempotent. All
// values stored in a Dataset pass through here, so exact-match comparisons on
// reals are well defined.
double Canonicalize(double value);

// Compact binary key identifying a canonical record; equal keys <=> equal
// records.
std::string RecordKey(std::span<const double> row);

// Human-readable form: labels for categorical columns, %.12g for reals.
std::string RecordText(const Schema& schema, std::span<const double> row);

class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Schema schema, std::string provenance = "");
  // `values` is row-major with schema.size() entries per row. Values are
  // canonicalized and validated against the schema.
  Dataset(Schema schema, std::vector<double> values,
          std::string provenance = "");

  static Dataset FromRows(Schema schema, const std::vector<Record>& rows,
                          std::string provenance = "");

  const Schema& schema() const { return schema_; }
  std::size_t num_rows() const { return num_rows_; }
  std::size_t num_cols() const { return schema_.size(); }
  bool empty() const { return num_rows_ == 0; }
  const std::string& provenance() const { return provenance_; }
  const std::vector<double>& values() const { return values_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * schema_.size(), schema_.size()};
  }
  double at(std::size_t row, std::size_t col) const {
    return values_[row * schema_.size() + col];
  }
  Record record(std::size_t i) const {
    auto r = row(i);
    return Record(r.begin(), r.end());
  }

  bool AllCategorical() const;
  bool AllContinuous() const;

  Dataset Select(std::span<const std::size_t> indices) const;
  // Rows of `this` followed by rows of `other`; schemas must match.
  Dataset Concat(const Dataset& other) const;
  Dataset WithProvenance(std::string provenance) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.schema_ == b.schema_ && a.values_ == b.values_ &&
           a.num_rows_ == b.num_rows_;
  }

 private:
  Schema schema_;
  std::vector<double> values_;
  std::size_t num_rows_ = 0;
  std::string provenance_;
};

// Accumulates rows and produces an immutable Dataset.
class DatasetBuilder {
 public:
  explicit DatasetBuilder(Schema schema) : schema_(std::move(schema)) {}
  void Reserve(std::size_t rows) { values_.reserve(rows * schema_.size()); }
  void AddRow(std::span<const double> row);
  std::size_t num_rows() const {
    return schema_.empty() ? 0 : values_.size() / schema_.size();
  }
  Dataset Build(std::string provenance = "") &&;

 private:
  Schema schema_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Generators.

// `dim` iid standard-normal columns named x0..x{dim-1}. With resolution > 0
// every value is snapped to the nearest multiple of `resolution`, giving the
// finite-cardinality variant used by the reconstruction experiments.
Dataset GenGauss(std::size_t dim, std::size_t n, uint64_t seed,
                 double resolution = 0.0);

// Snaps a standard-normal draw exactly as GenGauss does.
double QuantizeGauss(double z, double resolution);

// Six categorical columns (cardinalities 8, 6, 5, 5, 2, 2) drawn from a fixed
// mixture of 12 correlated profiles plus 2% uniform noise.
Dataset GenCensusLite(std::size_t n, uint64_t seed);

// Shuffled equal halves. Throws InvalidArgument on odd sizes.
std::pair<Dataset, Dataset> Split(const Dataset& ds, uint64_t seed);

// ---------------------------------------------------------------------------
// Outliers.

struct RadiusRule {
  double radius = 2.15;
};
struct GmmSmallestRule {
  std::size_t k = 10;
  std::size_t budget = 0;
  uint64_t seed = 0;
};
struct DesignatedClassRule {
  std::size_t column = 0;
  std::string label;
};
using OutlierRule = std::variant<RadiusRule, GmmSmallestRule,
                                 DesignatedClassRule>;

struct OutlierSet {
  std::vector<std::size_t> indices;  // sorted, unique
  OutlierRule rule;
};

// Default outlier budget: 10% of the rows.
std::size_t DefaultOutlierBudget(std::size_t n);

OutlierSet LabelOutliers(const Dataset& ds, const OutlierRule& rule);

// ---------------------------------------------------------------------------
// Discretization.

enum class BinStrategy { kUniform, kQuantile };

class Discretizer {
 public:
  static Discretizer Fit(const Dataset& ds, BinStrategy strategy,
                         std::size_t n_bins);

  // Continuous columns become categorical with labels b0..b{n_bins-1};
  // categorical columns pass through unchanged.
  Dataset Apply(const Dataset& ds) const;

  // Bin of `value` in continuous column `col`: values on an interior edge go
  // to the lower bin, everything above the last edge to the last bin.
  std::size_t BinOf(std::size_t col, double value) const;

  BinStrategy strategy() const { return strategy_; }
  std::size_t n_bins() const { return n_bins_; }
  // Interior edges for column `col` (empty for categorical columns).
  const std::vector<double>& edges(std::size_t col) const {
    return edges_[col];
  }
  const Schema& fitted_schema() const { return input_schema_; }
  const Schema& output_schema() const { return output_schema_; }

 private:
  BinStrategy strategy_ = BinStrategy::kUniform;
  std::size_t n_bins_ = 0;
  Schema input_schema_;
  Schema output_schema_;
  std::vector<std::vector<double>> edges_;
};

// ---------------------------------------------------------------------------
// CSV.
//
// Header cells are `name:kind`, kind in {cat, num}. A categorical kind may
// carry its ordered support, `name:cat(a|b|c)`, and a numeric kind its
// bounds, `name:num(lo|hi)`; without them the support is taken from the data
// in order of first appearance and bounds are unbounded. WriteCsv always
// emits the explicit forms so that write-then-read is the identity.

Dataset ParseCsv(std::string_view text, std::string provenance = "");
std::string FormatCsv(const Dataset& ds);
Dataset ReadCsv(const std::string& path);
void WriteCsv(const Dataset& ds, const std::string& path);

}  // namespace synthaudit

#endif  // SYNTHAUDIT_TABULAR_H_
