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

// Experiment plumbing: flat key=value configs, experiment specs, run reports
// with tidy measurements, and the counter-example reproductions and attack
// sweeps built on the rest of the library.

#ifndef SYNTHAUDIT_WORKBENCH_H_
#define SYNTHAUDIT_WORKBENCH_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthaudit/attacks.h"
#include "synthaudit/provider.h"
#include "synthaudit/synthesis.h"
#include "synthaudit/tabular.h"

namespace synthaudit {

// ---------------------------------------------------------------------------
// Configuration.

// One documented config key with its default (empty: no default).
struct ConfigKey {
  std::string_view name;
  std::string_view default_value;
  std::string_view help;
};

// Every key a config file or --set override may use.
const std::vector<ConfigKey>& DocumentedConfigKeys();

// A flat `key = value` document. Blank lines and lines starting with '#' are
// ignored; later assignments override earlier ones.
class Config {
 public:
  // Throws ParseError (with the line) on a line without '=' or an empty
  // key, and on keys that are not documented.
  static Config Parse(std::string_view text);
  static Config Load(const std::string& path);

  // Throws InvalidArgument on an undocumented key.
  void Set(const std::string& key, const std::string& value);
  bool Has(const std::string& key) const { return values_.count(key) > 0; }

  // Explicit value, else the documented default. Typed getters throw
  // InvalidArgument when the text does not parse.
  std::string GetString(const std::string& key) const;
  double GetDouble(const std::string& key) const;
  uint64_t GetUint(const std::string& key) const;
  bool GetBool(const std::string& key) const;
  std::optional<double> GetOptionalDouble(const std::string& key) const;
  // Comma-separated list; "inf" is accepted for infinity.
  std::vector<double> GetDoubleList(const std::string& key) const;
  std::vector<std::string> GetStringList(const std::string& key) const;

  // Explicit assignments only, sorted by key, one `key=value` per line.
  std::string Canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

// 64-bit FNV-1a.
uint64_t Fnv1a(std::string_view bytes);

// ---------------------------------------------------------------------------
// Experiment specs.

struct DatasetSpec {
  // "gauss", "censuslite" or "csv".
  std::string kind = "censuslite";
  std::size_t n = 6000;
  std::size_t dim = 2;
  double resolution = 0.0;
  std::string path;
};

struct OutlierSpec {
  // "radius", "gmm_smallest" or "auto" (radius for continuous data, smallest
  // GMM clusters for categorical data).
  std::string rule = "auto";
  double radius = 2.15;
  std::size_t k = 10;
  // 0 means the default of 10% of the train size.
  std::size_t budget = 0;
};

struct ExperimentSpec {
  DatasetSpec dataset;
  ModelSpec model;
  // Finite entries produce DP fits; infinity means non-private.
  std::vector<double> epsilons;
  std::optional<double> delta;
  FilterConfig filters;
  std::optional<std::size_t> quota;
  OutlierSpec outliers;
  AttackConfig attack;
  // "reconsyn", "one_call" or "difference".
  std::string attack_kind = "reconsyn";
  // Multiplies the labeled outlier count to give the adversary's n_out
  // when locator.n_out is 0.
  double n_out_slack = 1.0;
  std::size_t difference_targets = 100;
  std::vector<ModelKind> sweep_models;
  std::size_t utility_seeds = 5;
  // Utility samples hold this many times the train size, so sampling noise
  // does not mask the gap between privacy levels.
  std::size_t utility_scale = 10;
  std::string out_dir = ".";
  uint64_t seed = 0;
  // Hash of the canonical config text and the seed.
  std::string config_hash;
};

// Resolves every documented key (defaults included) into a spec.
ExperimentSpec SpecFromConfig(const Config& config);

// Loads the dataset the spec describes; deterministic in the spec seed.
Dataset LoadDataset(const ExperimentSpec& spec);

// Labels outliers on `train` according to the spec.
OutlierSet LabelSpecOutliers(const ExperimentSpec& spec, const Dataset& train);

// Provider over `data` for the spec's model and filters with an optional DP
// budget; its seed is derived from the spec seed.
ProviderConfig MakeProviderConfig(const ExperimentSpec& spec,
                                  std::optional<DpBudget> dp);

// ---------------------------------------------------------------------------
// Reports.

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

// One tidy measurement row.
struct Measurement {
  std::string cell;
  std::string metric;
  double value = 0.0;
};

struct Timing {
  std::string label;
  double seconds = 0.0;
};

struct RunReport {
  std::string name;
  uint64_t seed = 0;
  std::string config_hash;
  std::vector<Assertion> assertions;
  std::vector<Measurement> measurements;
  // Wall-clock data, kept out of ToJson so reports compare byte for byte.
  std::vector<Timing> timings;
  // Attack results as JSON, keyed by cell.
  std::map<std::string, std::string> attacks;

  void Check(std::string assertion, bool passed, std::string detail = "");
  void Measure(std::string cell, std::string metric, double value);
  void Time(std::string label, double seconds);

  bool passed() const;
  // Value of the first measurement with this cell and metric.
  std::optional<double> Find(std::string_view cell,
                             std::string_view metric) const;
};

// Deterministic JSON of everything but the timings.
std::string RunReportToJson(const RunReport& report);
// Parses RunReportToJson output (timings and attacks are not restored).
RunReport RunReportFromJson(const std::string& text);
// Header `experiment,cell,metric,value`; values printed with 17 significant
// digits.
std::string MeasurementsToCsv(const RunReport& report);
std::string TimingsToJson(const RunReport& report);

// Writes <dir>/<name>.json, <name>.csv, <name>.timings.json and one
// <name>.<cell>.attack.json per attack. Creates `dir` if needed.
void WriteRunReport(const RunReport& report, const std::string& dir);

// A plain-text summary (assertions and measurements) for terminals.
std::string RenderReport(const RunReport& report);

// ---------------------------------------------------------------------------
// Counter-examples. Every reproduction uses 2d Gauss with n = 2000 unless
// stated otherwise, and records its expected outcome as assertions.

// Synth is an exact copy of test.
RunReport Ce1(uint64_t seed);

// Train outliers nudged by at most 1e-6 per coordinate, plus the origin
// repeated five times the train size.
RunReport Ce2(uint64_t seed);

struct Ce3Options {
  std::vector<std::size_t> dims = {2, 3};
  // Oracle datasets of n_train rows pushed through the similarity filter.
  std::size_t n_datasets = 100000;
  // Grid spacing per dimensionality; the oracle and the data share it.
  std::map<std::size_t, double> resolution = {
      {2, 0.04}, {3, 0.1}, {4, 0.1}, {5, 0.1}};
  // A bin is a hole when nothing survived and at least this many samples
  // were expected there.
  double min_expected = 3.0;
  // Wall-clock cap per dimensionality; sampling stops early past it.
  double seconds_per_dim = 600.0;
};

// Swiss cheese: holes left by the similarity filter reveal train outliers.
RunReport Ce3(uint64_t seed, const Ce3Options& options = {});

struct Ce3TargetedOptions {
  std::size_t dim = 25;
  // Train records closer than this to the origin are removed.
  double clear_radius = 2.0;
  double tau = 0.5;
  // Probes per column, evenly spaced over [-span, span].
  std::size_t bins = 21;
  double span = 1.0;
  // Without conditional generation: oracle samples for the grid search.
  bool unconditioned = false;
  std::size_t unconditioned_samples = 2000000;
};

// A single target at the origin, found column by column with conditional
// probes (or by brute sampling in low dimension).
RunReport Ce3Targeted(uint64_t seed, const Ce3TargetedOptions& options = {});

// Pass rates of the three tests on oracle samples over a fixed split, and
// of a fixed oracle sample over random splits.
RunReport Ce4(uint64_t seed, std::size_t n_reps = 1000);

// Flag transitions when outlier filters are applied to oracle samples: the
// nearest-distance filter, and its density form scored by the k-th nearest
// train record (skipped when density_k is 0).
RunReport Ce5(uint64_t seed, std::size_t n_reps = 1000,
              double percentile = 95.0, std::size_t density_k = 5);

struct Ce6Options {
  std::vector<std::size_t> bins = {2, 5, 10, 20, 50, 100, 200, 500, 1000};
  std::size_t reps = 50;
  std::size_t baseline_reps = 1000;
  std::size_t dim = 25;
};

// Pass rates under Hamming distance on discretized 25d Gauss against the
// Euclidean baseline.
RunReport Ce6(uint64_t seed, const Ce6Options& options = {});

// ---------------------------------------------------------------------------
// Attack experiments.

// Runs the spec's attack (first epsilon of the grid, if any) against an
// in-process provider and scores it against the hidden train data.
RunReport RunAttack(const ExperimentSpec& spec);

// ReconSyn against every sweep model and epsilon, plus utility averaged over
// spec.utility_seeds fits per cell.
RunReport DpSweep(const ExperimentSpec& spec);

}  // namespace synthaudit

#endif  // SYNTHAUDIT_WORKBENCH_H_
