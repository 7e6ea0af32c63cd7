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

// The adversary. Everything here talks to the provider only through
// ProviderClient: membership and attribute inference by differencing the
// identical-match share, exact distance extraction by padding a query with
// copies of a record of known distance, and outlier reconstruction
// (locator, sampling rounds, column-wise search).

#ifndef SYNTHAUDIT_ATTACKS_H_
#define SYNTHAUDIT_ATTACKS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "synthaudit/metrics.h"
#include "synthaudit/mixture.h"
#include "synthaudit/provider.h"
#include "synthaudit/tabular.h"

namespace synthaudit {

enum class TargetMode { kOutliers, kAnyRecord };
enum class LocatorStrategy {
  // Smallest mixture components whose total size fits the budget.
  kSmallestClusters,
  // Lowest mixture log-density, as many rows as the budget allows.
  kLowDensity,
  // Either of the above: outliers inside small clusters or outside all.
  kCombined,
};

std::string_view TargetModeName(TargetMode mode);
TargetMode ParseTargetMode(std::string_view name);
std::string_view LocatorStrategyName(LocatorStrategy strategy);
LocatorStrategy ParseLocatorStrategy(std::string_view name);

struct LocatorConfig {
  std::size_t k = 10;
  // The adversary's guess of the number of train outliers.
  std::size_t n_out = 0;
  LocatorStrategy strategy = LocatorStrategy::kSmallestClusters;
};

struct AttackConfig {
  // Train size, assumed known to the adversary.
  std::size_t n_train = 0;
  std::size_t rounds = 1000;
  // Largest history distance the search revisits.
  double search_depth = 2;
  // Copies of the padding record per distance query.
  std::size_t padding_copies = 100;
  LocatorConfig locator;
  TargetMode target = TargetMode::kOutliers;
  bool run_search = true;
  // Search runs only while fewer than this fraction of n_out is found.
  double search_threshold = 1.0;
  // Also visit records the search adds to the history, not only those known
  // when it started.
  bool search_expand = true;
  // Total provider calls (sample + metrics) the attack may spend.
  std::optional<std::size_t> call_budget;
  uint64_t seed = 0;
};

// Throws InvalidArgument on zero rounds, zero depth, or fewer than one copy.
void ValidateAttackConfig(const AttackConfig& config);

// Records with their exact nearest-train distance, in insertion order.
class History {
 public:
  struct Entry {
    Record record;
    double distance;
  };

  bool Contains(std::span<const double> row) const;
  std::optional<double> Find(std::span<const double> row) const;
  // Inserts or keeps the existing entry; returns true if inserted.
  bool Add(std::span<const double> row, double distance);
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct PaddingRecord {
  Record record;
  double distance = 0.0;
  std::size_t copies = 0;
};

struct TraceEntry {
  std::string phase;  // "locator", "sample", "search", "one_call"
  std::size_t step = 0;
  std::size_t candidates = 0;
  std::size_t reconstructed_total = 0;
  CallStats calls;
};

struct AttackResult {
  Schema schema;
  std::vector<Record> reconstructed;
  // Parallel to `reconstructed`: phase and step that found each record.
  std::vector<std::string> found_in;
  CallStats calls_used;
  std::vector<TraceEntry> trace;
  bool budget_exhausted = false;
  std::optional<PaddingRecord> padding;
};

// Deterministic JSON (no timings), so equal runs give equal bytes.
std::string AttackResultToJson(const AttackResult& result);

// Bookkeeping shared by the attack phases: the call ledger and budget, the
// schema learned from the first sample, the padding record, the history and
// the reconstructed set.
class AttackSession {
 public:
  AttackSession(ProviderClient& client, AttackConfig config);

  Dataset Sample(std::size_t n, uint64_t seed);
  MetricsResponse Metrics(const Dataset& synth);

  const AttackConfig& config() const { return config_; }
  CallStats used() const { return used_; }
  // Known after the first sample (or SetSchema).
  const Schema& schema() const;
  void SetSchema(const Schema& schema);
  Metric metric() const { return DefaultMetric(schema()); }

  History& history() { return history_; }
  const History& history() const { return history_; }
  std::optional<PaddingRecord>& padding() { return padding_; }

  bool AddReconstructed(std::span<const double> row, const std::string& tag);
  bool IsReconstructed(std::span<const double> row) const;
  std::size_t reconstructed_count() const { return result_.reconstructed.size(); }
  void Trace(std::string phase, std::size_t step, std::size_t candidates);
  void MarkBudgetExhausted() { result_.budget_exhausted = true; }

  // Snapshot of the result so far.
  AttackResult Result() const;

 private:
  void Charge();

  ProviderClient& client_;
  AttackConfig config_;
  CallStats used_;
  std::optional<Schema> schema_;
  History history_;
  std::optional<PaddingRecord> padding_;
  std::unordered_map<std::string, std::size_t> reconstructed_keys_;
  AttackResult result_;
};

// ---------------------------------------------------------------------------
// Membership and attribute inference.

// A synthetic sample known to pass every test, with its match count.
struct DifferenceBase {
  Dataset synth;
  std::size_t matches = 0;
};

// Samples n_train rows until a sample passes all tests (at most
// `max_attempts` samples). If none does, the base becomes n_train copies of a
// certified padding record. Throws AttackError if that fails too.
DifferenceBase PrepareDifferenceBase(AttackSession& session,
                                     std::size_t max_attempts = 5);

struct MembershipDecision {
  bool member = false;
  // Change in matched rows between the two calls (0 or 1).
  long long match_delta = 0;
};

// Two metrics calls: M(base) and M(base + target). Member iff the match count
// rises (or the IMS flag flips to fail). Throws AttackError if a response is
// inconclusive (IMS passes but scores are withheld).
MembershipDecision DifferenceMembership(AttackSession& session,
                                        const DifferenceBase& base,
                                        std::span<const double> target);

struct AttributeDecision {
  uint32_t value = 0;
  // True when no completion raised the match count (all tie).
  bool low_confidence = false;
  std::vector<long long> match_counts;
};

// One metrics call per candidate code of `column`. `partial` holds the known
// values; its entry at `column` is ignored. Returns the completion with the
// highest match count, lowest code on ties.
AttributeDecision DifferenceAttribute(AttackSession& session,
                                      const DifferenceBase& base,
                                      std::span<const double> partial,
                                      std::size_t column,
                                      std::span<const uint32_t> candidates);

// ---------------------------------------------------------------------------
// Distance extraction.

// Samples records and certifies one as padding: m copies alone must pass all
// tests, and then its distance is the reported DCR mean. Candidates are
// tried most frequent first. Throws AttackError if none of `max_attempts`
// candidates passes.
PaddingRecord BootstrapPadding(AttackSession& session, std::size_t copies,
                               std::size_t max_attempts = 200);

// Exact nearest-train distance of `candidate` with one metrics call on
// padding copies plus the candidate. Throws AttackError when the response
// is inconclusive.
double ExtractDistance(AttackSession& session, const PaddingRecord& padding,
                       std::span<const double> candidate);

// ExtractDistance with the history as a cache: known records cost nothing,
// new ones are queried (doubling the padding on inconclusive answers) and
// recorded.
double DistanceOf(AttackSession& session, std::span<const double> candidate);

// ---------------------------------------------------------------------------
// Reconstruction.

class OutlierLocator {
 public:
  OutlierLocator(GmmModel model, std::vector<int> clusters,
                 LocatorStrategy strategy, double density_threshold);
  // Per-row flag: predicted to lie in an outlier region.
  std::vector<bool> Select(const Dataset& rows) const;
  bool Selects(std::span<const double> row) const;

  const GmmModel& model() const { return model_; }
  const std::vector<int>& clusters() const { return clusters_; }
  LocatorStrategy strategy() const { return strategy_; }
  double density_threshold() const { return density_threshold_; }

 private:
  GmmModel model_;
  std::vector<int> clusters_;
  std::vector<bool> is_outlier_cluster_;
  LocatorStrategy strategy_;
  double density_threshold_;
};

// Fits the locator on `sample`, selecting a budget of
// n_out * |sample| / n_train rows.
OutlierLocator FitLocator(const Dataset& sample, const AttackConfig& config);

// One sample call of 3 * n_train rows, then FitLocator.
OutlierLocator OutliersLocator(AttackSession& session);

// Rounds of sampling; rows passing the locator (all rows when `locator` is
// null) and absent from the history get exact distances; zeros are
// reconstructed. Stops early on budget exhaustion.
void SampleAttack(AttackSession& session, const OutlierLocator* locator);

// One sample call and one metrics call: fits the locator on the sample,
// ranks its outlier candidates by duplicate count and claims as many as the
// reported match count (all of them when the scores are withheld).
AttackResult SampleAttackOneCall(ProviderClient& client,
                                 const AttackConfig& config);

// Column-wise search around history records with distance <= search_depth.
// Categorical schemas only.
void SearchAttack(AttackSession& session, const OutlierLocator* locator);

// Locator (outlier mode only), SampleAttack, then SearchAttack if enabled and
// fewer than search_threshold * n_out records were found.
AttackResult ReconSyn(ProviderClient& client, const AttackConfig& config);

// ---------------------------------------------------------------------------
// Harness-side scoring.

struct AttackEvaluation {
  double recall = 0.0;
  double precision = 1.0;
  // Set when nothing was reconstructed; precision is then 1 by convention.
  bool precision_undefined = false;
  std::size_t targets = 0;
  std::size_t targets_found = 0;
  std::size_t reconstructed = 0;
  std::size_t reconstructed_in_train = 0;
  CallStats calls;
};

// recall = target rows whose record was reconstructed / target rows;
// precision = reconstructed records present in train / reconstructed.
// Throws InvalidArgument on an empty target set.
AttackEvaluation EvaluateAttack(const AttackResult& result,
                                const Dataset& train,
                                std::span<const std::size_t> targets);

}  // namespace synthaudit

#endif  // SYNTHAUDIT_ATTACKS_H_
