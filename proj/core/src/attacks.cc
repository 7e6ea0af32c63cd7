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

#include "synthaudit/attacks.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "json.hpp"
#include "synthaudit/errors.h"
#include "synthaudit/random.h"

namespace synthaudit {
namespace {

using Json = nlohmann::ordered_json;

// Number of matched rows implied by a reported share over `rows` rows.
long long MatchCount(double share, std::size_t rows) {
  return std::llround(share * static_cast<double>(rows));
}

Dataset WithRow(const Dataset& base, std::span<const double> row) {
  DatasetBuilder b(base.schema());
  b.Reserve(base.num_rows() + 1);
  for (std::size_t i = 0; i < base.num_rows(); ++i) b.AddRow(base.row(i));
  b.AddRow(row);
  return std::move(b).Build();
}

// Distinct rows of `ds` in order of first appearance with their multiplicity.
std::vector<std::pair<std::size_t, std::size_t>> DistinctRows(
    const Dataset& ds, const std::vector<bool>* keep) {
  std::unordered_map<std::string, std::size_t> pos;
  std::vector<std::pair<std::size_t, std::size_t>> out;  // (row, count)
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    if (keep != nullptr && !(*keep)[i]) continue;
    auto [it, fresh] = pos.try_emplace(RecordKey(ds.row(i)), out.size());
    if (fresh) {
      out.emplace_back(i, 1);
    } else {
      ++out[it->second].second;
    }
  }
  return out;
}

bool IsCategorical(const Schema& schema) {
  return std::all_of(schema.begin(), schema.end(),
                     [](const ColumnSchema& c) { return c.categorical(); });
}

}  // namespace

std::string_view TargetModeName(TargetMode mode) {
  return mode == TargetMode::kOutliers ? "outliers" : "any";
}

TargetMode ParseTargetMode(std::string_view name) {
  if (name == "outliers") return TargetMode::kOutliers;
  if (name == "any" || name == "any_record") return TargetMode::kAnyRecord;
  throw InvalidArgument("unknown target mode '" + std::string(name) +
                        "' (expected outliers or any)");
}

std::string_view LocatorStrategyName(LocatorStrategy strategy) {
  switch (strategy) {
    case LocatorStrategy::kSmallestClusters:
      return "smallest_clusters";
    case LocatorStrategy::kLowDensity:
      return "low_density";
    case LocatorStrategy::kCombined:
      return "combined";
  }
  return "?";
}

LocatorStrategy ParseLocatorStrategy(std::string_view name) {
  if (name == "smallest_clusters") return LocatorStrategy::kSmallestClusters;
  if (name == "low_density") return LocatorStrategy::kLowDensity;
  if (name == "combined") return LocatorStrategy::kCombined;
  throw InvalidArgument("unknown locator strategy '" + std::string(name) + "'");
}

void ValidateAttackConfig(const AttackConfig& config) {
  if (config.rounds == 0) throw InvalidArgument("rounds must be >= 1");
  if (!(config.search_depth >= 1)) throw InvalidArgument("search depth must be >= 1");
  if (config.padding_copies == 0) throw InvalidArgument("padding copies must be >= 1");
  if (config.n_train == 0) throw InvalidArgument("n_train must be positive");
  if (config.locator.k == 0) throw InvalidArgument("locator needs k >= 1");
}

// ---------------------------------------------------------------------------
// History and session.

bool History::Contains(std::span<const double> row) const {
  return index_.contains(RecordKey(row));
}

std::optional<double> History::Find(std::span<const double> row) const {
  auto it = index_.find(RecordKey(row));
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].distance;
}

bool History::Add(std::span<const double> row, double distance) {
  auto [it, fresh] = index_.try_emplace(RecordKey(row), entries_.size());
  if (!fresh) return false;
  entries_.push_back({Record(row.begin(), row.end()), distance});
  return true;
}

AttackSession::AttackSession(ProviderClient& client, AttackConfig config)
    : client_(client), config_(std::move(config)) {
  ValidateAttackConfig(config_);
}

void AttackSession::Charge() {
  if (config_.call_budget &&
      used_.sample_calls + used_.metric_calls >= *config_.call_budget) {
    throw BudgetExhausted("attack call budget of " +
                          std::to_string(*config_.call_budget) + " spent");
  }
}

Dataset AttackSession::Sample(std::size_t n, uint64_t seed) {
  Charge();
  Dataset out = client_.Sample(n, seed);
  ++used_.sample_calls;
  if (!schema_) schema_ = out.schema();
  return out;
}

MetricsResponse AttackSession::Metrics(const Dataset& synth) {
  Charge();
  MetricsResponse out = client_.Metrics(synth);
  ++used_.metric_calls;
  return out;
}

const Schema& AttackSession::schema() const {
  if (!schema_) throw AttackError("schema unknown before the first sample");
  return *schema_;
}

void AttackSession::SetSchema(const Schema& schema) { schema_ = schema; }

bool AttackSession::AddReconstructed(std::span<const double> row,
                                     const std::string& tag) {
  auto [it, fresh] =
      reconstructed_keys_.try_emplace(RecordKey(row), result_.reconstructed.size());
  if (!fresh) return false;
  result_.reconstructed.emplace_back(row.begin(), row.end());
  result_.found_in.push_back(tag);
  return true;
}

bool AttackSession::IsReconstructed(std::span<const double> row) const {
  return reconstructed_keys_.contains(RecordKey(row));
}

void AttackSession::Trace(std::string phase, std::size_t step,
                          std::size_t candidates) {
  result_.trace.push_back({std::move(phase), step, candidates,
                           result_.reconstructed.size(), used_});
}

AttackResult AttackSession::Result() const {
  AttackResult r = result_;
  if (schema_) r.schema = *schema_;
  r.calls_used = used_;
  r.padding = padding_;
  return r;
}

// ---------------------------------------------------------------------------
// Membership and attribute inference.

DifferenceBase PrepareDifferenceBase(AttackSession& session,
                                     std::size_t max_attempts) {
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Dataset synth = session.Sample(
        session.config().n_train,
        DeriveSeed(session.config().seed, "difference_base", attempt));
    if (synth.empty()) continue;
    MetricsResponse r = session.Metrics(synth);
    if (r.scores) {
      std::size_t matches =
          static_cast<std::size_t>(MatchCount(r.scores->ims.share_synth, synth.num_rows()));
      return {std::move(synth), matches};
    }
  }
  // Low-entropy data rarely yields a passing raw sample (NNDR fails on rows
  // matching a unique train record). Fall back to copies of a certified
  // padding record, which pass by construction.
  PaddingRecord padding = BootstrapPadding(session, session.config().n_train);
  DatasetBuilder b(session.schema());
  b.Reserve(padding.copies);
  for (std::size_t i = 0; i < padding.copies; ++i) b.AddRow(padding.record);
  return {std::move(b).Build(), padding.distance == 0.0 ? padding.copies : 0};
}

MembershipDecision DifferenceMembership(AttackSession& session,
                                        const DifferenceBase& base,
                                        std::span<const double> target) {
  const std::size_t n = base.synth.num_rows();
  MetricsResponse without = session.Metrics(base.synth);
  if (!without.scores) throw AttackError("base sample no longer passes");
  long long c0 = MatchCount(without.scores->ims.share_synth, n);
  MetricsResponse with = session.Metrics(WithRow(base.synth, target));
  long long c1;
  if (with.scores) {
    c1 = MatchCount(with.scores->ims.share_synth, n + 1);
  } else if (!with.ims) {
    // Appending a non-matching row can only lower the share, so a flip to
    // fail means the target matched.
    c1 = c0 + 1;
  } else {
    throw AttackError("inconclusive response: scores withheld but IMS passed");
  }
  return {c1 > c0, c1 - c0};
}

AttributeDecision DifferenceAttribute(AttackSession& session,
                                      const DifferenceBase& base,
                                      std::span<const double> partial,
                                      std::size_t column,
                                      std::span<const uint32_t> candidates) {
  if (candidates.empty()) throw InvalidArgument("no candidate values");
  const std::size_t n = base.synth.num_rows();
  AttributeDecision out;
  Record completion(partial.begin(), partial.end());
  std::size_t best = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    completion[column] = candidates[i];
    MetricsResponse r = session.Metrics(WithRow(base.synth, completion));
    long long count;
    if (r.scores) {
      count = MatchCount(r.scores->ims.share_synth, n + 1);
    } else if (!r.ims) {
      count = static_cast<long long>(base.matches) + 1;
    } else {
      throw AttackError("inconclusive response: scores withheld but IMS passed");
    }
    out.match_counts.push_back(count);
    if (count > out.match_counts[best]) best = i;
  }
  out.value = candidates[best];
  out.low_confidence =
      std::all_of(out.match_counts.begin(), out.match_counts.end(),
                  [&](long long c) { return c == out.match_counts.front(); });
  return out;
}

// ---------------------------------------------------------------------------
// Distance extraction.

PaddingRecord BootstrapPadding(AttackSession& session, std::size_t copies,
                               std::size_t max_attempts) {
  std::size_t attempts = 0;
  for (uint64_t draw = 0; attempts < max_attempts; ++draw) {
    Dataset sample = session.Sample(
        session.config().n_train, DeriveSeed(session.config().seed, "padding", draw));
    auto distinct = DistinctRows(sample, nullptr);
    if (distinct.empty()) continue;
    std::stable_sort(distinct.begin(), distinct.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [row, count] : distinct) {
      if (attempts++ >= max_attempts) break;
      auto record = sample.row(row);
      DatasetBuilder b(sample.schema());
      b.Reserve(copies);
      for (std::size_t i = 0; i < copies; ++i) b.AddRow(record);
      MetricsResponse r = session.Metrics(std::move(b).Build());
      if (!r.scores) continue;
      double d = r.scores->dcr.mean_synth;
      if (session.metric() == Metric::kHamming) d = std::round(d);
      PaddingRecord padding{Record(record.begin(), record.end()), d, copies};
      session.history().Add(record, d);
      return padding;
    }
  }
  throw AttackError("no padding record passed all tests within " +
                    std::to_string(max_attempts) + " attempts");
}

double ExtractDistance(AttackSession& session, const PaddingRecord& padding,
                       std::span<const double> candidate) {
  const std::size_t m = padding.copies;
  DatasetBuilder b(session.schema());
  b.Reserve(m + 1);
  for (std::size_t i = 0; i < m; ++i) b.AddRow(padding.record);
  b.AddRow(candidate);
  MetricsResponse r = session.Metrics(std::move(b).Build());
  if (r.scores) {
    // The padding never matches, so any match is the candidate.
    if (MatchCount(r.scores->ims.share_synth, m + 1) > 0) return 0.0;
    double d = r.scores->dcr.mean_synth * static_cast<double>(m + 1) -
               static_cast<double>(m) * padding.distance;
    if (session.metric() == Metric::kHamming) d = std::round(d);
    if (!(d > 0.0)) {
      throw AttackError("non-positive distance without an exact match");
    }
    return d;
  }
  if (!r.ims && r.dcr && r.nndr) return 0.0;
  throw AttackError("inconclusive distance query; retry with more padding");
}

double DistanceOf(AttackSession& session, std::span<const double> candidate) {
  if (auto known = session.history().Find(candidate)) return *known;
  auto& padding = session.padding();
  if (!padding) {
    padding = BootstrapPadding(session, session.config().padding_copies);
    if (auto known = session.history().Find(candidate)) return *known;
  }
  for (int attempt = 0;; ++attempt) {
    try {
      double d = ExtractDistance(session, *padding, candidate);
      session.history().Add(candidate, d);
      return d;
    } catch (const AttackError&) {
      // Copies of a certified padding record pass on their own for any
      // count, so more copies only dilute the candidate further.
      if (attempt >= 4) throw;
      padding->copies *= 2;
    }
  }
}

// ---------------------------------------------------------------------------
// Locator.

OutlierLocator::OutlierLocator(GmmModel model, std::vector<int> clusters,
                               LocatorStrategy strategy,
                               double density_threshold)
    : model_(std::move(model)),
      clusters_(std::move(clusters)),
      is_outlier_cluster_(model_.k(), false),
      strategy_(strategy),
      density_threshold_(density_threshold) {
  for (int c : clusters_) is_outlier_cluster_[c] = true;
}

bool OutlierLocator::Selects(std::span<const double> row) const {
  std::vector<double> x(model_.dim()), lp(model_.k());
  model_.encoder().Encode(row, x);
  model_.ComponentLogDensities(x, lp);
  if (strategy_ != LocatorStrategy::kLowDensity) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < lp.size(); ++c) {
      if (lp[c] > lp[best]) best = c;
    }
    if (is_outlier_cluster_[best]) return true;
    if (strategy_ == LocatorStrategy::kSmallestClusters) return false;
  }
  double m = *std::max_element(lp.begin(), lp.end());
  double s = 0.0;
  for (double v : lp) s += std::exp(v - m);
  return m + std::log(s) <= density_threshold_;
}

std::vector<bool> OutlierLocator::Select(const Dataset& rows) const {
  RequireSameSchema(model_.encoder().schema(), rows.schema(), "locator input");
  std::vector<bool> out(rows.num_rows());
  for (std::size_t i = 0; i < rows.num_rows(); ++i) out[i] = Selects(rows.row(i));
  return out;
}

OutlierLocator FitLocator(const Dataset& sample, const AttackConfig& config) {
  const LocatorConfig& lc = config.locator;
  GmmModel model =
      FitGmm(sample, lc.k, GmmOptions{.seed = DeriveSeed(config.seed, "locator_gmm")});
  // The budget refers to train-sized data; scale it to the sample.
  std::size_t budget = static_cast<std::size_t>(std::llround(
      static_cast<double>(lc.n_out) * static_cast<double>(sample.num_rows()) /
      static_cast<double>(config.n_train)));
  std::vector<int> chosen;
  if (lc.strategy != LocatorStrategy::kLowDensity) {
    chosen = SmallestClusters(model.k(), Predict(model, sample), budget);
  }
  double threshold = -std::numeric_limits<double>::infinity();
  if (lc.strategy != LocatorStrategy::kSmallestClusters && budget > 0) {
    std::vector<double> logp = LogDensity(model, sample);
    std::sort(logp.begin(), logp.end());
    threshold = logp[std::min(budget, logp.size()) - 1];
  }
  return OutlierLocator(std::move(model), std::move(chosen), lc.strategy,
                        threshold);
}

OutlierLocator OutliersLocator(AttackSession& session) {
  const AttackConfig& config = session.config();
  Dataset sample = session.Sample(3 * config.n_train, DeriveSeed(config.seed, "locator"));
  return FitLocator(sample, config);
}

// ---------------------------------------------------------------------------
// Reconstruction.

void SampleAttack(AttackSession& session, const OutlierLocator* locator) {
  const AttackConfig& config = session.config();
  try {
    for (std::size_t round = 0; round < config.rounds; ++round) {
      Dataset s = session.Sample(config.n_train,
                                 DeriveSeed(config.seed, "sample_round", round));
      std::vector<bool> keep;
      if (locator != nullptr && !s.empty()) keep = locator->Select(s);
      std::size_t candidates = 0;
      for (const auto& [row, count] :
           DistinctRows(s, locator != nullptr ? &keep : nullptr)) {
        auto record = s.row(row);
        if (session.history().Contains(record)) continue;
        ++candidates;
        if (DistanceOf(session, record) == 0.0) {
          session.AddReconstructed(record, "sample:" + std::to_string(round));
        }
      }
      session.Trace("sample", round, candidates);
    }
  } catch (const BudgetExhausted&) {
    session.MarkBudgetExhausted();
  }
}

void SearchAttack(AttackSession& session, const OutlierLocator* locator) {
  const Schema& schema = session.schema();
  if (!IsCategorical(schema)) {
    throw InvalidArgument("search needs categorical columns");
  }
  const double depth = session.config().search_depth;
  // Snapshot, ascending distance then insertion order.
  std::vector<History::Entry> plan;
  for (const History::Entry& e : session.history().entries()) {
    if (e.distance <= depth) plan.push_back(e);
  }
  std::stable_sort(plan.begin(), plan.end(),
                   [](const auto& a, const auto& b) { return a.distance < b.distance; });
  auto selects = [&](const Record& r) {
    return locator == nullptr || locator->Selects(r);
  };
  // Records the search itself adds join the plan in insertion order.
  std::size_t seen = session.history().size();
  auto extend_plan = [&] {
    const auto& entries = session.history().entries();
    for (; seen < entries.size(); ++seen) {
      if (entries[seen].distance <= depth) plan.push_back(entries[seen]);
    }
  };
  std::size_t step = 0;
  try {
    for (std::size_t next = 0; next < plan.size(); ++next) {
      const History::Entry entry = plan[next];
      const Record& s = entry.record;
      const double dist_s = entry.distance;
      // Neighboring dataset: one row per column, that column moved to the
      // next category. Columns whose move did not push the record farther
      // away are the ones still wrong.
      std::vector<std::size_t> open_columns;
      for (std::size_t c = 0; c < schema.size(); ++c) {
        std::size_t card = schema[c].cardinality();
        if (card < 2) continue;
        Record moved = s;
        moved[c] = static_cast<double>((static_cast<std::size_t>(s[c]) + 1) % card);
        double d = DistanceOf(session, moved);
        // An exact match is a train record whether or not the locator
        // would have proposed it.
        if (d == 0.0) session.AddReconstructed(moved, "search");
        if (d <= dist_s) open_columns.push_back(c);
      }
      // Each open column is tried over its full support on the record
      // itself, which reaches every match one column away. A greedy copy
      // keeps the best improvement so far, so matches two columns away are
      // reachable too.
      Record current = s;
      double current_d = dist_s;
      for (std::size_t c : open_columns) {
        std::vector<const Record*> bases = {&s};
        if (current != s && current_d > 0.0) bases.push_back(&current);
        Record best;
        double best_d = current_d;
        for (const Record* base : bases) {
          for (std::size_t v = 0; v < schema[c].cardinality(); ++v) {
            if (static_cast<double>(v) == (*base)[c]) continue;
            Record cand = *base;
            cand[c] = static_cast<double>(v);
            if (!selects(cand)) continue;
            double d = DistanceOf(session, cand);
            if (d == 0.0) session.AddReconstructed(cand, "search");
            if (d < best_d) {
              best_d = d;
              best = std::move(cand);
            }
          }
        }
        if (best_d < current_d) {
          current = std::move(best);
          current_d = best_d;
        }
      }
      if (++step % 100 == 0) session.Trace("search", step, plan.size());
      if (session.config().search_expand) extend_plan();
    }
  } catch (const BudgetExhausted&) {
    session.MarkBudgetExhausted();
  }
  session.Trace("search", step, plan.size());
}

AttackResult ReconSyn(ProviderClient& client, const AttackConfig& config) {
  AttackSession session(client, config);
  std::optional<OutlierLocator> locator;
  try {
    if (config.target == TargetMode::kOutliers) {
      locator = OutliersLocator(session);
      session.Trace("locator", 0, locator->clusters().size());
    }
  } catch (const BudgetExhausted&) {
    session.MarkBudgetExhausted();
    return session.Result();
  }
  const OutlierLocator* loc = locator ? &*locator : nullptr;
  SampleAttack(session, loc);
  const bool below_target =
      config.target == TargetMode::kAnyRecord ||
      static_cast<double>(session.reconstructed_count()) <
          config.search_threshold * static_cast<double>(config.locator.n_out);
  if (config.run_search && !session.Result().budget_exhausted &&
      session.history().size() > 0 && IsCategorical(session.schema()) &&
      below_target) {
    SearchAttack(session, loc);
  }
  return session.Result();
}

AttackResult SampleAttackOneCall(ProviderClient& client,
                                 const AttackConfig& config) {
  AttackSession session(client, config);
  Dataset s = session.Sample(config.n_train, DeriveSeed(config.seed, "one_call"));
  std::vector<bool> keep(s.num_rows(), true);
  if (config.target == TargetMode::kOutliers && s.num_rows() >= config.locator.k) {
    keep = FitLocator(s, config).Select(s);
  }
  auto distinct = DistinctRows(s, &keep);
  std::stable_sort(distinct.begin(), distinct.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::size_t claim = 0;
  if (!s.empty()) {
    MetricsResponse r = session.Metrics(s);
    if (r.scores) {
      claim = static_cast<std::size_t>(
          std::max(0LL, MatchCount(r.scores->ims.share_synth, s.num_rows())));
    } else if (!r.ims) {
      claim = distinct.size();
    }
  }
  claim = std::min(claim, distinct.size());
  for (std::size_t i = 0; i < claim; ++i) {
    session.AddReconstructed(s.row(distinct[i].first), "one_call");
  }
  session.Trace("one_call", 0, distinct.size());
  return session.Result();
}

// ---------------------------------------------------------------------------
// Evaluation and serialization.

AttackEvaluation EvaluateAttack(const AttackResult& result,
                                const Dataset& train,
                                std::span<const std::size_t> targets) {
  if (targets.empty()) throw InvalidArgument("empty target set");
  std::unordered_set<std::string> found;
  for (const Record& r : result.reconstructed) found.insert(RecordKey(r));
  RecordSet train_keys(train);
  AttackEvaluation e;
  e.targets = targets.size();
  for (std::size_t t : targets) {
    if (t >= train.num_rows()) throw InvalidArgument("target index out of range");
    e.targets_found += found.contains(RecordKey(train.row(t)));
  }
  e.recall = static_cast<double>(e.targets_found) / static_cast<double>(e.targets);
  e.reconstructed = result.reconstructed.size();
  for (const Record& r : result.reconstructed) e.reconstructed_in_train += train_keys.Contains(r);
  if (e.reconstructed == 0) {
    e.precision = 1.0;
    e.precision_undefined = true;
  } else {
    e.precision = static_cast<double>(e.reconstructed_in_train) /
                  static_cast<double>(e.reconstructed);
  }
  e.calls = result.calls_used;
  return e;
}

std::string AttackResultToJson(const AttackResult& result) {
  auto records = [&](const std::vector<Record>& rows) {
    if (rows.empty()) return Json::array();
    return Json::parse(EncodeRecords(Dataset::FromRows(result.schema, rows)))
        .at("records");
  };
  Json j;
  j["schema"] = Json::parse(SchemaToJson(result.schema));
  j["reconstructed"] = records(result.reconstructed);
  j["found_in"] = result.found_in;
  j["calls_used"] = {{"sample_calls", result.calls_used.sample_calls},
                     {"metric_calls", result.calls_used.metric_calls}};
  j["budget_exhausted"] = result.budget_exhausted;
  if (result.padding) {
    j["padding"] = {{"record", records({result.padding->record})[0]},
                    {"distance", result.padding->distance},
                    {"copies", result.padding->copies}};
  } else {
    j["padding"] = nullptr;
  }
  Json trace = Json::array();
  for (const TraceEntry& t : result.trace) {
    trace.push_back({{"phase", t.phase},
                     {"step", t.step},
                     {"candidates", t.candidates},
                     {"reconstructed_total", t.reconstructed_total},
                     {"sample_calls", t.calls.sample_calls},
                     {"metric_calls", t.calls.metric_calls}});
  }
  j["trace"] = std::move(trace);
  return j.dump(2);
}

}  // namespace synthaudit
