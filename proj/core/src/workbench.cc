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

#include "synthaudit/workbench.h"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "synthaudit/errors.h"
#include "synthaudit/metrics.h"
#include "synthaudit/random.h"

namespace synthaudit {
namespace {

using Json = nlohmann::ordered_json;

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

const ConfigKey* FindKey(std::string_view name) {
  for (const ConfigKey& k : DocumentedConfigKeys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string_view t = Trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

double ParseDouble(const std::string& key, const std::string& text) {
  if (text == "inf" || text == "+inf") {
    return std::numeric_limits<double>::infinity();
  }
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("config key '" + key + "': '" + text +
                        "' is not a number");
}

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Short label for an epsilon in cell names.
std::string EpsilonLabel(double eps) {
  if (std::isinf(eps)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", eps);
  return buf;
}

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Config.

const std::vector<ConfigKey>& DocumentedConfigKeys() {
  static const std::vector<ConfigKey> keys = {
      {"seed", "0", "master seed; every component derives its stream from it"},
      {"out", ".", "output directory for reports"},
      {"dataset.kind", "censuslite", "gauss | censuslite | csv"},
      {"dataset.n", "6000", "rows to generate (before the train/test split)"},
      {"dataset.dim", "2", "gauss dimensionality"},
      {"dataset.resolution", "0", "gauss grid spacing; 0 keeps it continuous"},
      {"dataset.path", "", "CSV file for dataset.kind = csv"},
      {"model.kind", "independent",
       "oracle | random | independent | privbayes_lite | external"},
      {"model.max_parents", "2", "privbayes_lite parents per node"},
      {"model.external_dir", "", "directory of CSV samples for external"},
      {"dp.epsilon", "inf", "comma-separated epsilon grid; inf = no DP"},
      {"dp.delta", "", "DP delta; empty means 1/n_train"},
      {"filter.similarity_tau", "", "similarity filter threshold; empty = off"},
      {"filter.outlier_percentile", "",
       "outlier filter percentile; empty = off"},
      {"provider.quota", "", "total provider calls; empty = unlimited"},
      {"outliers.rule", "auto", "auto | radius | gmm_smallest"},
      {"outliers.radius", "2.15", "radius rule threshold"},
      {"outliers.k", "10", "mixture components for gmm_smallest"},
      {"outliers.budget", "0", "gmm_smallest budget; 0 = 10% of train"},
      {"attack.kind", "reconsyn", "reconsyn | one_call | difference"},
      {"attack.rounds", "1000", "SampleAttack rounds"},
      {"attack.search_depth", "2", "SearchAttack history depth"},
      {"attack.padding_copies", "100", "padding copies per distance query"},
      {"attack.target", "outliers", "outliers | any_record"},
      {"attack.run_search", "true", "run SearchAttack after sampling"},
      {"attack.search_threshold", "1",
       "search only while fewer than this fraction of n_out is found"},
      {"attack.call_budget", "", "attack-side call budget; empty = none"},
      {"attack.targets", "100",
       "difference attack: members and non-members each"},
      {"locator.k", "10", "locator mixture components"},
      {"locator.n_out", "0",
       "adversary's outlier count; 0 = labeled count times locator.slack"},
      {"locator.slack", "1", "multiplier on the labeled outlier count"},
      {"locator.strategy", "auto",
       "auto | smallest_clusters | low_density | combined"},
      {"sweep.models", "independent,privbayes_lite", "models in sweep dp"},
      {"sweep.utility_seeds", "5", "fits averaged per utility cell"},
      {"sweep.utility_scale", "10",
       "utility sample size as a multiple of the train size"},
      {"ce3.dims", "2,3", "dimensionalities for reproduce ce3"},
      {"ce3.datasets", "100000", "oracle datasets per dimensionality"},
      {"ce3.min_expected", "3", "expected samples that make an empty bin a hole"},
      {"ce3.seconds_per_dim", "600", "wall-clock cap per dimensionality"},
      {"ce3t.dim", "25", "targeted variant dimensionality"},
      {"ce3t.unconditioned", "false", "targeted variant without conditioning"},
      {"ce4.reps", "1000", "oracle samples and random splits"},
      {"ce5.reps", "1000", "oracle samples"},
      {"ce5.percentile", "95", "outlier filter percentile"},
      {"ce6.bins", "2,5,10,20,50,100,200,500,1000", "bin counts"},
      {"ce6.reps", "50", "oracle samples per discretized cell"},
      {"ce6.baseline_reps", "1000", "oracle samples for the Euclidean baseline"},
  };
  return keys;
}

Config Config::Parse(std::string_view text) {
  Config config;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    std::string_view t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", line_no, 0);
    }
    std::string key(Trim(t.substr(0, eq)));
    std::string value(Trim(t.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", line_no, 1);
    if (FindKey(key) == nullptr) {
      throw ParseError("unknown config key '" + key + "'", line_no, 1);
    }
    config.values_[key] = value;
  }
  return config;
}

Config Config::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

void Config::Set(const std::string& key, const std::string& value) {
  if (FindKey(key) == nullptr) {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
  values_[key] = value;
}

std::string Config::GetString(const std::string& key) const {
  auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  const ConfigKey* k = FindKey(key);
  if (k == nullptr) throw InvalidArgument("unknown config key '" + key + "'");
  return std::string(k->default_value);
}

double Config::GetDouble(const std::string& key) const {
  return ParseDouble(key, GetString(key));
}

uint64_t Config::GetUint(const std::string& key) const {
  std::string text = GetString(key);
  try {
    std::size_t used = 0;
    if (!text.empty() && text.front() != '-') {
      uint64_t v = std::stoull(text, &used);
      if (used == text.size()) return v;
    }
  } catch (const std::exception&) {
  }
  throw InvalidArgument("config key '" + key + "': '" + text +
                        "' is not a nonnegative integer");
}

bool Config::GetBool(const std::string& key) const {
  std::string text = GetString(key);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidArgument("config key '" + key + "': '" + text +
                        "' is not a boolean");
}

std::optional<double> Config::GetOptionalDouble(const std::string& key) const {
  std::string text = GetString(key);
  if (text.empty()) return std::nullopt;
  return ParseDouble(key, text);
}

std::vector<double> Config::GetDoubleList(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : SplitList(GetString(key))) {
    out.push_back(ParseDouble(key, item));
  }
  return out;
}

std::vector<std::string> Config::GetStringList(const std::string& key) const {
  return SplitList(GetString(key));
}

std::string Config::Canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

uint64_t Fnv1a(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Specs.

ExperimentSpec SpecFromConfig(const Config& config) {
  ExperimentSpec spec;
  spec.seed = config.GetUint("seed");
  spec.out_dir = config.GetString("out");

  spec.dataset.kind = config.GetString("dataset.kind");
  if (spec.dataset.kind != "gauss" && spec.dataset.kind != "censuslite" &&
      spec.dataset.kind != "csv") {
    throw InvalidArgument("dataset.kind must be gauss, censuslite or csv");
  }
  spec.dataset.n = config.GetUint("dataset.n");
  spec.dataset.dim = config.GetUint("dataset.dim");
  spec.dataset.resolution = config.GetDouble("dataset.resolution");
  spec.dataset.path = config.GetString("dataset.path");
  if (spec.dataset.kind == "csv" && spec.dataset.path.empty()) {
    throw InvalidArgument("dataset.kind = csv needs dataset.path");
  }

  spec.model.kind = ParseModelKind(config.GetString("model.kind"));
  spec.model.max_parents = config.GetUint("model.max_parents");
  spec.model.external_dir = config.GetString("model.external_dir");
  spec.model.oracle_dim = spec.dataset.dim;
  spec.model.oracle_resolution = spec.dataset.resolution;

  spec.epsilons = config.GetDoubleList("dp.epsilon");
  if (spec.epsilons.empty()) {
    spec.epsilons.push_back(std::numeric_limits<double>::infinity());
  }
  for (double eps : spec.epsilons) {
    if (!(eps > 0.0)) throw InvalidArgument("dp.epsilon entries must be > 0");
  }
  spec.delta = config.GetOptionalDouble("dp.delta");
  spec.filters.similarity_tau =
      config.GetOptionalDouble("filter.similarity_tau");
  spec.filters.outlier_percentile =
      config.GetOptionalDouble("filter.outlier_percentile");
  if (!config.GetString("provider.quota").empty()) {
    spec.quota = config.GetUint("provider.quota");
  }

  spec.outliers.rule = config.GetString("outliers.rule");
  if (spec.outliers.rule != "auto" && spec.outliers.rule != "radius" &&
      spec.outliers.rule != "gmm_smallest") {
    throw InvalidArgument("outliers.rule must be auto, radius or gmm_smallest");
  }
  spec.outliers.radius = config.GetDouble("outliers.radius");
  spec.outliers.k = config.GetUint("outliers.k");
  spec.outliers.budget = config.GetUint("outliers.budget");

  spec.attack_kind = config.GetString("attack.kind");
  if (spec.attack_kind != "reconsyn" && spec.attack_kind != "one_call" &&
      spec.attack_kind != "difference") {
    throw InvalidArgument("attack.kind must be reconsyn, one_call or difference");
  }
  AttackConfig& a = spec.attack;
  a.rounds = config.GetUint("attack.rounds");
  a.search_depth = config.GetDouble("attack.search_depth");
  a.padding_copies = config.GetUint("attack.padding_copies");
  a.target = ParseTargetMode(config.GetString("attack.target"));
  a.run_search = config.GetBool("attack.run_search");
  a.search_threshold = config.GetDouble("attack.search_threshold");
  if (!config.GetString("attack.call_budget").empty()) {
    a.call_budget = config.GetUint("attack.call_budget");
  }
  spec.difference_targets = config.GetUint("attack.targets");
  a.locator.k = config.GetUint("locator.k");
  a.locator.n_out = config.GetUint("locator.n_out");
  spec.n_out_slack = config.GetDouble("locator.slack");
  std::string strategy = config.GetString("locator.strategy");
  if (strategy == "auto") {
    // Continuous outliers sit in the tails; categorical ones form small
    // clusters or fall between them.
    a.locator.strategy = spec.dataset.kind == "gauss"
                             ? LocatorStrategy::kLowDensity
                             : LocatorStrategy::kCombined;
  } else {
    a.locator.strategy = ParseLocatorStrategy(strategy);
  }
  a.seed = DeriveSeed(spec.seed, "attack");

  for (const std::string& m : config.GetStringList("sweep.models")) {
    spec.sweep_models.push_back(ParseModelKind(m));
  }
  spec.utility_seeds = config.GetUint("sweep.utility_seeds");
  spec.utility_scale = config.GetUint("sweep.utility_scale");
  if (spec.utility_scale == 0) {
    throw InvalidArgument("sweep.utility_scale must be at least 1");
  }

  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016" PRIx64,
                Fnv1a(config.Canonical() + "seed=" +
                      std::to_string(spec.seed) + "\n"));
  spec.config_hash = hash;
  return spec;
}

Dataset LoadDataset(const ExperimentSpec& spec) {
  const DatasetSpec& d = spec.dataset;
  uint64_t seed = DeriveSeed(spec.seed, "dataset");
  if (d.kind == "gauss") return GenGauss(d.dim, d.n, seed, d.resolution);
  if (d.kind == "censuslite") return GenCensusLite(d.n, seed);
  return ReadCsv(d.path);
}

OutlierSet LabelSpecOutliers(const ExperimentSpec& spec, const Dataset& train) {
  std::string rule = spec.outliers.rule;
  if (rule == "auto") rule = train.AllContinuous() ? "radius" : "gmm_smallest";
  if (rule == "radius") {
    return LabelOutliers(train, RadiusRule{spec.outliers.radius});
  }
  std::size_t budget = spec.outliers.budget > 0
                           ? spec.outliers.budget
                           : DefaultOutlierBudget(train.num_rows());
  return LabelOutliers(train,
                       GmmSmallestRule{spec.outliers.k, budget,
                                       DeriveSeed(spec.seed, "outliers")});
}

ProviderConfig MakeProviderConfig(const ExperimentSpec& spec,
                                  std::optional<DpBudget> dp) {
  ProviderConfig pc;
  pc.model = spec.model;
  pc.dp = dp;
  pc.filters = spec.filters;
  pc.quota = spec.quota;
  pc.seed = DeriveSeed(spec.seed, "provider");
  return pc;
}

// ---------------------------------------------------------------------------
// Reports.

void RunReport::Check(std::string assertion, bool ok, std::string detail) {
  assertions.push_back({std::move(assertion), ok, std::move(detail)});
}

void RunReport::Measure(std::string cell, std::string metric, double value) {
  measurements.push_back({std::move(cell), std::move(metric), value});
}

void RunReport::Time(std::string label, double seconds) {
  timings.push_back({std::move(label), seconds});
}

bool RunReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const Assertion& a) { return a.passed; });
}

std::optional<double> RunReport::Find(std::string_view cell,
                                      std::string_view metric) const {
  for (const Measurement& m : measurements) {
    if (m.cell == cell && m.metric == metric) return m.value;
  }
  return std::nullopt;
}

std::string RunReportToJson(const RunReport& report) {
  Json j;
  j["name"] = report.name;
  j["seed"] = report.seed;
  j["config_hash"] = report.config_hash;
  j["passed"] = report.passed();
  j["assertions"] = Json::array();
  for (const Assertion& a : report.assertions) {
    j["assertions"].push_back(
        {{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  }
  j["measurements"] = Json::array();
  for (const Measurement& m : report.measurements) {
    // Infinities and NaNs have no JSON form; they travel as strings.
    Json value = std::isfinite(m.value) ? Json(m.value)
                                        : Json(FormatDouble(m.value));
    j["measurements"].push_back(
        {{"cell", m.cell}, {"metric", m.metric}, {"value", value}});
  }
  j["attacks"] = Json::object();
  for (const auto& [cell, text] : report.attacks) {
    j["attacks"][cell] = Json::parse(text);
  }
  return j.dump(2) + "\n";
}

RunReport RunReportFromJson(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 1, e.byte);
  }
  RunReport r;
  try {
    r.name = j.at("name").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    for (const Json& a : j.at("assertions")) {
      r.Check(a.at("name").get<std::string>(), a.at("passed").get<bool>(),
              a.at("detail").get<std::string>());
    }
    for (const Json& m : j.at("measurements")) {
      const Json& v = m.at("value");
      double value = v.is_string() ? ParseDouble("value", v.get<std::string>())
                                   : v.get<double>();
      r.Measure(m.at("cell").get<std::string>(),
                m.at("metric").get<std::string>(), value);
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad report: ") + e.what(), 1, 0);
  }
  return r;
}

std::string MeasurementsToCsv(const RunReport& report) {
  std::string out = "experiment,cell,metric,value\n";
  for (const Measurement& m : report.measurements) {
    out += report.name + "," + m.cell + "," + m.metric + "," +
           FormatDouble(m.value) + "\n";
  }
  return out;
}

std::string TimingsToJson(const RunReport& report) {
  Json j = Json::object();
  for (const Timing& t : report.timings) j[t.label] = t.seconds;
  return j.dump(2) + "\n";
}

void WriteRunReport(const RunReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + dir + "/" + name + "'");
    out << text;
  };
  write(report.name + ".json", RunReportToJson(report));
  write(report.name + ".csv", MeasurementsToCsv(report));
  write(report.name + ".timings.json", TimingsToJson(report));
  for (const auto& [cell, text] : report.attacks) {
    std::string file = cell;
    std::replace_if(
        file.begin(), file.end(),
        [](char c) { return !(std::isalnum(static_cast<unsigned char>(c)) ||
                              c == '_' || c == '-' || c == '.'); },
        '_');
    write(report.name + "." + file + ".attack.json", text);
  }
}

std::string RenderReport(const RunReport& report) {
  std::ostringstream out;
  out << report.name << " (seed " << report.seed << ", config "
      << report.config_hash << "): " << (report.passed() ? "PASS" : "FAIL")
      << "\n";
  for (const Assertion& a : report.assertions) {
    out << "  [" << (a.passed ? "ok" : "FAILED") << "] " << a.name;
    if (!a.detail.empty()) out << ": " << a.detail;
    out << "\n";
  }
  for (const Measurement& m : report.measurements) {
    out << "  " << m.cell << " " << m.metric << " = " << FormatDouble(m.value)
        << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Attack experiments.

namespace {

std::optional<DpBudget> BudgetFor(double eps, std::optional<double> delta) {
  if (std::isinf(eps)) return std::nullopt;
  return DpBudget{eps, delta};
}

AttackConfig AdversaryConfig(const ExperimentSpec& spec, std::size_t n_train,
                             std::size_t labeled_outliers) {
  AttackConfig a = spec.attack;
  a.n_train = n_train;
  if (a.locator.n_out == 0) {
    a.locator.n_out = static_cast<std::size_t>(
        std::llround(spec.n_out_slack * static_cast<double>(labeled_outliers)));
  }
  return a;
}

void MeasureAttack(RunReport& report, const std::string& cell,
                   const AttackResult& result, const Dataset& train,
                   const OutlierSet& outliers, const CallStats& observed) {
  if (!outliers.indices.empty()) {
    AttackEvaluation ev = EvaluateAttack(result, train, outliers.indices);
    report.Measure(cell, "outliers", static_cast<double>(ev.targets));
    report.Measure(cell, "outliers_found", static_cast<double>(ev.targets_found));
    report.Measure(cell, "recall_outliers", ev.recall);
  }
  std::vector<std::size_t> all = AllRows(train.num_rows());
  AttackEvaluation ev_all = EvaluateAttack(result, train, all);
  report.Measure(cell, "recall_all", ev_all.recall);
  report.Measure(cell, "precision", ev_all.precision);
  report.Measure(cell, "reconstructed", static_cast<double>(ev_all.reconstructed));
  report.Measure(cell, "sample_calls",
                 static_cast<double>(result.calls_used.sample_calls));
  report.Measure(cell, "metric_calls",
                 static_cast<double>(result.calls_used.metric_calls));
  report.Measure(cell, "budget_exhausted", result.budget_exhausted ? 1.0 : 0.0);
  report.Check(cell + ": call ledger matches the provider",
               observed == result.calls_used,
               "attack reports " +
                   std::to_string(result.calls_used.sample_calls) + "+" +
                   std::to_string(result.calls_used.metric_calls) +
                   ", provider saw " + std::to_string(observed.sample_calls) +
                   "+" + std::to_string(observed.metric_calls));
  report.Check(cell + ": precision is 1", ev_all.reconstructed_in_train ==
                                              ev_all.reconstructed,
               std::to_string(ev_all.reconstructed_in_train) + " of " +
                   std::to_string(ev_all.reconstructed) + " in train");
}

// Area under the ROC curve of `scores` (members positive), ties counted
// as one half.
double Auc(const std::vector<double>& members,
           const std::vector<double>& non_members) {
  double wins = 0.0;
  for (double m : members) {
    for (double n : non_members) wins += m > n ? 1.0 : (m == n ? 0.5 : 0.0);
  }
  return wins / static_cast<double>(members.size() * non_members.size());
}

void RunDifference(RunReport& report, const ExperimentSpec& spec,
                   Provider& provider, const std::string& cell) {
  const Dataset& train = harness::HiddenTrain(provider);
  const Dataset& test = harness::HiddenTest(provider);
  AuditingClient audit(provider);
  AttackConfig a = AdversaryConfig(spec, train.num_rows(), 0);
  AttackSession session(audit, a);
  DifferenceBase base = PrepareDifferenceBase(session);
  const CallStats setup = session.used();

  Rng rng = MakeRng(spec.seed, "difference_targets");
  RecordSet train_keys(train);
  std::vector<std::size_t> members = AllRows(train.num_rows());
  std::shuffle(members.begin(), members.end(), rng);
  members.resize(std::min(members.size(), spec.difference_targets));
  std::vector<std::size_t> non_members;
  {
    std::vector<std::size_t> order = AllRows(test.num_rows());
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      if (non_members.size() == spec.difference_targets) break;
      if (!train_keys.Contains(test.row(i))) non_members.push_back(i);
    }
  }

  std::vector<double> member_scores, non_member_scores;
  std::size_t correct = 0;
  for (std::size_t i : members) {
    MembershipDecision d = DifferenceMembership(session, base, train.row(i));
    member_scores.push_back(static_cast<double>(d.match_delta));
    correct += d.member;
  }
  for (std::size_t i : non_members) {
    MembershipDecision d = DifferenceMembership(session, base, test.row(i));
    non_member_scores.push_back(static_cast<double>(d.match_delta));
    correct += !d.member;
  }
  const CallStats after_membership = session.used();
  const double targets =
      static_cast<double>(members.size() + non_members.size());
  const double membership_calls = static_cast<double>(
      after_membership.metric_calls - setup.metric_calls);
  double auc = non_members.empty() || members.empty()
                   ? std::numeric_limits<double>::quiet_NaN()
                   : Auc(member_scores, non_member_scores);
  report.Measure(cell, "members", static_cast<double>(members.size()));
  report.Measure(cell, "non_members", static_cast<double>(non_members.size()));
  report.Measure(cell, "membership_auc", auc);
  report.Measure(cell, "membership_accuracy",
                 static_cast<double>(correct) / targets);
  report.Measure(cell, "membership_calls_per_target",
                 membership_calls / targets);
  report.Check(cell + ": membership AUC is 1", auc == 1.0,
               "AUC " + FormatDouble(auc));

  if (!train.AllCategorical()) return;
  // Attribute inference: hide one column of a train record and try every
  // code. A target counts only when its hidden value is determined by the
  // other columns within train; otherwise two completions are members.
  auto masked_key = [&](std::span<const double> row, std::size_t col) {
    Record r(row.begin(), row.end());
    r[col] = -1.0;
    return std::to_string(col) + "|" + RecordKey(r);
  };
  std::unordered_map<std::string, std::unordered_set<double>> values;
  for (std::size_t i = 0; i < train.num_rows(); ++i) {
    for (std::size_t c = 0; c < train.num_cols(); ++c) {
      values[masked_key(train.row(i), c)].insert(train.at(i, c));
    }
  }
  std::size_t attempted = 0, skipped = 0, right = 0, low_confidence = 0;
  std::size_t exact_k = 0;
  long long attribute_calls = 0;
  std::uniform_int_distribution<std::size_t> pick_col(0, train.num_cols() - 1);
  std::vector<std::size_t> order = AllRows(train.num_rows());
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i : order) {
    if (attempted == spec.difference_targets) break;
    std::size_t col = pick_col(rng);
    if (values[masked_key(train.row(i), col)].size() != 1) {
      ++skipped;
      continue;
    }
    std::vector<uint32_t> candidates(train.schema()[col].cardinality());
    for (uint32_t v = 0; v < candidates.size(); ++v) candidates[v] = v;
    const std::size_t before = session.used().metric_calls;
    AttributeDecision d =
        DifferenceAttribute(session, base, train.row(i), col, candidates);
    const std::size_t spent = session.used().metric_calls - before;
    attribute_calls += static_cast<long long>(spent);
    exact_k += spent == candidates.size();
    ++attempted;
    right += d.value == static_cast<uint32_t>(train.at(i, col));
    low_confidence += d.low_confidence;
  }
  double accuracy = attempted == 0 ? std::numeric_limits<double>::quiet_NaN()
                                   : static_cast<double>(right) /
                                         static_cast<double>(attempted);
  report.Measure(cell, "attribute_targets", static_cast<double>(attempted));
  report.Measure(cell, "attribute_skipped_ambiguous", static_cast<double>(skipped));
  report.Measure(cell, "attribute_accuracy", accuracy);
  report.Measure(cell, "attribute_low_confidence",
                 static_cast<double>(low_confidence));
  report.Measure(cell, "attribute_calls_per_target",
                 attempted == 0 ? 0.0
                                : static_cast<double>(attribute_calls) /
                                      static_cast<double>(attempted));
  // Share of targets that cost exactly one call per candidate code.
  report.Measure(cell, "attribute_calls_equal_k",
                 attempted == 0 ? 0.0
                                : static_cast<double>(exact_k) /
                                      static_cast<double>(attempted));
  report.Check(cell + ": attribute accuracy is 1", accuracy == 1.0,
               std::to_string(right) + " of " + std::to_string(attempted));
  report.Check(cell + ": ledger matches the provider",
               audit.observed() == session.used());
}

}  // namespace

RunReport RunAttack(const ExperimentSpec& spec) {
  auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.name = "attack_" + spec.attack_kind;
  report.seed = spec.seed;
  report.config_hash = spec.config_hash;

  Dataset data = LoadDataset(spec);
  const double eps = spec.epsilons.front();
  Provider provider(data, MakeProviderConfig(spec, BudgetFor(eps, spec.delta)));
  const std::string cell =
      std::string(ModelKindName(spec.model.kind)) + "/eps=" + EpsilonLabel(eps);

  if (spec.attack_kind == "difference") {
    RunDifference(report, spec, provider, cell);
    report.Time("total", Seconds(start));
    return report;
  }

  const Dataset& train = harness::HiddenTrain(provider);
  OutlierSet outliers = LabelSpecOutliers(spec, train);
  AttackConfig a = AdversaryConfig(spec, train.num_rows(), outliers.indices.size());
  AuditingClient audit(provider);
  AttackResult result = spec.attack_kind == "one_call"
                            ? SampleAttackOneCall(audit, a)
                            : ReconSyn(audit, a);
  report.Measure(cell, "n_out_adversary", static_cast<double>(a.locator.n_out));
  MeasureAttack(report, cell, result, train, outliers, audit.observed());
  report.attacks[cell] = AttackResultToJson(result);
  report.Time("total", Seconds(start));
  return report;
}

RunReport DpSweep(const ExperimentSpec& spec) {
  auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.name = "sweep_dp";
  report.seed = spec.seed;
  report.config_hash = spec.config_hash;

  Dataset data = LoadDataset(spec);
  // Epsilons from most to least private, for the monotonicity check.
  std::vector<double> grid = spec.epsilons;
  std::sort(grid.begin(), grid.end());

  for (ModelKind kind : spec.sweep_models) {
    ExperimentSpec cell_spec = spec;
    cell_spec.model.kind = kind;
    std::vector<double> utility_error;
    for (double eps : grid) {
      auto cell_start = std::chrono::steady_clock::now();
      const std::string cell =
          std::string(ModelKindName(kind)) + "/eps=" + EpsilonLabel(eps);
      Provider provider(data, MakeProviderConfig(cell_spec,
                                                 BudgetFor(eps, spec.delta)));
      const Dataset& train = harness::HiddenTrain(provider);
      OutlierSet outliers = LabelSpecOutliers(spec, train);
      AttackConfig a =
          AdversaryConfig(spec, train.num_rows(), outliers.indices.size());
      AuditingClient audit(provider);
      AttackResult result = ReconSyn(audit, a);
      MeasureAttack(report, cell, result, train, outliers, audit.observed());
      report.attacks[cell] = AttackResultToJson(result);
      if (!outliers.indices.empty()) {
        double recall = *report.Find(cell, "recall_outliers");
        report.Check(cell + ": outlier recall >= 0.95", recall >= 0.95,
                     "recall " + FormatDouble(recall));
      }

      // Utility over independent fits of the same train split.
      double marginal = 0.0, mi = 0.0;
      for (std::size_t s = 0; s < spec.utility_seeds; ++s) {
        auto model = FitModel(cell_spec.model, train, BudgetFor(eps, spec.delta),
                              DeriveSeed(spec.seed, "utility_fit", s));
        Dataset synth = model->Sample(train.num_rows() * spec.utility_scale,
                                      DeriveSeed(spec.seed, "utility_sample", s));
        UtilityScore u = Utility(train, synth);
        marginal += u.marginal_diff;
        mi += u.mi_diff;
      }
      const double k = static_cast<double>(std::max<std::size_t>(1, spec.utility_seeds));
      report.Measure(cell, "utility_marginal_diff", marginal / k);
      report.Measure(cell, "utility_mi_diff", mi / k);
      report.Measure(cell, "utility_error", (marginal + mi) / k);
      utility_error.push_back((marginal + mi) / k);
      report.Time(cell, Seconds(cell_start));
    }
    // grid is ascending in epsilon, so the error should be descending.
    bool monotone = true;
    std::string detail;
    for (std::size_t i = 0; i < utility_error.size(); ++i) {
      if (i > 0 && !(utility_error[i] < utility_error[i - 1])) monotone = false;
      detail += (i ? " > " : "") + FormatDouble(utility_error[i]);
    }
    report.Check(std::string(ModelKindName(kind)) +
                     ": utility degrades as epsilon decreases",
                 monotone, "errors by ascending epsilon: " + detail);
  }
  report.Time("total", Seconds(start));
  return report;
}

}  // namespace synthaudit
