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

// The counter-example reproductions.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "synthaudit/errors.h"
#include "synthaudit/metrics.h"
#include "synthaudit/random.h"
#include "synthaudit/workbench.h"

namespace synthaudit {
namespace {

constexpr std::size_t kGaussRows = 2000;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

RunReport NewReport(std::string name, uint64_t seed) {
  RunReport r;
  r.name = std::move(name);
  r.seed = seed;
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(
                    Fnv1a(r.name + "|" + std::to_string(seed))));
  r.config_hash = hash;
  return r;
}

// Continuous 2d (or `dim`-d) Gauss split into equal halves.
std::pair<Dataset, Dataset> GaussSplit(uint64_t seed, std::string_view tag,
                                       std::size_t dim = 2,
                                       double resolution = 0.0) {
  Dataset data = GenGauss(dim, kGaussRows, DeriveSeed(seed, tag), resolution);
  return Split(data, DeriveSeed(seed, tag, 1));
}

std::shared_ptr<const GeneratorModel> Oracle(const Dataset& train,
                                             std::size_t dim,
                                             double resolution) {
  ModelSpec spec;
  spec.kind = ModelKind::kOracle;
  spec.oracle_dim = dim;
  spec.oracle_resolution = resolution;
  return FitModel(spec, train, std::nullopt, 0);
}

void MeasureReport(RunReport& out, const std::string& cell,
                   const PrivacyReport& r) {
  out.Measure(cell, "ims_share_synth", r.ims.share_synth);
  out.Measure(cell, "ims_share_test", r.ims.share_test);
  out.Measure(cell, "dcr_pct5_synth", r.dcr.pct5_synth);
  out.Measure(cell, "dcr_pct5_test", r.dcr.pct5_test);
  out.Measure(cell, "nndr_pct5_synth", r.nndr.pct5_synth);
  out.Measure(cell, "nndr_pct5_test", r.nndr.pct5_test);
  out.Measure(cell, "ims_pass", r.ims.pass);
  out.Measure(cell, "dcr_pass", r.dcr.pass);
  out.Measure(cell, "nndr_pass", r.nndr.pass);
  out.Measure(cell, "all_pass", r.all_pass);
}

std::string Flags(const PrivacyReport& r) {
  std::string s;
  s += r.ims.pass ? 'P' : 'F';
  s += r.dcr.pass ? 'P' : 'F';
  s += r.nndr.pass ? 'P' : 'F';
  return s;
}

// P(round(z / h) == i) for z standard normal.
double CellProbability(long long i, double h) {
  const double lo = (static_cast<double>(i) - 0.5) * h;
  const double hi = (static_cast<double>(i) + 0.5) * h;
  return 0.5 * (std::erfc(lo / std::sqrt(2.0)) - std::erfc(hi / std::sqrt(2.0)));
}

// Packs per-axis grid indices (each within +-2^11) into one key.
uint64_t CellKey(std::span<const long long> cell) {
  uint64_t key = 0;
  for (long long i : cell) key = (key << 12) | static_cast<uint64_t>(i + 2048);
  return key;
}

}  // namespace

// ---------------------------------------------------------------------------

RunReport Ce1(uint64_t seed) {
  auto start = std::chrono::steady_clock::now();
  RunReport out = NewReport("ce1", seed);
  auto [train, test] = GaussSplit(seed, "ce1");
  PrivacyReport r =
      EvaluatePrivacy(train, test, /*synth=*/test, Metric::kEuclidean);
  MeasureReport(out, "synth=test", r);
  out.Check("all three tests pass", r.all_pass, Flags(r));
  out.Check("identical match shares are equal",
            r.ims.share_synth == r.ims.share_test,
            Num(r.ims.share_synth) + " vs " + Num(r.ims.share_test));
  out.Time("total", Seconds(start));
  return out;
}

RunReport Ce2(uint64_t seed) {
  auto start = std::chrono::steady_clock::now();
  RunReport out = NewReport("ce2", seed);
  auto [train, test] = GaussSplit(seed, "ce2");
  OutlierSet outliers = LabelOutliers(train, RadiusRule{});

  Rng rng = MakeRng(seed, "ce2_perturb");
  std::uniform_real_distribution<double> nudge(-1e-6, 1e-6);
  DatasetBuilder leaked(train.schema());
  double max_shift = 0.0;
  for (std::size_t i : outliers.indices) {
    Record r = train.record(i);
    for (double& v : r) {
      double d = nudge(rng);
      // A zero draw would leave an exact copy.
      while (d == 0.0) d = nudge(rng);
      v += d;
    }
    leaked.AddRow(r);
  }
  Dataset outlier_rows = std::move(leaked).Build();
  // Canonical rounding may move values slightly; measure after it.
  for (std::size_t j = 0; j < outlier_rows.num_rows(); ++j) {
    for (std::size_t c = 0; c < train.num_cols(); ++c) {
      max_shift = std::max(
          max_shift, std::abs(outlier_rows.at(j, c) -
                              train.at(outliers.indices[j], c)));
    }
  }
  DatasetBuilder zeros(train.schema());
  const Record origin(train.num_cols(), 0.0);
  for (std::size_t i = 0; i < 5 * train.num_rows(); ++i) zeros.AddRow(origin);
  Dataset synth = outlier_rows.Concat(std::move(zeros).Build());

  PrivacyReport r = EvaluatePrivacy(train, test, synth, Metric::kEuclidean);
  const std::size_t matches = ImsMatches(train, synth);
  MeasureReport(out, "outliers+zeros", r);
  out.Measure("outliers+zeros", "outliers", static_cast<double>(outliers.indices.size()));
  out.Measure("outliers+zeros", "exact_matches", static_cast<double>(matches));
  out.Measure("outliers+zeros", "max_shift", max_shift);
  out.Check("all three tests pass", r.all_pass, Flags(r));
  out.Check("no exact matches", matches == 0, std::to_string(matches));
  out.Check("every leaked outlier within 2e-6 of its source",
            max_shift <= 2e-6, Num(max_shift));

  // The same outliers without the zero padding.
  PrivacyReport bare =
      EvaluatePrivacy(train, test, outlier_rows, Metric::kEuclidean);
  MeasureReport(out, "outliers_only", bare);
  out.Check("without the padding DCR fails", !bare.dcr.pass, Flags(bare));
  out.Time("total", Seconds(start));
  return out;
}

// ---------------------------------------------------------------------------
// CE3: Swiss cheese.

RunReport Ce3(uint64_t seed, const Ce3Options& options) {
  RunReport out = NewReport("ce3", seed);
  const double kOutlierRadius = RadiusRule{}.radius;
  for (std::size_t dim : options.dims) {
    if (dim < 2 || dim > 5) throw InvalidArgument("ce3 supports 2 to 5 dimensions");
    auto start = std::chrono::steady_clock::now();
    auto res_it = options.resolution.find(dim);
    if (res_it == options.resolution.end()) {
      throw InvalidArgument("no ce3 resolution for " + std::to_string(dim) +
                            " dimensions");
    }
    const double h = res_it->second;
    const std::string cell = std::to_string(dim) + "d";
    auto [train, test] = GaussSplit(seed, "ce3", dim, h);
    OutlierSet outliers = LabelOutliers(train, RadiusRule{});
    auto oracle = Oracle(train, dim, h);
    const std::size_t n = train.num_rows();
    const double total =
        static_cast<double>(options.n_datasets) * static_cast<double>(n);

    // Candidate bins: outside the outlier radius, with enough expected
    // samples that an empty bin is telling. Enumerated axis by axis; the
    // log-probability only falls as axes are added, which prunes the walk.
    const long long reach = static_cast<long long>(std::ceil(7.0 / h));
    std::vector<double> axis_logp(2 * reach + 1);
    for (long long i = -reach; i <= reach; ++i) {
      axis_logp[i + reach] = std::log(std::max(CellProbability(i, h), 1e-300));
    }
    const double min_logp = std::log(options.min_expected / total);
    std::unordered_map<uint64_t, uint32_t> counts;
    std::unordered_map<uint64_t, double> expected;
    std::vector<long long> cell_idx(dim);
    auto walk = [&](auto&& self, std::size_t axis, double logp,
                    double norm2) -> void {
      if (axis == dim) {
        if (norm2 > kOutlierRadius * kOutlierRadius) {
          uint64_t key = CellKey(cell_idx);
          counts.emplace(key, 0);
          expected.emplace(key, std::exp(logp) * total);
        }
        return;
      }
      for (long long i = -reach; i <= reach; ++i) {
        double lp = logp + axis_logp[i + reach];
        if (lp < min_logp) continue;
        cell_idx[axis] = i;
        double x = static_cast<double>(i) * h;
        self(self, axis + 1, lp, norm2 + x * x);
      }
    };
    walk(walk, 0, 0.0, 0.0);

    // Sampling. Filtering at tau = 0 on grid data is an exact-match test,
    // so the train key set is built once instead of per dataset.
    RecordSet train_keys(train);
    std::size_t datasets = 0;
    std::size_t survivors = 0;
    std::vector<long long> idx(dim);
    for (; datasets < options.n_datasets; ++datasets) {
      if (datasets % 1000 == 0 && Seconds(start) > options.seconds_per_dim) break;
      Dataset synth = oracle->Sample(n, DeriveSeed(seed, "ce3_sample",
                                                   dim * 1000000007ULL + datasets));
      for (std::size_t r = 0; r < synth.num_rows(); ++r) {
        auto row = synth.row(r);
        if (train_keys.Contains(row)) continue;  // removed by the filter
        ++survivors;
        for (std::size_t c = 0; c < dim; ++c) idx[c] = std::llround(row[c] / h);
        bool in_range = std::all_of(idx.begin(), idx.end(), [&](long long i) {
          return i >= -reach && i <= reach;
        });
        if (!in_range) continue;
        auto it = counts.find(CellKey(idx));
        if (it != counts.end()) ++it->second;
      }
    }
    // Expectations assumed the full run; rescale if the cap cut it short.
    const double scale =
        static_cast<double>(datasets) / static_cast<double>(options.n_datasets);

    std::size_t holes = 0;
    std::unordered_map<uint64_t, bool> is_hole;
    for (const auto& [key, count] : counts) {
      bool hole = count == 0 && expected[key] * scale >= options.min_expected;
      is_hole[key] = hole;
      holes += hole;
    }
    std::unordered_map<uint64_t, bool> train_cells;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < dim; ++c) idx[c] = std::llround(train.at(i, c) / h);
      train_cells[CellKey(idx)] = true;
    }
    std::size_t found = 0;
    for (std::size_t i : outliers.indices) {
      for (std::size_t c = 0; c < dim; ++c) idx[c] = std::llround(train.at(i, c) / h);
      auto it = is_hole.find(CellKey(idx));
      found += it != is_hole.end() && it->second;
    }
    std::size_t false_holes = 0;
    for (const auto& [key, hole] : is_hole) {
      if (hole && !train_cells.count(key)) ++false_holes;
    }
    const double success =
        outliers.indices.empty()
            ? 1.0
            : static_cast<double>(found) /
                  static_cast<double>(outliers.indices.size());
    out.Measure(cell, "resolution", h);
    out.Measure(cell, "datasets", static_cast<double>(datasets));
    out.Measure(cell, "surviving_samples", static_cast<double>(survivors));
    out.Measure(cell, "candidate_bins", static_cast<double>(counts.size()));
    out.Measure(cell, "empty_bins", static_cast<double>(holes));
    out.Measure(cell, "false_holes", static_cast<double>(false_holes));
    out.Measure(cell, "outliers", static_cast<double>(outliers.indices.size()));
    out.Measure(cell, "outliers_found", static_cast<double>(found));
    out.Measure(cell, "success", success);
    out.Time(cell, Seconds(start));
    if (dim == 2) {
      out.Check("2d: every outlier sits in a hole", success >= 0.98,
                "success " + Num(success));
    } else if (dim == 3) {
      out.Check("3d: at least 80% of outliers sit in holes", success >= 0.80,
                "success " + Num(success));
    }
  }
  return out;
}

RunReport Ce3Targeted(uint64_t seed, const Ce3TargetedOptions& options) {
  auto start = std::chrono::steady_clock::now();
  RunReport out = NewReport("ce3_targeted", seed);
  const std::size_t dim = options.dim;
  if (dim < 1) throw InvalidArgument("dimension must be positive");
  if (options.bins < 3) throw InvalidArgument("need at least 3 bins");

  // Train data with a clear neighborhood around the origin.
  Dataset raw = GenGauss(dim, kGaussRows / 2, DeriveSeed(seed, "ce3t"));
  DatasetBuilder b(raw.schema());
  for (std::size_t i = 0; i < raw.num_rows(); ++i) {
    double norm2 = 0.0;
    for (double v : raw.row(i)) norm2 += v * v;
    if (norm2 >= options.clear_radius * options.clear_radius) b.AddRow(raw.row(i));
  }
  Dataset without = std::move(b).Build();
  DatasetBuilder with_b(without.schema());
  for (std::size_t i = 0; i < without.num_rows(); ++i) with_b.AddRow(without.row(i));
  const Record origin(dim, 0.0);
  with_b.AddRow(origin);
  Dataset with = std::move(with_b).Build();

  const double width = 2.0 * options.span / static_cast<double>(options.bins - 1);
  auto bin_center = [&](std::size_t b) {
    return -options.span + width * static_cast<double>(b);
  };

  struct Outcome {
    bool detected = false;
    std::size_t probes = 0;
    double max_error = 0.0;
  };

  // Conditional generation: column j varies over the bins while the others
  // are held at the target's (zero) values. A column shows a hole when the
  // filtered bins form one run around the middle.
  auto conditional = [&](const Dataset& train) {
    NnIndex index(train, Metric::kEuclidean);
    Outcome o;
    o.detected = true;
    for (std::size_t c = 0; c < dim; ++c) {
      std::vector<bool> removed(options.bins);
      Record probe(dim, 0.0);
      for (std::size_t bin = 0; bin < options.bins; ++bin) {
        probe[c] = bin_center(bin);
        removed[bin] = index.Query(probe).d1 <= options.tau;
        ++o.probes;
      }
      auto first = std::find(removed.begin(), removed.end(), true);
      auto last = std::find(removed.rbegin(), removed.rend(), true);
      if (first == removed.end()) {
        o.detected = false;
        continue;
      }
      std::size_t lo = first - removed.begin();
      std::size_t hi = options.bins - 1 - (last - removed.rbegin());
      bool contiguous = std::all_of(removed.begin() + lo, removed.begin() + hi + 1,
                                    [](bool v) { return v; });
      const std::size_t mid = options.bins / 2;
      if (!contiguous || lo > mid || hi < mid) o.detected = false;
      double estimate = 0.5 * (bin_center(lo) + bin_center(hi));
      o.max_error = std::max(o.max_error, std::abs(estimate));
    }
    return o;
  };

  // Without conditioning: oracle samples over the whole space, binned on
  // the grid around the target; a hole is an empty middle bin where many
  // samples were expected.
  auto unconditioned = [&](const Dataset& train) {
    NnIndex index(train, Metric::kEuclidean);
    Outcome o;
    std::size_t cells = 1;
    for (std::size_t c = 0; c < dim; ++c) cells *= options.bins;
    std::vector<uint32_t> counts(cells, 0);
    Dataset samples = GenGauss(dim, options.unconditioned_samples,
                               DeriveSeed(seed, "ce3t_oracle"));
    for (std::size_t r = 0; r < samples.num_rows(); ++r) {
      auto row = samples.row(r);
      ++o.probes;
      std::size_t flat = 0;
      bool inside = true;
      for (std::size_t c = 0; c < dim && inside; ++c) {
        long long bin = std::llround((row[c] + options.span) / width);
        if (bin < 0 || bin >= static_cast<long long>(options.bins)) inside = false;
        flat = flat * options.bins + static_cast<std::size_t>(std::max(0LL, bin));
      }
      if (!inside) continue;
      if (index.Query(row).d1 <= options.tau) continue;
      ++counts[flat];
    }
    std::size_t mid_flat = 0;
    for (std::size_t c = 0; c < dim; ++c) mid_flat = mid_flat * options.bins + options.bins / 2;
    double p_mid = 1.0;
    for (std::size_t c = 0; c < dim; ++c) {
      p_mid *= 0.5 * (std::erfc(-0.5 * width / std::sqrt(2.0)) -
                      std::erfc(0.5 * width / std::sqrt(2.0)));
    }
    double expected_mid = p_mid * static_cast<double>(options.unconditioned_samples);
    o.detected = counts[mid_flat] == 0 && expected_mid >= 3.0;
    return o;
  };

  Outcome hit = options.unconditioned ? unconditioned(with) : conditional(with);
  Outcome control =
      options.unconditioned ? unconditioned(without) : conditional(without);
  const std::string cell =
      std::to_string(dim) + "d/" + (options.unconditioned ? "oracle" : "conditional");
  out.Measure(cell, "train_rows", static_cast<double>(with.num_rows()));
  out.Measure(cell, "probes", static_cast<double>(hit.probes));
  out.Measure(cell, "detected", hit.detected);
  out.Measure(cell, "control_detected", control.detected);
  out.Measure(cell, "max_coordinate_error", hit.max_error);
  out.Check("target's hole detected", hit.detected);
  out.Check("no hole without the target", !control.detected);
  if (!options.unconditioned) {
    out.Check("probes = dim x bins", hit.probes == dim * options.bins,
              std::to_string(hit.probes));
    out.Check("target located within one bin", hit.max_error <= width,
              Num(hit.max_error));
  }
  out.Time("total", Seconds(start));
  return out;
}

// ---------------------------------------------------------------------------

RunReport Ce4(uint64_t seed, std::size_t n_reps) {
  auto start = std::chrono::steady_clock::now();
  RunReport out = NewReport("ce4", seed);
  if (n_reps == 0) throw InvalidArgument("ce4 needs at least one repetition");
  Dataset data = GenGauss(2, kGaussRows, DeriveSeed(seed, "ce4"));
  auto [train, test] = Split(data, DeriveSeed(seed, "ce4", 1));
  auto oracle = Oracle(train, 2, 0.0);
  const double reps = static_cast<double>(n_reps);

  MetricsEvaluator evaluator(train, test, Metric::kEuclidean);
  std::size_t ims = 0, dcr = 0, nndr = 0, all = 0;
  for (std::size_t r = 0; r < n_reps; ++r) {
    PrivacyReport rep = evaluator.Evaluate(
        oracle->Sample(train.num_rows(), DeriveSeed(seed, "ce4_sample", r)));
    ims += rep.ims.pass;
    dcr += rep.dcr.pass;
    nndr += rep.nndr.pass;
    all += rep.all_pass;
  }
  const double ims_rate = ims / reps, dcr_rate = dcr / reps,
               nndr_rate = nndr / reps, all_rate = all / reps;
  out.Measure("oracle_samples", "reps", reps);
  out.Measure("oracle_samples", "ims_pass_rate", ims_rate);
  out.Measure("oracle_samples", "dcr_pass_rate", dcr_rate);
  out.Measure("oracle_samples", "nndr_pass_rate", nndr_rate);
  out.Measure("oracle_samples", "all_pass_rate", all_rate);
  out.Check("IMS pass rate is 1 +- 0.01", std::abs(ims_rate - 1.0) <= 0.01,
            Num(ims_rate));
  out.Check("DCR pass rate within [0.25, 0.65]",
            dcr_rate >= 0.25 && dcr_rate <= 0.65, Num(dcr_rate));
  out.Check("NNDR pass rate within [0.25, 0.65]",
            nndr_rate >= 0.25 && nndr_rate <= 0.65, Num(nndr_rate));
  out.Check("all-pass rate within [0.15, 0.45]",
            all_rate >= 0.15 && all_rate <= 0.45, Num(all_rate));

  // A single synthetic sample against many random splits.
  Dataset fixed = oracle->Sample(train.num_rows(), DeriveSeed(seed, "ce4_fixed"));
  std::size_t split_all = 0, split_dcr = 0, split_nndr = 0;
  for (std::size_t r = 0; r < n_reps; ++r) {
    auto [tr, te] = Split(data, DeriveSeed(seed, "ce4_split", r));
    PrivacyReport rep = EvaluatePrivacy(tr, te, fixed, Metric::kEuclidean);
    split_all += rep.all_pass;
    split_dcr += rep.dcr.pass;
    split_nndr += rep.nndr.pass;
  }
  const double split_rate = split_all / reps;
  out.Measure("random_splits", "reps", reps);
  out.Measure("random_splits", "dcr_pass_rate", split_dcr / reps);
  out.Measure("random_splits", "nndr_pass_rate", split_nndr / reps);
  out.Measure("random_splits", "all_pass_rate", split_rate);
  out.Check("random splits disagree on a fixed sample",
            split_all > 0 && split_all < n_reps, Num(split_rate));
  out.Time("total", Seconds(start));
  return out;
}

RunReport Ce5(uint64_t seed, std::size_t n_reps, double percentile,
              std::size_t density_k) {
  auto start = std::chrono::steady_clock::now();
  RunReport out = NewReport("ce5", seed);
  auto [train, test] = GaussSplit(seed, "ce5");
  auto oracle = Oracle(train, 2, 0.0);
  MetricsEvaluator evaluator(train, test, Metric::kEuclidean);
  NnIndex train_index(train, Metric::kEuclidean);
  const double threshold = OutlierThreshold(train, percentile, Metric::kEuclidean);

  struct Tally {
    std::map<std::string, std::size_t> transitions;
    std::size_t pass_to_fail = 0, fail_to_pass = 0, dcr_lifted = 0;
    void Add(const PrivacyReport& before, const PrivacyReport& after) {
      ++transitions[Flags(before) + "->" + Flags(after)];
      pass_to_fail += (before.dcr.pass && !after.dcr.pass) ||
                      (before.nndr.pass && !after.nndr.pass);
      fail_to_pass += (!before.dcr.pass && after.dcr.pass) ||
                      (!before.nndr.pass && after.nndr.pass);
      dcr_lifted += after.dcr.pct5_synth > before.dcr.pct5_synth;
    }
  };
  Tally nearest, density;
  std::size_t unchanged_control = 0;
  for (std::size_t r = 0; r < n_reps; ++r) {
    Dataset synth =
        oracle->Sample(train.num_rows(), DeriveSeed(seed, "ce5_sample", r));
    PrivacyReport before = evaluator.Evaluate(synth);
    // Control: no filter, same sample.
    unchanged_control += Flags(evaluator.Evaluate(synth)) == Flags(before);
    nearest.Add(before, evaluator.Evaluate(OutlierFilterWithThreshold(
                            train_index, synth, threshold)));
    if (density_k > 0) {
      density.Add(before, evaluator.Evaluate(DensityOutlierFilter(
                              train, synth, percentile, density_k,
                              Metric::kEuclidean)));
    }
  }
  auto record = [&](const std::string& cell, const Tally& t) {
    for (const auto& [name, count] : t.transitions) {
      out.Measure(cell, "transition " + name, static_cast<double>(count));
    }
    out.Measure(cell, "pass_to_fail", static_cast<double>(t.pass_to_fail));
    out.Measure(cell, "fail_to_pass", static_cast<double>(t.fail_to_pass));
  };
  out.Measure("nearest", "percentile", percentile);
  out.Measure("nearest", "threshold", threshold);
  record("nearest", nearest);
  // Dropping the rows with the largest nearest distance can only pull the
  // DCR percentile down, so this filter flips DCR one way only.
  out.Check("nearest-distance filter never raises the DCR percentile",
            nearest.dcr_lifted == 0, std::to_string(nearest.dcr_lifted));
  if (density_k > 0) {
    const std::string cell = "density_k" + std::to_string(density_k);
    out.Measure(cell, "k", static_cast<double>(density_k));
    record(cell, density);
    out.Check("a passing test fails after filtering", density.pass_to_fail > 0,
              std::to_string(density.pass_to_fail) + " samples");
    out.Check("a failing test passes after filtering",
              density.fail_to_pass > 0,
              std::to_string(density.fail_to_pass) + " samples");
  }
  out.Check("flags unchanged without the filter", unchanged_control == n_reps);
  out.Time("total", Seconds(start));
  return out;
}

RunReport Ce6(uint64_t seed, const Ce6Options& options) {
  auto start = std::chrono::steady_clock::now();
  RunReport out = NewReport("ce6", seed);
  auto [train, test] = GaussSplit(seed, "ce6", options.dim);
  auto oracle = Oracle(train, options.dim, 0.0);
  const std::size_t n = train.num_rows();

  // Continuous baseline.
  {
    MetricsEvaluator evaluator(train, test, Metric::kEuclidean);
    std::size_t dcr = 0, nndr = 0;
    for (std::size_t r = 0; r < options.baseline_reps; ++r) {
      PrivacyReport rep =
          evaluator.Evaluate(oracle->Sample(n, DeriveSeed(seed, "ce6_baseline", r)));
      dcr += rep.dcr.pass;
      nndr += rep.nndr.pass;
    }
    const double reps = static_cast<double>(options.baseline_reps);
    out.Measure("continuous", "dcr_score", dcr / reps);
    out.Measure("continuous", "nndr_score", nndr / reps);
  }
  const double base_dcr = *out.Find("continuous", "dcr_score");
  const double base_nndr = *out.Find("continuous", "nndr_score");

  // The discretized cells reuse one set of oracle samples.
  std::vector<Dataset> samples;
  for (std::size_t r = 0; r < options.reps; ++r) {
    samples.push_back(oracle->Sample(n, DeriveSeed(seed, "ce6_sample", r)));
  }
  bool above = true;
  std::string shortfall;
  for (BinStrategy strategy : {BinStrategy::kUniform, BinStrategy::kQuantile}) {
    const std::string name =
        strategy == BinStrategy::kUniform ? "uniform" : "quantile";
    for (std::size_t bins : options.bins) {
      Discretizer disc = Discretizer::Fit(train, strategy, bins);
      MetricsEvaluator evaluator(disc.Apply(train), disc.Apply(test),
                                 Metric::kHamming);
      std::size_t ims = 0, dcr = 0, nndr = 0;
      for (const Dataset& s : samples) {
        PrivacyReport rep = evaluator.Evaluate(disc.Apply(s));
        ims += rep.ims.pass;
        dcr += rep.dcr.pass;
        nndr += rep.nndr.pass;
      }
      const double reps = static_cast<double>(options.reps);
      const std::string cell = name + "/" + std::to_string(bins);
      out.Measure(cell, "ims_score", ims / reps);
      out.Measure(cell, "dcr_score", dcr / reps);
      out.Measure(cell, "nndr_score", nndr / reps);
      if (bins >= 100 && (dcr / reps < base_dcr || nndr / reps < base_nndr)) {
        above = false;
        shortfall += " " + cell;
      }
    }
  }
  out.Check("discretized scores at or above the continuous baseline "
            "from 100 bins on",
            above, shortfall.empty() ? "" : "below at" + shortfall);
  out.Time("total", Seconds(start));
  return out;
}

}  // namespace synthaudit
