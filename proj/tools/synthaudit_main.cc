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

// Command-line front end. Exit codes: 0 success, 1 an experiment assertion
// failed, 2 usage or input error, 3 any other runtime failure.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "synthaudit/attacks.h"
#include "synthaudit/errors.h"
#include "synthaudit/metrics.h"
#include "synthaudit/provider.h"
#include "synthaudit/random.h"
#include "synthaudit/tabular.h"
#include "synthaudit/workbench.h"

namespace sa = synthaudit;

namespace {

constexpr int kOk = 0;
constexpr int kAssertionFailed = 1;
constexpr int kUsage = 2;
constexpr int kRuntime = 3;

// Options every subcommand shares.
struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<uint64_t> seed;
  std::string out;
};

void AddCommon(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "flat key=value config file");
  app->add_option("--set", c.overrides, "config override, key=value")
      ->take_all();
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--out", c.out, "output path or directory");
}

sa::Config ResolveConfig(const Common& c) {
  sa::Config config =
      c.config_path.empty() ? sa::Config() : sa::Config::Load(c.config_path);
  for (const std::string& kv : c.overrides) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw sa::InvalidArgument("--set expects key=value, got '" + kv + "'");
    }
    config.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) config.Set("seed", std::to_string(*c.seed));
  if (!c.out.empty()) config.Set("out", c.out);
  return config;
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw sa::InvalidArgument("cannot write '" + path + "'");
  out << text;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sa::InvalidArgument("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Prints and stores a report; the exit code reflects its assertions.
int Finish(const sa::RunReport& report, const std::string& dir) {
  sa::WriteRunReport(report, dir);
  std::cout << sa::RenderReport(report);
  return report.passed() ? kOk : kAssertionFailed;
}

std::atomic<bool> g_stop{false};
extern "C" void OnSignal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthaudit: similarity-based privacy metrics and attacks"};
  app.require_subcommand(1);

  // data ---------------------------------------------------------------------
  CLI::App* data = app.add_subcommand("data", "generate and transform datasets");
  data->require_subcommand(1);

  Common gen_c;
  std::string gen_kind = "censuslite";
  std::size_t gen_n = 6000, gen_dim = 2;
  double gen_resolution = 0.0;
  CLI::App* gen = data->add_subcommand("gen", "generate a dataset as CSV");
  AddCommon(gen, gen_c);
  gen->add_option("--kind", gen_kind, "gauss | censuslite")
      ->check(CLI::IsMember({"gauss", "censuslite"}));
  gen->add_option("--n", gen_n, "rows");
  gen->add_option("--dim", gen_dim, "gauss dimensionality");
  gen->add_option("--resolution", gen_resolution, "gauss grid spacing");

  Common split_c;
  std::string split_in;
  CLI::App* split = data->add_subcommand("split", "split a CSV into train/test");
  AddCommon(split, split_c);
  split->add_option("--in", split_in, "input CSV")->required();

  Common disc_c;
  std::string disc_in, disc_fit, disc_strategy = "uniform";
  std::size_t disc_bins = 10;
  CLI::App* disc = data->add_subcommand("discretize", "bin continuous columns");
  AddCommon(disc, disc_c);
  disc->add_option("--in", disc_in, "input CSV")->required();
  disc->add_option("--fit", disc_fit, "CSV to fit edges on (default: --in)");
  disc->add_option("--strategy", disc_strategy, "uniform | quantile")
      ->check(CLI::IsMember({"uniform", "quantile"}));
  disc->add_option("--bins", disc_bins, "bins per column");

  // provider -------------------------------------------------------------------
  CLI::App* provider = app.add_subcommand("provider", "the black-box provider");
  provider->require_subcommand(1);
  Common serve_c;
  std::string bind = "127.0.0.1:0";
  CLI::App* serve = provider->add_subcommand("serve", "serve the HTTP API");
  AddCommon(serve, serve_c);
  serve->add_option("--bind", bind, "host:port (port 0 picks a free one)");

  // metrics ------------------------------------------------------------------
  CLI::App* metrics = app.add_subcommand("metrics", "privacy metrics");
  metrics->require_subcommand(1);
  Common report_c;
  std::string m_train, m_test, m_synth, m_metric;
  CLI::App* mreport = metrics->add_subcommand("report", "IMS, DCR and NNDR");
  AddCommon(mreport, report_c);
  mreport->add_option("--train", m_train)->required();
  mreport->add_option("--test", m_test)->required();
  mreport->add_option("--synth", m_synth)->required();
  mreport->add_option("--metric", m_metric, "hamming | euclidean");

  // attack -------------------------------------------------------------------
  CLI::App* attack = app.add_subcommand("attack", "run an attack");
  attack->require_subcommand(1);
  Common diff_c, recon_c;
  std::string recon_target, recon_remote, diff_remote;
  CLI::App* diff = attack->add_subcommand("difference",
                                          "membership and attribute inference");
  AddCommon(diff, diff_c);
  CLI::App* recon = attack->add_subcommand("reconsyn", "outlier reconstruction");
  AddCommon(recon, recon_c);
  recon->add_option("--target", recon_target, "outliers | any_record");
  recon->add_option("--provider", recon_remote,
                    "host:port of a remote provider (default: in-process)");

  // reproduce ----------------------------------------------------------------
  CLI::App* reproduce = app.add_subcommand("reproduce", "counter-examples");
  reproduce->require_subcommand(1);
  struct Ce {
    const char* name;
    const char* help;
    Common c;
    CLI::App* app = nullptr;
  };
  std::vector<Ce> ces = {
      {"ce1", "synthetic data equal to the test data", {}},
      {"ce2", "leaked outliers hidden by zero padding", {}},
      {"ce3", "Swiss cheese reconstruction", {}},
      {"ce3-targeted", "one target found column by column", {}},
      {"ce4", "pass-rate inconsistency", {}},
      {"ce5", "outlier filter flag flips", {}},
      {"ce6", "discretization", {}},
  };
  for (Ce& ce : ces) {
    ce.app = reproduce->add_subcommand(ce.name, ce.help);
    AddCommon(ce.app, ce.c);
  }

  // sweep / report -----------------------------------------------------------
  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweeps");
  sweep->require_subcommand(1);
  Common dp_c;
  CLI::App* dp = sweep->add_subcommand("dp", "ReconSyn and utility over epsilon");
  AddCommon(dp, dp_c);

  CLI::App* report = app.add_subcommand("report", "reports");
  report->require_subcommand(1);
  Common render_c;
  std::string render_in;
  CLI::App* render = report->add_subcommand("render", "print a report JSON");
  AddCommon(render, render_c);
  render->add_option("--in", render_in, "report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      sa::Config config = ResolveConfig(gen_c);
      uint64_t seed = config.GetUint("seed");
      sa::Dataset ds = gen_kind == "gauss"
                           ? sa::GenGauss(gen_dim, gen_n, seed, gen_resolution)
                           : sa::GenCensusLite(gen_n, seed);
      WriteText(gen_c.out, sa::FormatCsv(ds));
      return kOk;
    }
    if (*split) {
      sa::Config config = ResolveConfig(split_c);
      auto [train, test] =
          sa::Split(sa::ReadCsv(split_in), config.GetUint("seed"));
      std::string dir = split_c.out.empty() ? "." : split_c.out;
      std::filesystem::create_directories(dir);
      sa::WriteCsv(train, dir + "/train.csv");
      sa::WriteCsv(test, dir + "/test.csv");
      return kOk;
    }
    if (*disc) {
      ResolveConfig(disc_c);
      sa::Dataset in = sa::ReadCsv(disc_in);
      sa::Dataset fit = disc_fit.empty() ? in : sa::ReadCsv(disc_fit);
      sa::Discretizer d = sa::Discretizer::Fit(
          fit,
          disc_strategy == "uniform" ? sa::BinStrategy::kUniform
                                     : sa::BinStrategy::kQuantile,
          disc_bins);
      WriteText(disc_c.out, sa::FormatCsv(d.Apply(in)));
      return kOk;
    }
    if (*serve) {
      sa::ExperimentSpec spec = sa::SpecFromConfig(ResolveConfig(serve_c));
      sa::Dataset ds = sa::LoadDataset(spec);
      const double eps = spec.epsilons.front();
      std::optional<sa::DpBudget> budget;
      if (!std::isinf(eps)) budget = sa::DpBudget{eps, spec.delta};
      sa::Provider p(ds, sa::MakeProviderConfig(spec, budget));
      auto [host, port] = sa::ParseBindAddress(bind);
      sa::ProviderServer server(p);
      std::signal(SIGINT, OnSignal);
      std::signal(SIGTERM, OnSignal);
      int bound = server.Start(host, port);
      std::cout << "listening on " << host << ":" << bound << std::endl;
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.Stop();
      return kOk;
    }
    if (*mreport) {
      ResolveConfig(report_c);
      sa::Dataset train = sa::ReadCsv(m_train);
      sa::Dataset test = sa::ReadCsv(m_test);
      sa::Dataset synth = sa::ReadCsv(m_synth);
      sa::Metric metric = m_metric.empty() ? sa::DefaultMetric(train.schema())
                                           : sa::ParseMetric(m_metric);
      WriteText(report_c.out,
                sa::ReportToJson(sa::EvaluatePrivacy(train, test, synth, metric)) +
                    "\n");
      return kOk;
    }
    if (*diff) {
      sa::Config config = ResolveConfig(diff_c);
      config.Set("attack.kind", "difference");
      sa::ExperimentSpec spec = sa::SpecFromConfig(config);
      return Finish(sa::RunAttack(spec), spec.out_dir);
    }
    if (*recon) {
      sa::Config config = ResolveConfig(recon_c);
      if (!recon_target.empty()) config.Set("attack.target", recon_target);
      if (config.GetString("attack.kind") == "difference") {
        config.Set("attack.kind", "reconsyn");
      }
      sa::ExperimentSpec spec = sa::SpecFromConfig(config);
      if (recon_remote.empty()) return Finish(sa::RunAttack(spec), spec.out_dir);
      // Remote provider: no ground truth, only the attack's own output.
      auto [host, port] = sa::ParseBindAddress(recon_remote);
      sa::RemoteProvider remote(host, port);
      sa::AttackConfig a = spec.attack;
      if (a.n_train == 0) a.n_train = spec.dataset.n / 2;
      if (a.locator.n_out == 0) {
        a.locator.n_out = sa::DefaultOutlierBudget(a.n_train);
      }
      sa::AttackResult result = spec.attack_kind == "one_call"
                                    ? sa::SampleAttackOneCall(remote, a)
                                    : sa::ReconSyn(remote, a);
      std::filesystem::create_directories(spec.out_dir);
      WriteText(spec.out_dir + "/reconsyn.attack.json",
                sa::AttackResultToJson(result));
      std::cout << "reconstructed " << result.reconstructed.size()
                << " records with " << result.calls_used.sample_calls
                << " sample and " << result.calls_used.metric_calls
                << " metrics calls\n";
      return kOk;
    }
    for (Ce& ce : ces) {
      if (!*ce.app) continue;
      sa::Config config = ResolveConfig(ce.c);
      const uint64_t seed = config.GetUint("seed");
      const std::string dir = config.GetString("out");
      const std::string name = ce.name;
      if (name == "ce1") return Finish(sa::Ce1(seed), dir);
      if (name == "ce2") return Finish(sa::Ce2(seed), dir);
      if (name == "ce3") {
        sa::Ce3Options o;
        o.dims.clear();
        for (double d : config.GetDoubleList("ce3.dims")) {
          o.dims.push_back(static_cast<std::size_t>(d));
        }
        o.n_datasets = config.GetUint("ce3.datasets");
        o.min_expected = config.GetDouble("ce3.min_expected");
        o.seconds_per_dim = config.GetDouble("ce3.seconds_per_dim");
        return Finish(sa::Ce3(seed, o), dir);
      }
      if (name == "ce3-targeted") {
        sa::Ce3TargetedOptions o;
        o.dim = config.GetUint("ce3t.dim");
        o.unconditioned = config.GetBool("ce3t.unconditioned");
        return Finish(sa::Ce3Targeted(seed, o), dir);
      }
      if (name == "ce4") return Finish(sa::Ce4(seed, config.GetUint("ce4.reps")), dir);
      if (name == "ce5") {
        return Finish(sa::Ce5(seed, config.GetUint("ce5.reps"),
                              config.GetDouble("ce5.percentile")),
                      dir);
      }
      if (name == "ce6") {
        sa::Ce6Options o;
        o.bins.clear();
        for (double b : config.GetDoubleList("ce6.bins")) {
          o.bins.push_back(static_cast<std::size_t>(b));
        }
        o.reps = config.GetUint("ce6.reps");
        o.baseline_reps = config.GetUint("ce6.baseline_reps");
        return Finish(sa::Ce6(seed, o), dir);
      }
    }
    if (*dp) {
      sa::Config config = ResolveConfig(dp_c);
      if (!config.Has("dp.epsilon")) config.Set("dp.epsilon", "0.1,1,inf");
      sa::ExperimentSpec spec = sa::SpecFromConfig(config);
      return Finish(sa::DpSweep(spec), spec.out_dir);
    }
    if (*render) {
      ResolveConfig(render_c);
      sa::RunReport r = sa::RunReportFromJson(ReadText(render_in));
      WriteText(render_c.out, sa::RenderReport(r));
      return r.passed() ? kOk : kAssertionFailed;
    }
  } catch (const sa::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const sa::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
