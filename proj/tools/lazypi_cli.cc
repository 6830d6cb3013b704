/*
 * Copyright 2026 The lazypi Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "lazypi/lazypi.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

// Carries an exit code and message out of a subcommand.
struct CliFailure {
  int exit_code;
  std::string message;
};

bool IsValidationStatus(lazypi_status s) {
  return s == LAZYPI_ERR_INVALID_ARGUMENT || s == LAZYPI_ERR_DIMENSION ||
         s == LAZYPI_ERR_PARSE;
}

void Check(lazypi_status s, const std::string& context) {
  if (s == LAZYPI_OK) return;
  throw CliFailure{IsValidationStatus(s) ? kExitValidation : kExitRuntime,
                   context + ": " + lazypi_last_error()};
}

struct ManifestDeleter {
  void operator()(lazypi_manifest* m) const { lazypi_manifest_free(m); }
};
struct DatasetDeleter {
  void operator()(lazypi_dataset* d) const { lazypi_dataset_free(d); }
};
struct ComparisonDeleter {
  void operator()(lazypi_comparison* c) const { lazypi_comparison_free(c); }
};
using ManifestPtr = std::unique_ptr<lazypi_manifest, ManifestDeleter>;
using DatasetPtr = std::unique_ptr<lazypi_dataset, DatasetDeleter>;
using ComparisonPtr = std::unique_ptr<lazypi_comparison, ComparisonDeleter>;

std::string TakeString(char* s) {
  std::string out(s);
  lazypi_string_free(s);
  return out;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string Fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// "64,64" -> "[64,64]".
std::string HiddenToJson(const std::string& spec) {
  std::string out = "[";
  std::stringstream in(spec);
  std::string item;
  bool first = true;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if (!first) out += ",";
    out += item;
    first = false;
  }
  return out + "]";
}

std::string MethodsToJson(const std::string& spec) {
  std::string out = "[";
  std::stringstream in(spec);
  std::string item;
  bool first = true;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if (!first) out += ",";
    out += "\"" + item + "\"";
    first = false;
  }
  return out + "]";
}

// Flags shared by the manifest-driven subcommands. Unset flags leave the
// manifest untouched.
struct ManifestFlags {
  std::string manifest_path;
  std::optional<double> alpha, lambda, nu, epsilon, delta, sigma, clip_norm,
      learning_rate;
  std::optional<int> epochs, batch_size, trials, workers, n_train, p;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> hidden, methods;

  void Register(CLI::App* app) {
    app->add_option("--manifest", manifest_path, "JSON manifest to start from");
    app->add_option("--alpha", alpha, "Miscoverage level, in (0, 0.5)");
    app->add_option("--lambda", lambda, "Ridge penalty of the lazy solve");
    app->add_option("--nu", nu, "Interval relaxation");
    app->add_option("--epsilon", epsilon, "Target privacy epsilon");
    app->add_option("--delta", delta, "Target privacy delta");
    app->add_option("--sigma", sigma, "Noise multiplier (skips calibration)");
    app->add_option("--clip-norm", clip_norm, "Per-example clipping norm");
    app->add_option("--learning-rate", learning_rate, "SGD step size");
    app->add_option("--epochs", epochs, "Training epochs");
    app->add_option("--batch-size", batch_size, "Minibatch and lot size");
    app->add_option("--hidden", hidden, "Hidden widths, e.g. 64,64");
    app->add_option("--trials", trials, "Number of trials");
    app->add_option("--seed", seed, "Base seed");
    app->add_option("--workers", workers, "Worker thread cap");
    app->add_option("--n-train", n_train, "Training set size");
    app->add_option("--p", p, "Simulated feature dimension");
    app->add_option("--methods", methods,
                    "Comma-separated methods: naive, jackknife, "
                    "jackknife_plus, lazy_finetune, dp_lazy");
  }

  ManifestPtr Resolve() const {
    lazypi_manifest* raw = nullptr;
    if (manifest_path.empty()) {
      Check(lazypi_manifest_default(&raw), "manifest");
    } else {
      Check(lazypi_manifest_load(manifest_path.c_str(), &raw), manifest_path);
    }
    ManifestPtr m(raw);
    auto set = [&](const char* key, const std::string& value) {
      Check(lazypi_manifest_set(m.get(), key, value.c_str()),
            std::string("--") + key);
    };
    if (alpha) set("interval.alpha", FormatDouble(*alpha));
    if (lambda) set("lazy.lambda", FormatDouble(*lambda));
    if (nu) set("interval.nu", FormatDouble(*nu));
    if (epsilon) set("privacy.epsilon", FormatDouble(*epsilon));
    if (delta) set("privacy.delta", FormatDouble(*delta));
    if (sigma) set("privacy.sigma", FormatDouble(*sigma));
    if (clip_norm) set("privacy.clip_norm", FormatDouble(*clip_norm));
    if (learning_rate) set("training.learning_rate", FormatDouble(*learning_rate));
    if (epochs) set("training.epochs", std::to_string(*epochs));
    if (batch_size) set("training.batch_size", std::to_string(*batch_size));
    if (hidden) set("model.hidden", HiddenToJson(*hidden));
    if (trials) set("trials", std::to_string(*trials));
    if (seed) set("seed", std::to_string(*seed));
    if (workers) {
      set("workers", std::to_string(*workers));
    }
    if (n_train) set("n_train", std::to_string(*n_train));
    if (p) set("data.p", std::to_string(*p));
    if (methods) set("methods", MethodsToJson(*methods));
    return m;
  }
};

std::string ManifestJson(const lazypi_manifest* m) {
  char* json = nullptr;
  Check(lazypi_manifest_to_json(m, &json), "manifest");
  return TakeString(json);
}

void PrintPrivacy(const lazypi_privacy_info& info) {
  std::cout << "privacy: sigma=" << FormatDouble(info.sigma)
            << (info.sigma_calibrated ? " (calibrated)" : " (fixed)")
            << " steps=" << info.iterations
            << " q=" << FormatDouble(info.sampling_rate)
            << " epsilon_accounted=" << FormatDouble(info.epsilon_accounted)
            << " epsilon_nominal=" << FormatDouble(info.epsilon_nominal)
            << " delta=" << FormatDouble(info.delta) << "\n";
  const double tol = 1e-6 * std::max(1.0, info.epsilon_nominal);
  if (!(info.epsilon_accounted <= info.epsilon_nominal + tol)) {
    std::cerr << "warning: accounted epsilon " << FormatDouble(info.epsilon_accounted)
              << " exceeds the nominal " << FormatDouble(info.epsilon_nominal)
              << "\n";
  }
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  lazypi_sim_config cfg{};
  long long n = 0;
  long long p = 0;
  std::string out = "simulated.csv";
  bool dry_run = false;
};

int RunSimulate(SimulateArgs& a) {
  if (a.n < 1) throw CliFailure{kExitValidation, "--n must be >= 1"};
  if (a.p < 1) throw CliFailure{kExitValidation, "--p must be >= 1"};
  a.cfg.n_total = static_cast<size_t>(a.n);
  a.cfg.p = static_cast<size_t>(a.p);
  if (a.dry_run) {
    std::cout << "simulate n=" << a.cfg.n_total << " p=" << a.cfg.p
              << " x_scale=" << FormatDouble(a.cfg.x_scale)
              << " noise_sd=" << FormatDouble(a.cfg.noise_sd)
              << " beta=(" << FormatDouble(a.cfg.beta_a) << ", "
              << FormatDouble(a.cfg.beta_b) << ") seed=" << a.cfg.seed
              << " out=" << a.out << "\n";
    return kExitOk;
  }
  lazypi_dataset* raw = nullptr;
  Check(lazypi_dataset_simulate(&a.cfg, &raw), "simulate");
  DatasetPtr data(raw);
  Check(lazypi_dataset_write_csv(data.get(), a.out.c_str()), a.out);
  std::cout << "wrote " << a.out << ": " << lazypi_dataset_rows(data.get())
            << " rows x " << lazypi_dataset_cols(data.get()) + 1
            << " columns (" << lazypi_dataset_cols(data.get())
            << " features + response)\n";
  return kExitOk;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  ManifestFlags flags;
  std::string output_dir = "results";
  bool dry_run = false;
};

int RunCompare(const CompareArgs& a) {
  ManifestPtr m = a.flags.Resolve();
  if (a.dry_run) {
    std::cout << ManifestJson(m.get());
    lazypi_privacy_info info{};
    Check(lazypi_manifest_resolve_privacy(m.get(), 0, &info), "privacy");
    PrintPrivacy(info);
    return kExitOk;
  }
  lazypi_comparison* raw = nullptr;
  Check(lazypi_run_comparison(m.get(), a.output_dir.c_str(), &raw), "compare");
  ComparisonPtr c(raw);
  lazypi_privacy_info info{};
  Check(lazypi_comparison_privacy(c.get(), &info), "compare");
  PrintPrivacy(info);
  for (size_t i = 0; i < lazypi_comparison_method_count(c.get()); ++i) {
    lazypi_aggregate agg{};
    Check(lazypi_comparison_aggregate(c.get(), i, &agg), "compare");
    char line[256];
    std::snprintf(line, sizeof(line), "%-15s", agg.method);
    std::cout << line << " coverage " << Fixed(agg.coverage_mean, 3) << " ± "
              << Fixed(agg.coverage_se, 3) << "  width "
              << Fixed(agg.avg_width_mean, 3) << " ± " << Fixed(agg.avg_width_se, 3)
              << "  time " << Fixed(agg.train_seconds_mean + agg.eval_seconds_mean, 3)
              << "s  (" << agg.trials << " trials)\n";
  }
  std::cout << "results in " << a.output_dir << "\n";
  return kExitOk;
}

// ---- intervals ------------------------------------------------------------

struct IntervalsArgs {
  ManifestFlags flags;
  std::string train_path;
  std::string points_path;
  std::string response_column = "y";
  bool log1p = false;
  std::string out;
  bool dry_run = false;
};

DatasetPtr LoadCsv(const std::string& path, const char* response,
                   lazypi_transform transform) {
  lazypi_dataset* raw = nullptr;
  size_t dropped = 0;
  Check(lazypi_dataset_load_csv(path.c_str(), response, transform, &raw, &dropped),
        path);
  if (dropped > 0) {
    std::cerr << path << ": dropped " << dropped << " rows with missing values\n";
  }
  return DatasetPtr(raw);
}

int RunIntervals(const IntervalsArgs& a) {
  ManifestPtr m = a.flags.Resolve();
  if (a.dry_run) {
    std::cout << ManifestJson(m.get());
    std::cout << "train=" << a.train_path << " points=" << a.points_path << "\n";
    return kExitOk;
  }
  const lazypi_transform transform =
      a.log1p ? LAZYPI_TRANSFORM_LOG1P : LAZYPI_TRANSFORM_IDENTITY;
  DatasetPtr train = LoadCsv(a.train_path, a.response_column.c_str(), transform);
  DatasetPtr points;
  {
    lazypi_dataset* raw = nullptr;
    if (lazypi_dataset_load_csv(a.points_path.c_str(), a.response_column.c_str(),
                                transform, &raw, nullptr) == LAZYPI_OK) {
      points.reset(raw);
    } else {
      points = LoadCsv(a.points_path, nullptr, transform);
    }
  }
  const size_t count = lazypi_dataset_rows(points.get());
  std::vector<lazypi_interval> intervals(count);
  lazypi_privacy_info info{};
  std::uint64_t seed = a.flags.seed.value_or(0);
  Check(lazypi_dp_lazy_intervals(m.get(), train.get(), points.get(), seed,
                                 intervals.data(), &info),
        "intervals");
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw CliFailure{kExitRuntime, "cannot open " + a.out};
  }
  std::ostream& os = a.out.empty() ? std::cout : file;
  const bool labelled = lazypi_dataset_has_responses(points.get()) != 0;
  os << (labelled ? "lower,upper,y,covered\n" : "lower,upper\n");
  size_t covered = 0;
  for (size_t i = 0; i < count; ++i) {
    os << FormatDouble(intervals[i].lower) << "," << FormatDouble(intervals[i].upper);
    if (labelled) {
      double y = 0;
      Check(lazypi_dataset_row(points.get(), i, nullptr, &y), "points");
      const bool in = intervals[i].lower <= y && y <= intervals[i].upper;
      covered += in ? 1 : 0;
      os << "," << FormatDouble(y) << "," << (in ? 1 : 0);
    }
    os << "\n";
  }
  if (!a.out.empty()) {
    PrintPrivacy(info);
    if (labelled && count > 0) {
      std::cout << "coverage " << Fixed(double(covered) / double(count), 4)
                << " over " << count << " points\n";
    }
    std::cout << "wrote " << a.out << "\n";
  }
  return kExitOk;
}

// ---- stability ------------------------------------------------------------

struct StabilityArgs {
  ManifestFlags flags;
  std::optional<int> stability_trials;
  std::optional<int> test_points;
  std::optional<double> stability_nu;
  bool dry_run = false;
};

int RunStability(const StabilityArgs& a) {
  ManifestPtr m = a.flags.Resolve();
  if (a.stability_trials) {
    Check(lazypi_manifest_set(m.get(), "stability.trials",
                              std::to_string(*a.stability_trials).c_str()),
          "--stability-trials");
  }
  if (a.test_points) {
    Check(lazypi_manifest_set(m.get(), "stability.test_points",
                              std::to_string(*a.test_points).c_str()),
          "--test-points");
  }
  if (a.stability_nu) {
    Check(lazypi_manifest_set(m.get(), "stability.nu",
                              FormatDouble(*a.stability_nu).c_str()),
          "--stability-nu");
  }
  if (a.dry_run) {
    std::cout << ManifestJson(m.get());
    return kExitOk;
  }
  lazypi_stability_report r{};
  Check(lazypi_run_stability(m.get(), &r), "stability");
  PrintPrivacy(r.privacy);
  std::cout << "eta=" << FormatDouble(r.eta) << " at nu=" << FormatDouble(r.nu)
            << " (" << r.trials << " trials x " << r.test_points
            << " test points)\n";
  std::cout << "coverage slack 3*sqrt(2*eta + 2*epsilon + delta) = "
            << Fixed(r.slack, 4) << "\n";
  return kExitOk;
}

// ---- accountant -----------------------------------------------------------

struct AccountantArgs {
  std::optional<double> sigma;
  std::optional<double> epsilon;
  double q = 0.1;
  long long steps = 100;
  double delta = 1e-3;
  double eta = 0.0;
};

int RunAccountant(const AccountantArgs& a) {
  if (a.steps < 0) throw CliFailure{kExitValidation, "--steps must be >= 0"};
  if (a.sigma && a.epsilon) {
    throw CliFailure{kExitValidation, "pass either --sigma or --epsilon, not both"};
  }
  double epsilon = 0.0;
  if (a.epsilon) {
    epsilon = *a.epsilon;
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
      throw CliFailure{kExitValidation, "--epsilon must be finite and >= 0"};
    }
    if (epsilon > 0.0 && a.steps > 0) {
      double sigma = 0.0;
      Check(lazypi_calibrate_sigma(epsilon, a.q, a.steps, a.delta, &sigma),
            "accountant");
      std::cout << "sigma=" << FormatDouble(sigma) << " meets epsilon at q="
                << FormatDouble(a.q) << " steps=" << a.steps << "\n";
    }
  } else {
    Check(lazypi_accountant_epsilon(a.sigma.value_or(1.0), a.q, a.steps, a.delta,
                                    &epsilon),
          "accountant");
  }
  std::cout << "epsilon=" << (std::isinf(epsilon) ? "inf" : FormatDouble(epsilon))
            << " delta=" << FormatDouble(a.delta) << "\n";
  if (std::isinf(epsilon)) {
    std::cerr << "warning: sigma=0 adds no noise; the run is not private\n";
    std::cout << "slack=inf\n";
    return kExitOk;
  }
  double slack = 0.0;
  Check(lazypi_coverage_slack(a.eta, epsilon, a.delta, &slack), "accountant");
  std::cout << "slack=" << Fixed(slack, 4) << " (eta=" << FormatDouble(a.eta)
            << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prediction intervals for neural-network regression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lazypi_version()));

  SimulateArgs sim;
  lazypi_sim_config_default(&sim.cfg);
  sim.n = static_cast<long long>(sim.cfg.n_total);
  sim.p = static_cast<long long>(sim.cfg.p);
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic dataset as CSV");
  simulate->add_option("--n", sim.n, "Number of rows");
  simulate->add_option("--p", sim.p, "Number of features");
  simulate->add_option("--seed", sim.cfg.seed, "Seed");
  simulate->add_option("--x-scale", sim.cfg.x_scale, "Feature variance");
  simulate->add_option("--noise-sd", sim.cfg.noise_sd, "Response noise sd");
  simulate->add_option("--out", sim.out, "Output CSV path");
  simulate->add_flag("--dry-run", sim.dry_run, "Print the config only");

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Run the method comparison");
  cmp.flags.Register(compare);
  compare->add_option("--output-dir", cmp.output_dir, "Directory for results");
  compare->add_flag("--dry-run", cmp.dry_run, "Print the resolved config only");

  IntervalsArgs iv;
  auto* intervals = app.add_subcommand("intervals", "DP-lazy intervals for new points");
  iv.flags.Register(intervals);
  intervals->add_option("--train", iv.train_path, "Training CSV")->required();
  intervals->add_option("--points", iv.points_path, "CSV of query points")->required();
  intervals->add_option("--response-column", iv.response_column, "Response column");
  intervals->add_flag("--log1p", iv.log1p, "Fit log(1 + y)");
  intervals->add_option("--out", iv.out, "Output CSV (default stdout)");
  intervals->add_flag("--dry-run", iv.dry_run, "Print the resolved config only");

  StabilityArgs st;
  auto* stability = app.add_subcommand("stability", "Estimate the stability eta");
  st.flags.Register(stability);
  stability->add_option("--stability-trials", st.stability_trials, "Deletion trials");
  stability->add_option("--test-points", st.test_points, "Test points per trial");
  stability->add_option("--stability-nu", st.stability_nu, "Tolerance nu");
  stability->add_flag("--dry-run", st.dry_run, "Print the resolved config only");

  AccountantArgs acc;
  auto* accountant = app.add_subcommand("accountant", "Privacy accounting and slack");
  accountant->add_option("--sigma", acc.sigma, "Noise multiplier");
  accountant->add_option("--epsilon", acc.epsilon, "Budget to report instead");
  accountant->add_option("--q", acc.q, "Sampling rate");
  accountant->add_option("--steps", acc.steps, "Iterations");
  accountant->add_option("--delta", acc.delta, "Delta");
  accountant->add_option("--eta", acc.eta, "Stability eta for the slack");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*simulate) return RunSimulate(sim);
    if (*compare) return RunCompare(cmp);
    if (*intervals) return RunIntervals(iv);
    if (*stability) return RunStability(st);
    if (*accountant) return RunAccountant(acc);
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
