// Copyright 2026 The bpeal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Talks to the library only through its C interface.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bpeal/bpeal.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

/// Thrown to unwind with a specific exit code after printing a message.
struct Failure {
  int code;
};

int exit_code_for(bpeal_status status) {
  switch (status) {
    case BPEAL_OK: return kExitOk;
    case BPEAL_E_CONFIG:
    case BPEAL_E_INVALID_ARGUMENT: return kExitConfig;
    default: return kExitRuntime;
  }
}

void check(bpeal_status status, const std::string& context) {
  if (status == BPEAL_OK) return;
  std::fprintf(stderr, "bpeal: %s: %s\n", context.c_str(), bpeal_last_error());
  throw Failure{exit_code_for(status)};
}

struct ConfigDeleter {
  void operator()(bpeal_config* c) const { bpeal_config_destroy(c); }
};
struct ProfileDeleter {
  void operator()(bpeal_profile* p) const { bpeal_profile_destroy(p); }
};
struct RunDeleter {
  void operator()(bpeal_run* r) const { bpeal_run_destroy(r); }
};
struct SweepDeleter {
  void operator()(bpeal_sweep* s) const { bpeal_sweep_destroy(s); }
};
struct PosteriorDeleter {
  void operator()(bpeal_posterior* p) const { bpeal_posterior_destroy(p); }
};

using ConfigPtr = std::unique_ptr<bpeal_config, ConfigDeleter>;

/// Options shared by the subcommands that build an experiment config.
struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> settings;
  std::string seed;
  std::string checkpoints;
  bool paper_grid = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "Flat key = value config file");
    cmd->add_option("--set", settings, "Override a config key: key=value (repeatable)");
    cmd->add_option("--seed", seed, "Master seed");
    cmd->add_option("--checkpoints", checkpoints, "Comma-separated update indices, or 'geometric'");
    cmd->add_flag("--paper-grid", paper_grid, "Use a 10^6-point phase grid");
  }

  ConfigPtr build() const {
    bpeal_config* raw = nullptr;
    if (config_path.empty()) {
      check(bpeal_config_create(&raw), "config");
    } else {
      check(bpeal_config_load(config_path.c_str(), &raw), "config");
    }
    ConfigPtr config(raw);
    for (const auto& kv : settings) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "bpeal: --set expects key=value, got '%s'\n", kv.c_str());
        throw Failure{kExitConfig};
      }
      set(config.get(), kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!seed.empty()) set(config.get(), "seed", seed);
    if (!checkpoints.empty()) set(config.get(), "checkpoints", checkpoints);
    if (paper_grid) set(config.get(), "grid_size", "1000000");
    return config;
  }

  static void set(bpeal_config* config, const std::string& key, const std::string& value) {
    check(bpeal_config_set(config, key.c_str(), value.c_str()), "config");
  }

  std::string describe() const {
    std::ostringstream out;
    if (!config_path.empty()) out << "--config " << config_path << ' ';
    for (const auto& s : settings) out << "--set " << s << ' ';
    if (!seed.empty()) out << "--seed " << seed << ' ';
    if (!checkpoints.empty()) out << "--checkpoints " << checkpoints << ' ';
    if (paper_grid) out << "--paper-grid ";
    return out.str();
  }
};

std::string now_utc() {
  char buf[32];
  check(bpeal_utc_now(buf, sizeof buf), "clock");
  return buf;
}

void write_manifest(const std::string& output, const bpeal_config* config, const char* command,
                    const std::string& flags, const std::string& started, const std::vector<std::string>& files) {
  std::vector<const char*> paths;
  for (const auto& f : files) paths.push_back(f.c_str());
  const auto manifest = output + ".manifest.json";
  check(bpeal_manifest_write(manifest.c_str(), config, command, flags.c_str(), started.c_str(), paths.data(),
                             paths.size()),
        "manifest");
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      std::fprintf(stderr, "bpeal: --values: '%s' is not a number\n", item.c_str());
      throw Failure{kExitConfig};
    }
  }
  return out;
}

bool is_count(const std::string& text) {
  return !text.empty() && text.find_first_not_of("0123456789 ") == std::string::npos;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian phase estimation with an active-learning measurement schedule"};
  app.set_version_flag("--version", std::string(bpeal_version()));
  app.require_subcommand(1);

  ConfigFlags learn_flags;
  std::string learn_output;
  auto* learn = app.add_subcommand("learn", "Run the learning stage and store the profile");
  learn_flags.attach(learn);
  learn->add_option("-o,--output", learn_output, "Profile JSON path")->required();

  ConfigFlags run_flags;
  std::string run_output, run_algorithm, run_profile, run_posterior;
  int run_trials = 50;
  auto* run = app.add_subcommand("run", "Monte Carlo trials of one protocol");
  run_flags.attach(run);
  run->add_option("-a,--algorithm", run_algorithm, "bpe, bpe-al or go-reconstructed (default: config)");
  run->add_option("--baseline", run_algorithm, "Alias of --algorithm, e.g. --baseline go-reconstructed");
  run->add_option("-t,--trials", run_trials, "Independent trials");
  run->add_option("-o,--output", run_output, "Trace CSV path")->required();
  run->add_option("--profile", run_profile, "Share a stored learning profile across trials");
  run->add_option("--posterior", run_posterior, "Also write trial 0's final posterior CSV here");

  ConfigFlags sweep_flags;
  std::string sweep_output, sweep_axis, sweep_values, sweep_algorithm;
  int sweep_trials = 50;
  auto* sweep = app.add_subcommand("sweep", "Ensembles across one parameter axis");
  sweep_flags.attach(sweep);
  sweep->add_option("--axis", sweep_axis, "phi, particles, depolarization, phase-noise, updates")->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values; for phi a single integer is a count")
      ->required();
  sweep->add_option("-a,--algorithm", sweep_algorithm, "Protocol (default: config)");
  sweep->add_option("-t,--trials", sweep_trials, "Trials per axis value");
  sweep->add_option("-o,--output", sweep_output, "Sweep CSV path")->required();

  std::vector<std::string> bound_inputs;
  std::string bound_output;
  auto* bound = app.add_subcommand("bound", "Ghosh bound of stored posteriors");
  bound->add_option("posteriors", bound_inputs, "Posterior CSV files (phi,weight)")->required();
  bound->add_option("-o,--output", bound_output, "Bound CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*learn) {
      const auto started = now_utc();
      auto config = learn_flags.build();
      bpeal_profile* raw = nullptr;
      check(bpeal_learn(config.get(), &raw), "learn");
      std::unique_ptr<bpeal_profile, ProfileDeleter> profile(raw);
      check(bpeal_profile_write(profile.get(), learn_output.c_str()), "learn");
      int k_prime = 0, fallback = 0;
      check(bpeal_profile_k_prime(profile.get(), &k_prime), "learn");
      check(bpeal_profile_fallback(profile.get(), &fallback), "learn");
      write_manifest(learn_output, config.get(), "learn", learn_flags.describe(), started, {learn_output});
      std::printf("k_prime=%d fallback=%d\n", k_prime, fallback);
    } else if (*run) {
      const auto started = now_utc();
      auto config = run_flags.build();
      if (!run_algorithm.empty()) ConfigFlags::set(config.get(), "algorithm", run_algorithm);
      check(bpeal_config_validate(config.get()), "config");
      std::unique_ptr<bpeal_profile, ProfileDeleter> profile;
      if (!run_profile.empty()) {
        bpeal_profile* raw = nullptr;
        check(bpeal_profile_read(run_profile.c_str(), &raw), "profile");
        profile.reset(raw);
      }
      bpeal_run* raw_run = nullptr;
      check(bpeal_run_create(config.get(), run_trials, 0, profile.get(), &raw_run), "run");
      std::unique_ptr<bpeal_run, RunDeleter> result(raw_run);
      std::vector<std::string> files{run_output, run_output + ".summary.csv"};
      check(bpeal_run_write_trace(result.get(), files[0].c_str()), "run");
      check(bpeal_run_write_summary(result.get(), files[1].c_str()), "run");
      if (!run_posterior.empty()) {
        check(bpeal_run_write_posterior(result.get(), run_posterior.c_str()), "run");
        files.push_back(run_posterior);
      }
      std::ostringstream flags;
      flags << run_flags.describe() << "--trials " << run_trials;
      if (!run_algorithm.empty()) flags << " --algorithm " << run_algorithm;
      if (!run_profile.empty()) flags << " --profile " << run_profile;
      write_manifest(run_output, config.get(), "run", flags.str(), started, files);
    } else if (*sweep) {
      const auto started = now_utc();
      auto config = sweep_flags.build();
      if (!sweep_algorithm.empty()) ConfigFlags::set(config.get(), "algorithm", sweep_algorithm);
      std::vector<double> values;
      if (sweep_axis == "phi" && is_count(sweep_values)) {
        const int count = std::atoi(sweep_values.c_str());
        values.resize(count > 0 ? static_cast<std::size_t>(count) : 0);
        if (count > 0) check(bpeal_phi_axis_values(count, values.data()), "sweep");
      } else {
        values = parse_values(sweep_values);
      }
      if (values.empty()) {
        std::fprintf(stderr, "bpeal: sweep: --values must name at least one value\n");
        return kExitConfig;
      }
      bpeal_sweep* raw = nullptr;
      check(bpeal_sweep_create(config.get(), sweep_axis.c_str(), values.data(), values.size(), sweep_trials, 0, &raw),
            "sweep");
      std::unique_ptr<bpeal_sweep, SweepDeleter> result(raw);
      check(bpeal_sweep_write(result.get(), sweep_output.c_str()), "sweep");
      std::ostringstream flags;
      flags << sweep_flags.describe() << "--axis " << sweep_axis << " --values " << sweep_values << " --trials "
            << sweep_trials;
      write_manifest(sweep_output, config.get(), "sweep", flags.str(), started, {sweep_output});
    } else if (*bound) {
      std::FILE* out = std::fopen(bound_output.c_str(), "wb");
      if (!out) {
        std::fprintf(stderr, "bpeal: bound: cannot open '%s' for writing\n", bound_output.c_str());
        return kExitRuntime;
      }
      std::unique_ptr<std::FILE, int (*)(std::FILE*)> guard(out, &std::fclose);
      std::fprintf(out, "file,grid_size,phi_est,uncertainty,variance,ghosh_bound,gaussian_bound,resolution_flag\n");
      for (const auto& path : bound_inputs) {
        bpeal_posterior* raw = nullptr;
        check(bpeal_posterior_read(path.c_str(), &raw), "bound");
        std::unique_ptr<bpeal_posterior, PosteriorDeleter> posterior(raw);
        bpeal_bound_report report{};
        check(bpeal_posterior_bound(posterior.get(), &report), "bound");
        std::fprintf(out, "%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", path.c_str(), report.grid_size, report.phi_est,
                     report.uncertainty, report.uncertainty * report.uncertainty, report.ghosh_bound,
                     report.gaussian_bound, report.resolution_flag);
      }
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitOk;
}
