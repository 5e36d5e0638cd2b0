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

#include "bpeal/bpeal.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include "bpeal/config.hpp"
#include "bpeal/error.hpp"
#include "bpeal/harness.hpp"
#include "bpeal/learning.hpp"
#include "bpeal/manifest.hpp"
#include "bpeal/posterior.hpp"
#include "bpeal/protocols.hpp"

struct bpeal_config {
  bpeal::ExperimentConfig value;
};

struct bpeal_profile {
  bpeal::LearningProfile value;
};

struct bpeal_run {
  std::vector<bpeal::TrialResult> trials;
  bpeal::EnsembleStats stats;
};

struct bpeal_sweep {
  bpeal::SweepAxis axis;
  std::vector<bpeal::SweepPoint> points;
};

struct bpeal_posterior {
  bpeal::Posterior value;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
bpeal_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return BPEAL_OK;
  } catch (const bpeal::ConfigError& e) {
    g_last_error = e.what();
    return BPEAL_E_CONFIG;
  } catch (const bpeal::IoError& e) {
    g_last_error = e.what();
    return BPEAL_E_IO;
  } catch (const bpeal::NumericError& e) {
    g_last_error = e.what();
    return BPEAL_E_NUMERIC;
  } catch (const bpeal::ContractViolation& e) {
    g_last_error = e.what();
    return BPEAL_E_CONTRACT;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return BPEAL_E_INVALID_ARGUMENT;
  } catch (const std::out_of_range& e) {
    g_last_error = e.what();
    return BPEAL_E_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BPEAL_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BPEAL_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BPEAL_E_INTERNAL;
  }
}

void require(bool condition, const char* what) {
  if (!condition) throw std::invalid_argument(what);
}

std::ofstream open_output(const char* path) {
  require(path != nullptr, "output path is null");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw bpeal::IoError(std::string("cannot open '") + path + "' for writing");
  return out;
}

void close_output(std::ofstream& out, const char* path) {
  out.close();
  if (!out) throw bpeal::IoError(std::string("failed writing '") + path + "'");
}

std::string read_file(const char* path) {
  require(path != nullptr, "input path is null");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw bpeal::IoError(std::string("cannot read '") + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

extern "C" {

const char* bpeal_version(void) { return bpeal::version_string(); }

const char* bpeal_last_error(void) { return g_last_error.c_str(); }

bpeal_status bpeal_config_create(bpeal_config** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new bpeal_config{};
  });
}

bpeal_status bpeal_config_load(const char* path, bpeal_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    auto config = bpeal::load_config(path);
    *out = new bpeal_config{std::move(config)};
  });
}

bpeal_status bpeal_config_set(bpeal_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config != nullptr && key != nullptr && value != nullptr, "null argument");
    bpeal::apply_setting(config->value, key, value);
  });
}

bpeal_status bpeal_config_validate(const bpeal_config* config) {
  return guarded([&] {
    require(config != nullptr, "config is null");
    config->value.validate();
  });
}

bpeal_status bpeal_config_get_seed(const bpeal_config* config, uint64_t* out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    *out = config->value.seed;
  });
}

bpeal_status bpeal_config_serialize(const bpeal_config* config, char* buffer, size_t capacity, size_t* needed) {
  return guarded([&] {
    require(config != nullptr && needed != nullptr, "null argument");
    const auto text = bpeal::to_toml(config->value);
    *needed = text.size() + 1;
    require(buffer != nullptr && capacity >= text.size() + 1, "buffer too small");
    std::memcpy(buffer, text.c_str(), text.size() + 1);
  });
}

void bpeal_config_destroy(bpeal_config* config) { delete config; }

bpeal_status bpeal_learn(const bpeal_config* config, bpeal_profile** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const auto& c = config->value;
    c.validate();
    auto rng = bpeal::make_rng(c.seed, 0, 0, bpeal::StageTag::kLearning);
    auto profile = bpeal::build_profile(bpeal::run_learning(c, rng), c.sigma_threshold, c.effective_k_min());
    *out = new bpeal_profile{std::move(profile)};
  });
}

bpeal_status bpeal_profile_read(const char* path, bpeal_profile** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = nullptr;
    auto profile = bpeal::profile_from_json(read_file(path));
    *out = new bpeal_profile{std::move(profile)};
  });
}

bpeal_status bpeal_profile_write(const bpeal_profile* profile, const char* path) {
  return guarded([&] {
    require(profile != nullptr, "profile is null");
    auto out = open_output(path);
    out << bpeal::profile_to_json(profile->value);
    close_output(out, path);
  });
}

bpeal_status bpeal_profile_k_prime(const bpeal_profile* profile, int* out) {
  return guarded([&] {
    require(profile != nullptr && out != nullptr, "null argument");
    *out = profile->value.k_prime();
  });
}

bpeal_status bpeal_profile_fallback(const bpeal_profile* profile, int* out) {
  return guarded([&] {
    require(profile != nullptr && out != nullptr, "null argument");
    *out = profile->value.fallback ? 1 : 0;
  });
}

bpeal_status bpeal_profile_selected(const bpeal_profile* profile, int* indices, size_t capacity, size_t* count) {
  return guarded([&] {
    require(profile != nullptr && count != nullptr, "null argument");
    const auto& selected = profile->value.selected;
    *count = selected.size();
    for (size_t i = 0; i < selected.size() && i < capacity && indices; ++i) indices[i] = selected[i];
  });
}

void bpeal_profile_destroy(bpeal_profile* profile) { delete profile; }

bpeal_status bpeal_run_create(const bpeal_config* config, int trials, int workers, const bpeal_profile* profile,
                              bpeal_run** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    bpeal::HarnessOptions options;
    options.workers = workers;
    options.keep_first_posterior = true;
    options.shared_profile = profile ? &profile->value : nullptr;
    auto run = std::make_unique<bpeal_run>();
    run->trials = bpeal::run_trials(config->value, trials, options);
    run->stats = bpeal::aggregate(run->trials);
    *out = run.release();
  });
}

bpeal_status bpeal_run_trial_count(const bpeal_run* run, int* out) {
  return guarded([&] {
    require(run != nullptr && out != nullptr, "null argument");
    *out = static_cast<int>(run->trials.size());
  });
}

bpeal_status bpeal_run_trial(const bpeal_run* run, int trial, bpeal_trial_summary* out) {
  return guarded([&] {
    require(run != nullptr && out != nullptr, "null argument");
    if (trial < 0 || static_cast<size_t>(trial) >= run->trials.size()) throw std::out_of_range("trial index out of range");
    const auto& t = run->trials[static_cast<size_t>(trial)];
    out->phi_est = t.phi_est;
    out->uncertainty = t.uncertainty;
    out->error = t.error;
    out->n_meas = t.n_meas;
    out->k_prime = t.profile ? t.profile->k_prime() : -1;
    out->fallback = t.profile && t.profile->fallback ? 1 : 0;
  });
}

bpeal_status bpeal_run_write_trace(const bpeal_run* run, const char* path) {
  return guarded([&] {
    require(run != nullptr, "run is null");
    auto out = open_output(path);
    bpeal::write_trace_csv(run->trials, out);
    close_output(out, path);
  });
}

bpeal_status bpeal_run_write_summary(const bpeal_run* run, const char* path) {
  return guarded([&] {
    require(run != nullptr, "run is null");
    auto out = open_output(path);
    bpeal::write_summary_csv(run->stats, out);
    close_output(out, path);
  });
}

bpeal_status bpeal_run_write_posterior(const bpeal_run* run, const char* path) {
  return guarded([&] {
    require(run != nullptr && !run->trials.empty(), "run is null or empty");
    const auto& posterior = run->trials.front().final_posterior;
    require(posterior.has_value(), "run kept no posterior");
    auto out = open_output(path);
    bpeal::write_posterior_csv(*posterior, out);
    close_output(out, path);
  });
}

void bpeal_run_destroy(bpeal_run* run) { delete run; }

bpeal_status bpeal_sweep_create(const bpeal_config* config, const char* axis, const double* values, size_t count,
                                int trials, int workers, bpeal_sweep** out) {
  return guarded([&] {
    require(config != nullptr && axis != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    bpeal::SweepSpec spec;
    spec.axis = bpeal::parse_sweep_axis(axis);
    if (count > 0) {
      require(values != nullptr, "values is null");
      spec.values.assign(values, values + count);
    }
    spec.base = config->value;
    spec.trials = trials;
    bpeal::HarnessOptions options;
    options.workers = workers;
    auto sweep = std::make_unique<bpeal_sweep>();
    sweep->axis = spec.axis;
    sweep->points = bpeal::run_sweep(spec, options);
    *out = sweep.release();
  });
}

bpeal_status bpeal_sweep_point_count(const bpeal_sweep* sweep, size_t* out) {
  return guarded([&] {
    require(sweep != nullptr && out != nullptr, "null argument");
    *out = sweep->points.size();
  });
}

bpeal_status bpeal_sweep_k_prime(const bpeal_sweep* sweep, size_t point, double* mean, double* median) {
  return guarded([&] {
    require(sweep != nullptr, "sweep is null");
    if (point >= sweep->points.size()) throw std::out_of_range("sweep point out of range");
    const auto& stats = sweep->points[point].stats;
    if (mean) *mean = stats.k_prime_mean();
    if (median) *median = stats.k_prime_median();
  });
}

bpeal_status bpeal_sweep_write(const bpeal_sweep* sweep, const char* path) {
  return guarded([&] {
    require(sweep != nullptr, "sweep is null");
    auto out = open_output(path);
    bpeal::write_sweep_csv(sweep->axis, sweep->points, out);
    close_output(out, path);
  });
}

void bpeal_sweep_destroy(bpeal_sweep* sweep) { delete sweep; }

bpeal_status bpeal_phi_axis_values(int count, double* values) {
  return guarded([&] {
    require(values != nullptr, "values is null");
    const auto phis = bpeal::phi_axis_values(count);
    std::copy(phis.begin(), phis.end(), values);
  });
}

bpeal_status bpeal_posterior_read(const char* path, bpeal_posterior** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = nullptr;
    std::istringstream in(read_file(path));
    try {
      *out = new bpeal_posterior{bpeal::read_posterior_csv(in)};
    } catch (const std::invalid_argument& e) {
      throw bpeal::ConfigError(std::string(path) + ": " + e.what());
    }
  });
}

bpeal_status bpeal_posterior_bound(const bpeal_posterior* posterior, bpeal_bound_report* out) {
  return guarded([&] {
    require(posterior != nullptr && out != nullptr, "null argument");
    const auto& p = posterior->value;
    out->grid_size = p.grid().size();
    out->phi_est = bpeal::estimate_mean(p);
    out->uncertainty = bpeal::estimate_uncertainty(p);
    out->gaussian_bound = bpeal::ghosh_bound_gaussian(p);
    out->resolution_flag = bpeal::resolution_limited(p) ? 1 : 0;
    try {
      out->ghosh_bound = bpeal::ghosh_bound(p).value;
      out->defined = 1;
    } catch (const bpeal::NumericError&) {
      out->ghosh_bound = std::numeric_limits<double>::quiet_NaN();
      out->defined = 0;
    }
  });
}

void bpeal_posterior_destroy(bpeal_posterior* posterior) { delete posterior; }

bpeal_status bpeal_manifest_write(const char* path, const bpeal_config* config, const char* command, const char* flags,
                                  const char* started_utc, const char* const* outputs, size_t output_count) {
  return guarded([&] {
    require(path != nullptr && config != nullptr && command != nullptr, "null argument");
    bpeal::RunManifest manifest;
    manifest.command = command;
    manifest.config = config->value;
    manifest.extra = flags ? flags : "";
    manifest.started_utc = started_utc ? started_utc : "";
    for (size_t i = 0; i < output_count; ++i) {
      require(outputs != nullptr && outputs[i] != nullptr, "null output path");
      manifest.outputs.emplace_back(outputs[i]);
    }
    bpeal::write_manifest(manifest, path);
  });
}

bpeal_status bpeal_utc_now(char* buffer, size_t capacity) {
  return guarded([&] {
    const auto now = bpeal::utc_timestamp();
    require(buffer != nullptr && capacity > now.size(), "buffer too small");
    std::memcpy(buffer, now.c_str(), now.size() + 1);
  });
}

}  // extern "C"
