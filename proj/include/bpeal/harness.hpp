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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bpeal/config.hpp"
#include "bpeal/learning.hpp"
#include "bpeal/protocols.hpp"

namespace bpeal {

/// Across-trial aggregate at one checkpoint. Standard deviations use the
/// population divisor T.
struct CheckpointStats {
  std::int64_t n = 0;
  double mean_error = 0.0;
  double error_std = 0.0;
  double mean_uncertainty = 0.0;
  double mean_ghosh = 0.0;  // over trials with a defined bound
  double mean_n_meas = 0.0;
  double mean_particles = 0.0;
  int flagged_trials = 0;  // resolution flag raised
};

struct EnsembleStats {
  Algorithm algorithm = Algorithm::kBpe;
  int trials = 0;
  std::vector<CheckpointStats> checkpoints;
  std::vector<int> k_primes;  // per trial, active learning only
  int fallback_trials = 0;

  double k_prime_mean() const;
  double k_prime_median() const;
};

struct HarnessOptions {
  int workers = 0;  // 0: default_workers()
  std::uint64_t axis_index = 0;
  bool keep_first_posterior = false;
  /// Active learning only: share this profile instead of learning per trial.
  const LearningProfile* shared_profile = nullptr;
  /// Reused for all trials when it matches (grid, k).
  std::shared_ptr<const ScheduleLikelihood> rows;
};

/// BPEAL_WORKERS when set and positive, else the hardware concurrency.
int default_workers();

/// One trial with seeds derived from (master seed, axis, trial).
TrialResult run_trial(const ExperimentConfig& config, std::uint64_t axis_index, std::uint64_t trial_index,
                      const TrialOptions& options = {}, const LearningProfile* shared_profile = nullptr);

/// T independent trials, run on a worker pool, returned in trial order.
std::vector<TrialResult> run_trials(const ExperimentConfig& config, int trials, const HarnessOptions& options = {});

/// Deterministic reduction in trial-index order. All trials must share
/// the same checkpoint list.
EnsembleStats aggregate(std::span<const TrialResult> trials);

EnsembleStats run_ensemble(const ExperimentConfig& config, int trials, const HarnessOptions& options = {});

enum class SweepAxis { kPhi, kParticles, kDepolarization, kPhaseNoise, kUpdates };

std::string_view to_string(SweepAxis axis);
/// Accepts phi, particles, depolarization, phase-noise, updates. Throws ConfigError.
SweepAxis parse_sweep_axis(std::string_view text);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kPhi;
  std::vector<double> values;
  ExperimentConfig base;
  int trials = 50;

  /// Non-empty, ascending, each value valid for the axis.
  void validate() const;
};

struct SweepPoint {
  double value = 0.0;
  EnsembleStats stats;
};

ExperimentConfig apply_axis(const ExperimentConfig& base, SweepAxis axis, double value);

/// count phases at the cell centres 2 pi (j + 1/2) / count.
std::vector<double> phi_axis_values(int count);

std::vector<SweepPoint> run_sweep(const SweepSpec& spec, const HarnessOptions& options = {});

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log-space residuals
};

/// Least squares of log(y) against log(x) for (x, y) pairs, e.g. (n_meas,
/// uncertainty^2). Needs at least three points, all positive.
ScalingFit fit_scaling(std::span<const std::pair<double, double>> points);

/// trial_id,n,n_meas,phi_est,uncertainty,error,ghosh_bound,resolution_flag
void write_trace_csv(std::span<const TrialResult> trials, std::ostream& out);
/// n,trials,mean_n_meas,mean_particles,mean_error,error_std,mean_uncertainty,mean_ghosh,flagged_trials
void write_summary_csv(const EnsembleStats& stats, std::ostream& out);
/// axis,value,k_prime_mean,k_prime_median,fallback_trials, then the summary columns.
void write_sweep_csv(SweepAxis axis, std::span<const SweepPoint> points, std::ostream& out);

/// %.17g, the shortest form that round-trips every double.
std::string format_double(double value);

}  // namespace bpeal
