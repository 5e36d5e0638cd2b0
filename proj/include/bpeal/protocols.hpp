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
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bpeal/config.hpp"
#include "bpeal/learning.hpp"
#include "bpeal/posterior.hpp"
#include "bpeal/random.hpp"

namespace bpeal {

struct CheckpointRecord {
  std::int64_t n = 0;
  std::int64_t n_meas = 0;
  double phi_est = 0.0;
  double uncertainty = 0.0;
  double error = 0.0;
  double ghosh_bound = 0.0;  // NaN when undefined
  bool resolution_flag = false;
};

struct TrialResult {
  Algorithm algorithm = Algorithm::kBpe;
  double phi_est = 0.0;
  double uncertainty = 0.0;
  double error = 0.0;  // wrapped, [0, pi]
  std::int64_t n_meas = 0;
  int particles_per_measurement = 1;
  bool reconstructed = false;  // GO baseline
  std::vector<CheckpointRecord> trace;
  std::optional<LearningProfile> profile;
  std::optional<Posterior> final_posterior;
};

/// Optional hooks and shared resources for a single trial.
struct TrialOptions {
  /// Shared likelihood rows for (grid, k); built per trial when null.
  std::shared_ptr<const ScheduleLikelihood> rows;
  bool keep_final_posterior = false;
  /// Receives every outcome fed to the Bayes engine, real or synthetic.
  std::vector<Outcome>* outcome_log = nullptr;
  /// Called after every update with (n, posterior). Materializes the
  /// posterior each step, so keep it to small grids.
  std::function<void(std::int64_t, const Posterior&)> on_update;
  /// GO only: called with (n, posterior before update, chosen phase).
  std::function<void(std::int64_t, const Posterior&, double)> on_go_choice;
};

/// Conventional schedule: N real measurements at Phi_n = 2 pi n / k.
TrialResult run_bpe(const ExperimentConfig& config, Rng& rng, const TrialOptions& options = {});

/// Active-learning schedule. The M k learning outcomes drive the first M k
/// updates; afterwards only selected schedule positions are measured and
/// the rest use the profile's synthetic outcomes.
TrialResult run_bpe_al(const ExperimentConfig& config, Rng& learning_rng, Rng& estimation_rng,
                       const TrialOptions& options = {});
TrialResult run_bpe_al(const ExperimentConfig& config, Rng& rng, const TrialOptions& options = {});

/// Runs against an existing profile. If the profile carries its learning
/// outcomes they are replayed as the first M k updates and counted as
/// measurements; otherwise estimation starts from the prior at n = 1 and
/// follows the selected set throughout.
TrialResult run_bpe_al_with_profile(const ExperimentConfig& config, const LearningProfile& profile,
                                    Rng& estimation_rng, const TrialOptions& options = {});

/// Reconstructed adaptive baseline: single-particle shots, each choosing
/// the candidate phase 2 pi j / k (j = 0..k-1) that minimizes the expected
/// posterior variance one step ahead. Variance is the circular one,
/// 1 - |E exp(i phi)|, so the rule is rotation invariant and a uniform
/// posterior ties every candidate. Ties go to the smallest phase.
TrialResult run_go_baseline(const ExperimentConfig& config, Rng& rng, const TrialOptions& options = {});

/// Candidate phase the GO rule picks for this posterior.
double go_choose_phase(const Posterior& posterior, int candidates);

/// Expected circular posterior variance after one more single-particle shot
/// at aux_phase, from second-order trigonometric moments of the posterior.
double go_expected_variance(const Posterior& posterior, double aux_phase);

/// Exact real-measurement count of an active-learning run of N updates:
/// M k + k' floor((N - M k) / k) + (selected positions in the final partial
/// period). Throws std::invalid_argument if N < M k.
std::int64_t measurement_count(std::int64_t updates, int repeats, int period, std::span<const int> selected);

}  // namespace bpeal
