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

#include "bpeal/protocols.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "bpeal/error.hpp"

namespace bpeal {
namespace {

/// The Bayes engine shared by every scheduled protocol. Protocols differ
/// only in where each outcome comes from.
class Estimator {
 public:
  Estimator(const ExperimentConfig& config, const TrialOptions& options)
      : period_(config.period), mode_(config.update_mode), options_(options) {
    const PhaseGrid grid(config.grid_size);
    if (mode_ == UpdateMode::kScheduled) {
      auto rows = options.rows;
      if (!rows || !(rows->grid() == grid) || rows->period() != period_) {
        rows = std::make_shared<const ScheduleLikelihood>(grid, period_);
      }
      scheduled_.emplace(std::move(rows));
    } else {
      sequential_.emplace(uniform_prior(grid));
    }
  }

  void update(std::int64_t n, Outcome u) {
    const int base = base_index(n, period_);
    if (scheduled_) {
      scheduled_->add(base, u);
    } else {
      sequential_->update(u, kTwoPi * base / period_);
    }
    if (options_.outcome_log) options_.outcome_log->push_back(u);
    if (options_.on_update) options_.on_update(n, posterior());
  }

  Posterior posterior() {
    if (scheduled_) return scheduled_->materialize();
    return *sequential_;
  }

 private:
  int period_;
  UpdateMode mode_;
  const TrialOptions& options_;
  std::optional<ScheduledPosterior> scheduled_;
  std::optional<Posterior> sequential_;
};

CheckpointRecord make_record(std::int64_t n, std::int64_t n_meas, const Posterior& p,
                             const ExperimentConfig& config) {
  CheckpointRecord r;
  r.n = n;
  r.n_meas = n_meas;
  r.phi_est = estimate_mean(p, config.estimator);
  r.uncertainty = estimate_uncertainty(p, config.estimator);
  r.error = wrapped_distance(r.phi_est, config.phi_true);
  r.resolution_flag = resolution_limited(p);
  try {
    r.ghosh_bound = ghosh_bound(p).value;
  } catch (const NumericError&) {
    r.ghosh_bound = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

/// Walks the checkpoint list alongside the update loop.
class TraceRecorder {
 public:
  explicit TraceRecorder(const ExperimentConfig& config)
      : config_(config), checkpoints_(config.effective_checkpoints()) {}

  template <typename PosteriorSource>
  void after_update(std::int64_t n, std::int64_t n_meas, PosteriorSource&& source) {
    if (next_ < checkpoints_.size() && checkpoints_[next_] == n) {
      trace_.push_back(make_record(n, n_meas, source(), config_));
      ++next_;
    }
  }

  TrialResult finish(Algorithm algorithm, std::int64_t n_meas, const Posterior& final_posterior,
                     const TrialOptions& options) {
    TrialResult result;
    result.algorithm = algorithm;
    result.n_meas = n_meas;
    if (!trace_.empty() && trace_.back().n == config_.updates) {
      result.phi_est = trace_.back().phi_est;
      result.uncertainty = trace_.back().uncertainty;
      result.error = trace_.back().error;
    } else {
      result.phi_est = estimate_mean(final_posterior, config_.estimator);
      result.uncertainty = estimate_uncertainty(final_posterior, config_.estimator);
      result.error = wrapped_distance(result.phi_est, config_.phi_true);
    }
    result.trace = std::move(trace_);
    if (options.keep_final_posterior) result.final_posterior = final_posterior;
    return result;
  }

 private:
  const ExperimentConfig& config_;
  std::vector<std::int64_t> checkpoints_;
  std::size_t next_ = 0;
  std::vector<CheckpointRecord> trace_;
};

void check_config(const ExperimentConfig& config) {
  config.validate();
}

/// Estimation phase of active learning. When replay_learning is set the
/// profile's stored outcomes become updates 1..M k.
TrialResult run_active(const ExperimentConfig& config, const LearningProfile& profile, bool replay_learning,
                       Rng& rng, const TrialOptions& options) {
  if (profile.period != config.period) {
    throw ConfigError("field 'period': learning profile has k = " + std::to_string(profile.period) +
                      " but the config has " + std::to_string(config.period));
  }
  Estimator estimator(config, options);
  TraceRecorder recorder(config);
  std::int64_t n_meas = 0;
  std::int64_t n = 0;
  auto current = [&] { return estimator.posterior(); };

  if (replay_learning && profile.data) {
    const auto& data = *profile.data;
    for (int m = 0; m < data.repeats() && n < config.updates; ++m) {
      for (int j = 1; j <= data.period() && n < config.updates; ++j) {
        ++n;
        ++n_meas;
        estimator.update(n, data.at(m, j));
        recorder.after_update(n, n_meas, current);
      }
    }
  }

  MeasurementSetting setting{config.phi_true, 0.0, config.particles};
  while (n < config.updates) {
    ++n;
    Outcome u;
    if (is_informative(n, profile)) {
      setting.aux_phase = kTwoPi * base_index(n, config.period) / config.period;
      u = measure(setting, config.noise, rng);
      ++n_meas;
    } else {
      u = synthetic_outcome(n, profile);
    }
    estimator.update(n, u);
    recorder.after_update(n, n_meas, current);
  }

  auto result = recorder.finish(Algorithm::kBpeAl, n_meas, estimator.posterior(), options);
  result.particles_per_measurement = config.particles;
  result.profile = profile;
  return result;
}

struct TrigMoments {
  double c0 = 0.0, s0 = 0.0;     // E cos, E sin
  double cc = 0.0, cs = 0.0, ss = 0.0;  // E cos^2, E cos sin, E sin^2
};

TrigMoments trig_moments(const Posterior& p, const NodeTrig& trig) {
  TrigMoments m;
  const auto w = p.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double c = trig.cos[i];
    const double s = trig.sin[i];
    const double wc = w[i] * c;
    const double ws = w[i] * s;
    m.c0 += wc;
    m.s0 += ws;
    m.cc += wc * c;
    m.cs += wc * s;
    m.ss += ws * s;
  }
  const double h = p.grid().spacing();
  m.c0 *= h;
  m.s0 *= h;
  m.cc *= h;
  m.cs *= h;
  m.ss *= h;
  return m;
}

// E_u[1 - |E[exp(i phi) | u]|] = 1 - |T_0| - |T_1| with
// T_u = E[exp(i phi) p(u | phi, Phi)].
double expected_circular_variance(const TrigMoments& m, double aux_phase) {
  const double ca = std::cos(aux_phase);
  const double sa = std::sin(aux_phase);
  const double re_shift = ca * m.cc + sa * m.cs;
  const double im_shift = ca * m.cs + sa * m.ss;
  double total = 1.0;
  for (double sign : {1.0, -1.0}) {
    const double re = 0.5 * (m.c0 + sign * re_shift);
    const double im = 0.5 * (m.s0 + sign * im_shift);
    total -= std::hypot(re, im);
  }
  return total;
}

double choose_phase(const TrigMoments& m, int candidates) {
  double best_phase = 0.0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int j = 0; j < candidates; ++j) {
    const double phase = kTwoPi * j / candidates;
    const double value = expected_circular_variance(m, phase);
    if (value < best_value - 1e-12) {
      best_value = value;
      best_phase = phase;
    }
  }
  return best_phase;
}

}  // namespace

TrialResult run_bpe(const ExperimentConfig& config, Rng& rng, const TrialOptions& options) {
  check_config(config);
  Estimator estimator(config, options);
  TraceRecorder recorder(config);
  MeasurementSetting setting{config.phi_true, 0.0, config.particles};
  auto current = [&] { return estimator.posterior(); };
  for (std::int64_t n = 1; n <= config.updates; ++n) {
    setting.aux_phase = kTwoPi * base_index(n, config.period) / config.period;
    estimator.update(n, measure(setting, config.noise, rng));
    recorder.after_update(n, n, current);
  }
  auto result = recorder.finish(Algorithm::kBpe, config.updates, estimator.posterior(), options);
  result.particles_per_measurement = config.particles;
  return result;
}

TrialResult run_bpe_al(const ExperimentConfig& config, Rng& learning_rng, Rng& estimation_rng,
                       const TrialOptions& options) {
  check_config(config);
  if (config.updates < config.learning_measurements()) {
    throw ConfigError("field 'updates': active learning needs updates >= repeats * period");
  }
  auto profile = build_profile(run_learning(config, learning_rng), config.sigma_threshold, config.effective_k_min());
  return run_active(config, profile, true, estimation_rng, options);
}

TrialResult run_bpe_al(const ExperimentConfig& config, Rng& rng, const TrialOptions& options) {
  return run_bpe_al(config, rng, rng, options);
}

TrialResult run_bpe_al_with_profile(const ExperimentConfig& config, const LearningProfile& profile,
                                    Rng& estimation_rng, const TrialOptions& options) {
  check_config(config);
  return run_active(config, profile, true, estimation_rng, options);
}

double go_expected_variance(const Posterior& posterior, double aux_phase) {
  return expected_circular_variance(trig_moments(posterior, NodeTrig(posterior.grid())), aux_phase);
}

double go_choose_phase(const Posterior& posterior, int candidates) {
  if (candidates < 1) throw std::invalid_argument("GO needs at least one candidate phase");
  return choose_phase(trig_moments(posterior, NodeTrig(posterior.grid())), candidates);
}

TrialResult run_go_baseline(const ExperimentConfig& config, Rng& rng, const TrialOptions& options) {
  check_config(config);
  const PhaseGrid grid(config.grid_size);
  const NodeTrig trig(grid);
  Posterior posterior = uniform_prior(grid);
  TraceRecorder recorder(config);
  MeasurementSetting setting{config.phi_true, 0.0, 1};
  auto current = [&] { return posterior; };
  for (std::int64_t n = 1; n <= config.updates; ++n) {
    const double phase = choose_phase(trig_moments(posterior, trig), config.period);
    if (options.on_go_choice) options.on_go_choice(n, posterior, phase);
    setting.aux_phase = phase;
    const Outcome u = measure(setting, config.noise, rng);
    posterior.update(u, phase, trig);
    if (options.outcome_log) options.outcome_log->push_back(u);
    if (options.on_update) options.on_update(n, posterior);
    recorder.after_update(n, n, current);
  }
  auto result = recorder.finish(Algorithm::kGoReconstructed, config.updates, posterior, options);
  result.particles_per_measurement = 1;
  result.reconstructed = true;
  return result;
}

std::int64_t measurement_count(std::int64_t updates, int repeats, int period, std::span<const int> selected) {
  const std::int64_t learning = std::int64_t{repeats} * period;
  if (updates < learning) {
    throw std::invalid_argument("measurement_count needs N >= M k (" + std::to_string(learning) + ")");
  }
  if (period < 1) throw std::invalid_argument("period must be >= 1");
  const std::int64_t after = updates - learning;
  const std::int64_t full = after / period;
  const std::int64_t rem = after % period;
  std::int64_t partial = 0;
  for (int idx : selected) {
    if (idx <= rem) ++partial;
  }
  return learning + static_cast<std::int64_t>(selected.size()) * full + partial;
}

}  // namespace bpeal
