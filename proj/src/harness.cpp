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

#include "bpeal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "bpeal/error.hpp"

namespace bpeal {

double EnsembleStats::k_prime_mean() const {
  if (k_primes.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(k_primes.begin(), k_primes.end(), 0.0) / static_cast<double>(k_primes.size());
}

double EnsembleStats::k_prime_median() const {
  if (k_primes.empty()) return std::numeric_limits<double>::quiet_NaN();
  auto sorted = k_primes;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  if (sorted.size() % 2 == 1) return sorted[mid];
  return 0.5 * (sorted[mid - 1] + sorted[mid]);
}

int default_workers() {
  if (const char* env = std::getenv("BPEAL_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t axis_index, std::uint64_t trial_index,
                      const TrialOptions& options, const LearningProfile* shared_profile) {
  Rng estimation = make_rng(config.seed, axis_index, trial_index, StageTag::kEstimation);
  switch (config.algorithm) {
    case Algorithm::kBpe:
      return run_bpe(config, estimation, options);
    case Algorithm::kBpeAl: {
      if (shared_profile) return run_bpe_al_with_profile(config, *shared_profile, estimation, options);
      Rng learning = make_rng(config.seed, axis_index, trial_index, StageTag::kLearning);
      return run_bpe_al(config, learning, estimation, options);
    }
    case Algorithm::kGoReconstructed:
      return run_go_baseline(config, estimation, options);
  }
  throw std::logic_error("unhandled algorithm");
}

std::vector<TrialResult> run_trials(const ExperimentConfig& config, int trials, const HarnessOptions& options) {
  if (trials < 1) throw ConfigError("field 'trials': must be >= 1");
  config.validate();

  auto rows = options.rows;
  if (config.update_mode == UpdateMode::kScheduled && config.algorithm != Algorithm::kGoReconstructed) {
    const PhaseGrid grid(config.grid_size);
    if (!rows || !(rows->grid() == grid) || rows->period() != config.period) {
      rows = std::make_shared<const ScheduleLikelihood>(grid, config.period);
    }
  }

  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int i = next++; i < trials; i = next++) {
      try {
        TrialOptions trial_options;
        trial_options.rows = rows;
        trial_options.keep_final_posterior = options.keep_first_posterior && i == 0;
        results[static_cast<std::size_t>(i)] =
            run_trial(config, options.axis_index, static_cast<std::uint64_t>(i), trial_options, options.shared_profile);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };

  const int workers = std::clamp(options.workers > 0 ? options.workers : default_workers(), 1, trials);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

EnsembleStats aggregate(std::span<const TrialResult> trials) {
  if (trials.empty()) throw std::invalid_argument("cannot aggregate an empty ensemble");
  EnsembleStats stats;
  stats.algorithm = trials.front().algorithm;
  stats.trials = static_cast<int>(trials.size());
  const auto& first = trials.front().trace;
  for (const auto& t : trials) {
    if (t.trace.size() != first.size()) throw std::invalid_argument("trials disagree on checkpoints");
    for (std::size_t c = 0; c < first.size(); ++c) {
      if (t.trace[c].n != first[c].n) throw std::invalid_argument("trials disagree on checkpoints");
    }
    if (t.profile) {
      stats.k_primes.push_back(t.profile->k_prime());
      if (t.profile->fallback) ++stats.fallback_trials;
    }
  }
  const double count = static_cast<double>(trials.size());
  for (std::size_t c = 0; c < first.size(); ++c) {
    CheckpointStats cs;
    cs.n = first[c].n;
    int ghosh_count = 0;
    for (const auto& t : trials) {
      const auto& r = t.trace[c];
      cs.mean_error += r.error;
      cs.mean_uncertainty += r.uncertainty;
      cs.mean_n_meas += static_cast<double>(r.n_meas);
      cs.mean_particles += static_cast<double>(r.n_meas) * t.particles_per_measurement;
      if (std::isfinite(r.ghosh_bound)) {
        cs.mean_ghosh += r.ghosh_bound;
        ++ghosh_count;
      }
      if (r.resolution_flag) ++cs.flagged_trials;
    }
    cs.mean_error /= count;
    cs.mean_uncertainty /= count;
    cs.mean_n_meas /= count;
    cs.mean_particles /= count;
    cs.mean_ghosh = ghosh_count ? cs.mean_ghosh / ghosh_count : std::numeric_limits<double>::quiet_NaN();
    double sq = 0.0;
    for (const auto& t : trials) {
      const double d = t.trace[c].error - cs.mean_error;
      sq += d * d;
    }
    cs.error_std = std::sqrt(sq / count);
    stats.checkpoints.push_back(cs);
  }
  return stats;
}

EnsembleStats run_ensemble(const ExperimentConfig& config, int trials, const HarnessOptions& options) {
  const auto results = run_trials(config, trials, options);
  return aggregate(results);
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kPhi: return "phi";
    case SweepAxis::kParticles: return "particles";
    case SweepAxis::kDepolarization: return "depolarization";
    case SweepAxis::kPhaseNoise: return "phase-noise";
    case SweepAxis::kUpdates: return "updates";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view text) {
  if (text == "phi") return SweepAxis::kPhi;
  if (text == "particles" || text == "R") return SweepAxis::kParticles;
  if (text == "depolarization" || text == "q_d") return SweepAxis::kDepolarization;
  if (text == "phase-noise" || text == "q_p") return SweepAxis::kPhaseNoise;
  if (text == "updates" || text == "N") return SweepAxis::kUpdates;
  throw ConfigError("unknown sweep axis '" + std::string(text) +
                    "' (expected phi, particles, depolarization, phase-noise, updates)");
}

ExperimentConfig apply_axis(const ExperimentConfig& base, SweepAxis axis, double value) {
  ExperimentConfig c = base;
  switch (axis) {
    case SweepAxis::kPhi: c.phi_true = value; break;
    case SweepAxis::kParticles: c.particles = static_cast<int>(std::lround(value)); break;
    case SweepAxis::kDepolarization: c.noise.depolarization = value; break;
    case SweepAxis::kPhaseNoise: c.noise.phase_noise = value; break;
    case SweepAxis::kUpdates: c.updates = std::llround(value); break;
  }
  return c;
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("sweep needs at least one axis value");
  if (!std::is_sorted(values.begin(), values.end())) throw ConfigError("sweep values must be ascending");
  if (trials < 1) throw ConfigError("field 'trials': must be >= 1");
  const bool integral = axis == SweepAxis::kParticles || axis == SweepAxis::kUpdates;
  for (double v : values) {
    if (!std::isfinite(v) || (integral && v != std::round(v))) {
      throw ConfigError("sweep value " + format_double(v) + " is not valid for axis " + std::string(to_string(axis)));
    }
    apply_axis(base, axis, v).validate();
  }
}

std::vector<double> phi_axis_values(int count) {
  if (count < 1) throw ConfigError("phi sweep needs a positive count");
  std::vector<double> out;
  for (int j = 0; j < count; ++j) out.push_back(kTwoPi * (j + 0.5) / count);
  return out;
}

std::vector<SweepPoint> run_sweep(const SweepSpec& spec, const HarnessOptions& options) {
  spec.validate();
  HarnessOptions point_options = options;
  if (spec.base.update_mode == UpdateMode::kScheduled && !point_options.rows) {
    point_options.rows = std::make_shared<const ScheduleLikelihood>(PhaseGrid(spec.base.grid_size), spec.base.period);
  }
  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    point_options.axis_index = i;
    const auto config = apply_axis(spec.base, spec.axis, spec.values[i]);
    out.push_back(SweepPoint{spec.values[i], run_ensemble(config, spec.trials, point_options)});
  }
  return out;
}

ScalingFit fit_scaling(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("scaling fit needs at least three points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("scaling fit needs positive inputs");
    logs.emplace_back(std::log(x), std::log(y));
  }
  for (const auto& [lx, ly] : logs) {
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(logs.size());
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw std::invalid_argument("scaling fit needs at least two distinct x values");
  ScalingFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double rss = 0.0;
  for (const auto& [lx, ly] : logs) {
    const double r = ly - (fit.intercept + fit.slope * lx);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_trace_csv(std::span<const TrialResult> trials, std::ostream& out) {
  out << "trial_id,n,n_meas,phi_est,uncertainty,error,ghosh_bound,resolution_flag\n";
  for (std::size_t t = 0; t < trials.size(); ++t) {
    for (const auto& r : trials[t].trace) {
      out << t << ',' << r.n << ',' << r.n_meas << ',' << format_double(r.phi_est) << ','
          << format_double(r.uncertainty) << ',' << format_double(r.error) << ',' << format_double(r.ghosh_bound)
          << ',' << (r.resolution_flag ? 1 : 0) << '\n';
    }
  }
}

namespace {

void write_stats_columns(const CheckpointStats& c, int trials, std::ostream& out) {
  out << c.n << ',' << trials << ',' << format_double(c.mean_n_meas) << ',' << format_double(c.mean_particles) << ','
      << format_double(c.mean_error) << ',' << format_double(c.error_std) << ',' << format_double(c.mean_uncertainty)
      << ',' << format_double(c.mean_ghosh) << ',' << c.flagged_trials;
}

constexpr const char* kStatsHeader =
    "n,trials,mean_n_meas,mean_particles,mean_error,error_std,mean_uncertainty,mean_ghosh,flagged_trials";

}  // namespace

void write_summary_csv(const EnsembleStats& stats, std::ostream& out) {
  out << kStatsHeader << '\n';
  for (const auto& c : stats.checkpoints) {
    write_stats_columns(c, stats.trials, out);
    out << '\n';
  }
}

void write_sweep_csv(SweepAxis axis, std::span<const SweepPoint> points, std::ostream& out) {
  out << "axis,value,k_prime_mean,k_prime_median,fallback_trials," << kStatsHeader << '\n';
  for (const auto& p : points) {
    for (const auto& c : p.stats.checkpoints) {
      out << to_string(axis) << ',' << format_double(p.value) << ',' << format_double(p.stats.k_prime_mean()) << ','
          << format_double(p.stats.k_prime_median()) << ',' << p.stats.fallback_trials << ',';
      write_stats_columns(c, p.stats.trials, out);
      out << '\n';
    }
  }
}

}  // namespace bpeal
