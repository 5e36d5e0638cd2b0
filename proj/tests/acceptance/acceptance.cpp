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

// Acceptance suite. Prints one PASS/FAIL line per criterion, then a
// SUITE COMPLETE line once every criterion has been evaluated. Exits
// non-zero if any gating criterion fails; criterion 9 is advisory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "bpeal/error.hpp"
#include "bpeal/harness.hpp"
#include "bpeal/interferometer.hpp"
#include "bpeal/learning.hpp"
#include "bpeal/posterior.hpp"
#include "bpeal/protocols.hpp"

namespace {

using namespace bpeal;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double factor(double a, double b) { return std::max(a / b, b / a); }

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

const CheckpointStats& at_checkpoint(const EnsembleStats& s, std::int64_t n) {
  for (const auto& c : s.checkpoints) {
    if (c.n == n) return c;
  }
  throw std::runtime_error("missing checkpoint " + std::to_string(n));
}

ExperimentConfig reference_defaults() {
  ExperimentConfig c;
  c.algorithm = Algorithm::kBpeAl;
  return c;
}

// Shared between criteria 2, 3 and 9.
std::vector<TrialResult> g_al_trials;

Verdict measurement_reduction() {
  const auto start = Clock::now();
  auto config = reference_defaults();
  std::vector<double> k_primes;
  bool band = true;
  double worst_ratio = 0.0;
  double slowest = 0.0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    config.seed = 20'210'623 + s;
    const auto trial_start = Clock::now();
    const auto bpe_al = run_trial(config, 0, 0);
    slowest = std::max(slowest, seconds_since(trial_start));
    const int k = bpe_al.profile->k_prime();
    k_primes.push_back(k);
    band = band && k >= 4 && k <= 10;
    worst_ratio = std::max(worst_ratio, static_cast<double>(bpe_al.n_meas) / static_cast<double>(config.updates));
  }
  auto bpe = config;
  bpe.algorithm = Algorithm::kBpe;
  const auto bpe_start = Clock::now();
  const auto conventional = run_trial(bpe, 0, 0);
  slowest = std::max(slowest, seconds_since(bpe_start));
  const double med = median(k_primes);
  const bool counts = conventional.n_meas == 40000;
  const bool pass = band && med == 6.0 && worst_ratio <= 0.20 && counts && slowest < 30.0;
  return {pass, fmt("k' in [%g, %g], median %g over 20 seeds; n_meas ratio max %.4f; BPE n_meas %lld; "
                    "slowest trial %.2f s (total %.1f s)",
                    *std::min_element(k_primes.begin(), k_primes.end()),
                    *std::max_element(k_primes.begin(), k_primes.end()), med, worst_ratio,
                    static_cast<long long>(conventional.n_meas), slowest, seconds_since(start))};
}

Verdict precision_parity() {
  auto config = reference_defaults();
  config.checkpoints = {800, 4000, 40000};
  auto traced = config;
  traced.checkpoints = geometric_checkpoints(40000);
  for (std::int64_t n : {800, 4000, 40000}) traced.checkpoints.push_back(n);
  std::sort(traced.checkpoints.begin(), traced.checkpoints.end());
  traced.checkpoints.erase(std::unique(traced.checkpoints.begin(), traced.checkpoints.end()), traced.checkpoints.end());
  g_al_trials = run_trials(traced, 50);
  const auto al = aggregate(g_al_trials);
  auto bpe_config = traced;
  bpe_config.algorithm = Algorithm::kBpe;
  const auto bpe = run_ensemble(bpe_config, 50);
  bool pass = true;
  std::string detail;
  for (std::int64_t n : {800, 4000, 40000}) {
    const double a = at_checkpoint(al, n).mean_error;
    const double b = at_checkpoint(bpe, n).mean_error;
    pass = pass && factor(a, b) <= 2.0;
    detail += fmt("N=%lld: BPE-AL %.3g vs BPE %.3g (x%.2f); ", static_cast<long long>(n), a, b, a / b);
  }
  return {pass, detail + "50 trials each"};
}

Verdict ghosh_and_scaling() {
  // Bound check on every unflagged checkpoint of every trial.
  int checked = 0, violations = 0;
  double worst = 1e300;
  auto scan = [&](const std::vector<TrialResult>& trials) {
    for (const auto& t : trials) {
      for (const auto& r : t.trace) {
        if (r.resolution_flag || !std::isfinite(r.ghosh_bound)) continue;
        ++checked;
        const double ratio = r.uncertainty * r.uncertainty / r.ghosh_bound;
        worst = std::min(worst, ratio);
        if (ratio < 1 - 0.05) ++violations;
      }
    }
  };
  scan(g_al_trials);

  // Scaling run long enough that k' N / k reaches 10^4 for k' up to 10.
  auto config = reference_defaults();
  config.updates = 70000;
  for (std::int64_t n = 1; n <= config.updates; n = n * 5 / 4 + 1) config.checkpoints.push_back(n);
  config.checkpoints.push_back(config.updates);
  const auto trials = run_trials(config, 50);
  scan(trials);

  std::vector<std::pair<double, double>> budget_axis, exact_axis;
  const auto& first = trials.front().trace;
  for (std::size_t i = 0; i < first.size(); ++i) {
    double x_budget = 0.0, x_exact = 0.0, y = 0.0;
    for (const auto& t : trials) {
      const auto& r = t.trace[i];
      x_budget += static_cast<double>(t.profile->k_prime()) * static_cast<double>(r.n) / config.period;
      x_exact += static_cast<double>(r.n_meas);
      y += r.uncertainty * r.uncertainty;
    }
    x_budget /= trials.size();
    x_exact /= trials.size();
    y /= trials.size();
    if (x_budget >= 1e2 && x_budget <= 1e4) budget_axis.emplace_back(x_budget, y);
    if (x_exact >= 1e2 && x_exact <= 1e4) exact_axis.emplace_back(x_exact, y);
  }
  const auto fit = fit_scaling(budget_axis);
  const auto exact = fit_scaling(exact_axis);
  const bool pass = violations == 0 && fit.slope >= -1.2 && fit.slope <= -0.8;
  return {pass, fmt("%d/%d unflagged checkpoints violate var >= 0.95 GB (min ratio %.4f); slope vs k'N/k %.3f "
                    "(%zu points); slope vs exact n_meas %.3f (informational)",
                    violations, checked, worst, fit.slope, budget_axis.size(), exact.slope)};
}

Verdict gaussian_identity() {
  PhaseGrid grid(100000);
  bool pass = true;
  std::string detail;
  for (double s : {0.05, 0.1, 0.5}) {
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = grid.node(i) - kPi;
      w[i] = std::exp(-0.5 * d * d / (s * s));
    }
    const double bound = ghosh_bound(Posterior::from_unnormalized(grid, std::move(w))).value;
    const double rel = std::abs(bound / (s * s) - 1);
    pass = pass && rel <= 0.01;
    detail += fmt("s=%g: GB/s^2-1 = %.2e; ", s, rel);
  }
  return {pass, detail + "G=1e5"};
}

Verdict dynamic_range() {
  SweepSpec spec;
  spec.axis = SweepAxis::kPhi;
  spec.values = phi_axis_values(16);
  spec.base = reference_defaults();
  spec.base.updates = 4000;
  spec.trials = 50;
  const auto points = run_sweep(spec);
  std::vector<double> errors;
  for (const auto& p : points) errors.push_back(p.stats.checkpoints.back().mean_error);
  const double med = median(errors);
  const auto worst = std::max_element(errors.begin(), errors.end());
  const double ratio = *worst / med;
  return {ratio <= 5.0, fmt("max/median mean error %.2f (worst at phi=%.4f, %.3g; median %.3g); edge phases "
                            "%.4f -> %.3g, %.4f -> %.3g",
                            ratio, points[worst - errors.begin()].value, *worst, med, points.front().value,
                            errors.front(), points.back().value, errors.back())};
}

std::string k_prime_list(const std::vector<SweepPoint>& points) {
  std::string s;
  for (const auto& p : points) s += fmt("%g:%g ", p.value, p.stats.k_prime_median());
  return s;
}

bool monotone_within_one(const std::vector<SweepPoint>& points, bool increasing) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double prev = points[i - 1].stats.k_prime_median();
    const double cur = points[i].stats.k_prime_median();
    if (increasing ? cur < prev - 1 : cur > prev + 1) return false;
  }
  return true;
}

Verdict particle_study() {
  SweepSpec spec;
  spec.axis = SweepAxis::kParticles;
  spec.values = {20, 50, 100, 200};
  spec.base = reference_defaults();
  spec.trials = 50;
  const auto points = run_sweep(spec);
  const bool mono = monotone_within_one(points, false);
  const double e100 = points[2].stats.checkpoints.back().mean_error;
  const double e200 = points[3].stats.checkpoints.back().mean_error;
  return {mono && factor(e100, e200) <= 2.0,
          fmt("median k' by R {%s}; mean error R=100 %.3g vs R=200 %.3g (x%.2f)", k_prime_list(points).c_str(), e100,
              e200, e100 / e200)};
}

Verdict noise_robustness() {
  bool pass = true;
  std::string detail;
  for (auto axis : {SweepAxis::kDepolarization, SweepAxis::kPhaseNoise}) {
    SweepSpec spec;
    spec.axis = axis;
    spec.values = {0.0, 0.1, 0.2, 0.3};
    spec.base = reference_defaults();
    spec.trials = 50;
    const auto points = run_sweep(spec);
    const bool mono = monotone_within_one(points, true);
    const double clean = points[0].stats.checkpoints.back().mean_error;
    double worst = 0.0;
    for (const auto& p : points) worst = std::max(worst, factor(p.stats.checkpoints.back().mean_error, clean));
    pass = pass && mono && worst <= 3.0;
    detail += fmt("%s: median k' {%s} error factor max %.2f; ", std::string(to_string(axis)).c_str(),
                  k_prime_list(points).c_str(), worst);
  }
  return {pass, detail + "N/k=1000"};
}

Verdict property_suites() {
  std::vector<std::string> failed;
  // Normalization after every update.
  {
    PhaseGrid grid(4096);
    auto p = uniform_prior(grid);
    Rng rng(1);
    double worst = 0.0;
    for (int n = 1; n <= 5000; ++n) {
      const double aux = kTwoPi * base_index(n, 40) / 40;
      p.update(measure({2.7624, aux, 100}, {}, rng), aux);
      worst = std::max(worst, std::abs(p.integral() - 1));
    }
    if (worst > 1e-9) failed.push_back("normalization");
  }
  // G = 8 brute-force product oracle.
  {
    PhaseGrid grid(8);
    double worst = 0.0;
    const double phases[] = {0.0, 1.3, 2.9, 5.5};
    for (int bits = 0; bits < 8; ++bits) {
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          for (int c = 0; c < 4; ++c) {
            const double aux[3] = {phases[a], phases[b], phases[c]};
            auto p = uniform_prior(grid);
            std::vector<double> prod(8, 1.0);
            double total = 0.0;
            for (int j = 0; j < 3; ++j) p.update(Outcome((bits >> j) & 1), aux[j]);
            for (std::size_t i = 0; i < 8; ++i) {
              for (int j = 0; j < 3; ++j) {
                prod[i] *= 0.5 * (1 + (((bits >> j) & 1) ? -1 : 1) * std::cos(grid.node(i) - aux[j]));
              }
              total += prod[i];
            }
            if (total < 1e-12) continue;
            for (std::size_t i = 0; i < 8; ++i) {
              worst = std::max(worst, std::abs(p.weights()[i] - prod[i] / (total * grid.spacing())));
            }
          }
        }
      }
    }
    if (worst > 1e-12) failed.push_back("G=8 oracle");
  }
  // Binomial against its Gaussian approximation.
  {
    const MeasurementSetting s{kPi / 2, 0.0, 100};
    double worst = 0.0;
    for (int r = 0; r <= 100; ++r) {
      worst = std::max(worst, std::abs(binomial_readout_pmf(r, s) - gaussian_readout_density(r, s)));
    }
    if (worst >= 0.002) failed.push_back("binomial vs Gaussian");
  }
  // Threshold rule.
  for (int particles = 1; particles <= 20; ++particles) {
    for (int r = 0; r <= particles; ++r) {
      if ((threshold({static_cast<double>(r)}, particles) == Outcome::kOne) != (2 * r > particles)) {
        failed.push_back("threshold");
        particles = 21;
        break;
      }
    }
  }
  // Entropy-std equivalence.
  for (int m = 1; m <= 20; ++m) {
    bool ok = true;
    for (int ones = 0; ones <= m; ++ones) {
      std::vector<Outcome> column(m, Outcome::kZero);
      std::fill_n(column.begin(), ones, Outcome::kOne);
      const auto s = summarize(LearningData(m, 1, column));
      const bool interior = ones > 0 && ones < m;
      ok = ok && (s.stds[0] > 0) == interior && (binary_entropy(s.means[0]) > 0) == interior;
      if (2 * ones == m) ok = ok && s.stds[0] == 0.5 && std::abs(binary_entropy(s.means[0]) - std::log(2.0)) < 1e-15;
    }
    if (!ok) {
      failed.push_back("entropy-std");
      break;
    }
  }
  // Determinism.
  {
    auto config = reference_defaults();
    config.grid_size = 20000;
    config.updates = 4000;
    const auto a = run_ensemble(config, 4);
    const auto b = run_ensemble(config, 4);
    bool same = a.k_primes == b.k_primes;
    for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
      same = same && a.checkpoints[i].mean_error == b.checkpoints[i].mean_error &&
             a.checkpoints[i].mean_uncertainty == b.checkpoints[i].mean_uncertainty;
    }
    if (!same) failed.push_back("determinism");
  }
  std::string detail = "normalization, G=8 oracle, binomial/Gaussian, threshold R<=20, entropy-std M<=20, "
                       "determinism";
  if (!failed.empty()) {
    detail = "failed:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

Verdict go_comparison() {
  int wins = 0;
  const int trials = static_cast<int>(g_al_trials.size());
  std::vector<TrialResult> go(trials);
  // Each GO trial gets the same measurement budget as its paired BPE-AL trial.
  std::vector<ExperimentConfig> configs(trials);
  for (int t = 0; t < trials; ++t) {
    configs[t] = reference_defaults();
    configs[t].algorithm = Algorithm::kGoReconstructed;
    configs[t].updates = g_al_trials[t].n_meas;
    configs[t].checkpoints = {configs[t].updates};
    go[t] = run_trial(configs[t], 0, static_cast<std::uint64_t>(t));
    if (g_al_trials[t].error <= go[t].error) ++wins;
  }
  double al_mean = 0.0, go_mean = 0.0;
  for (int t = 0; t < trials; ++t) {
    al_mean += g_al_trials[t].error / trials;
    go_mean += go[t].error / trials;
  }
  const double share = static_cast<double>(wins) / trials;
  return {share >= 0.6, fmt("BPE-AL error <= GO error in %d/%d paired trials (%.0f%%); mean error %.3g vs %.3g",
                            wins, trials, 100 * share, al_mean, go_mean)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
    bool gating;
  };
  const std::vector<Criterion> criteria = {
      {1, "Measurement reduction", measurement_reduction, true},
      {2, "Precision parity", precision_parity, true},
      {3, "Ghosh bound and SQL scaling", ghosh_and_scaling, true},
      {4, "Gaussian-posterior Ghosh identity", gaussian_identity, true},
      {5, "Dynamic range", dynamic_range, true},
      {6, "Particle-number study", particle_study, true},
      {7, "Noise robustness", noise_robustness, true},
      {8, "Property suites", property_suites, true},
      {9, "GO comparison (advisory)", go_comparison, false},
  };
  int failures = 0;
  int passed = 0;
  std::string failed_ids;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (v.pass) ++passed;
    if (!v.pass && c.gating) {
      ++failures;
      failed_ids += (failed_ids.empty() ? "" : ",") + std::to_string(c.id);
    }
    std::printf("%s [%d] %s: %s (%.1f s)\n", v.pass ? "PASS" : (c.gating ? "FAIL" : "FAIL (advisory)"), c.id, c.name,
                v.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("SUITE COMPLETE: %d/%zu criteria passed; gating failures: %s\n", passed, criteria.size(),
              failed_ids.empty() ? "none" : failed_ids.c_str());
  return failures ? 1 : 0;
}
