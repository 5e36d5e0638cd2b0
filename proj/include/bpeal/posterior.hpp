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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "bpeal/interferometer.hpp"

namespace bpeal {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform periodic grid phi_i = 2 pi i / G over [0, 2 pi).
class PhaseGrid {
 public:
  static constexpr std::size_t kMinSize = 8;

  explicit PhaseGrid(std::size_t size);

  std::size_t size() const { return size_; }
  double spacing() const { return kTwoPi / static_cast<double>(size_); }
  double node(std::size_t i) const { return kTwoPi * static_cast<double>(i) / static_cast<double>(size_); }

  friend bool operator==(const PhaseGrid&, const PhaseGrid&) = default;

 private:
  std::size_t size_;
};

enum class MomentMode { kLinear, kCircular };

/// cos and sin of every grid node, for updates at arbitrary phases.
struct NodeTrig {
  explicit NodeTrig(const PhaseGrid& grid);
  std::vector<double> cos;
  std::vector<double> sin;
};

/// Grid density p(phi_i | u_1..u_n). Weights integrate to one under the
/// midpoint rule: sum(w) * spacing == 1.
class Posterior {
 public:
  /// Normalizes the given non-negative weights. Throws NumericError if they
  /// sum to zero (or are not finite) and std::invalid_argument on a size
  /// mismatch or a negative weight.
  static Posterior from_unnormalized(PhaseGrid grid, std::vector<double> weights);
  /// Like from_unnormalized, but weights already integrating to one within
  /// 1e-9 are kept bit-for-bit.
  static Posterior restore(PhaseGrid grid, std::vector<double> weights);

  const PhaseGrid& grid() const { return grid_; }
  std::span<const double> weights() const { return weights_; }
  double integral() const;

  /// Multiplies by the outcome likelihood and renormalizes.
  void update(Outcome u, double aux_phase);
  /// Same update with cos(phi - Phi) expanded through precomputed node
  /// trig, which avoids one cos per cell. Agrees with update() to rounding.
  void update(Outcome u, double aux_phase, const NodeTrig& trig);

 private:
  Posterior(PhaseGrid grid, std::vector<double> weights) : grid_(grid), weights_(std::move(weights)) {}
  void normalize();

  PhaseGrid grid_;
  std::vector<double> weights_;
};

Posterior uniform_prior(const PhaseGrid& grid);

/// Returns the updated posterior; the input is left untouched.
Posterior bayes_update(const Posterior& prior, Outcome u, double aux_phase);

/// Posterior mean. Linear mode integrates phi itself over [0, 2pi); circular
/// mode returns arg E[exp(i phi)] mapped into [0, 2pi).
double estimate_mean(const Posterior& p, MomentMode mode = MomentMode::kLinear);

/// Posterior standard deviation. Circular mode is sqrt(-2 ln |E[exp(i phi)]|).
double estimate_uncertainty(const Posterior& p, MomentMode mode = MomentMode::kLinear);

struct GhoshBound {
  double value = 0.0;
  /// Posterior narrower than five grid cells; finite differences are no
  /// longer trustworthy.
  bool resolution_limited = false;
};

inline constexpr double kGhoshWeightFloor = 1e-30;
inline constexpr double kResolutionCells = 5.0;

/// Inverse Fisher information of the posterior density, with a periodic
/// central-difference derivative and cells below kGhoshWeightFloor skipped.
/// Throws NumericError when the information vanishes (uniform posterior).
GhoshBound ghosh_bound(const Posterior& p);

/// Gaussian-posterior shortcut: the bound equals the variance.
double ghosh_bound_gaussian(const Posterior& p);

bool resolution_limited(const Posterior& p);

/// Distance on the circle, in [0, pi].
double wrapped_distance(double a, double b);

/// "phi,weight" CSV, 17 significant digits.
void write_posterior_csv(const Posterior& p, std::ostream& out);
/// Reads what write_posterior_csv wrote; the grid size is the row count.
Posterior read_posterior_csv(std::istream& in);

/// Log-likelihood rows log p(u | phi_i, Phi_j) for the k scheduled phases
/// Phi_j = 2 pi j / k, j = 1..k. Rows are tabulated when they fit in the
/// memory budget and evaluated on the fly otherwise. Immutable once built,
/// so one instance can serve many trials concurrently.
class ScheduleLikelihood {
 public:
  static constexpr std::size_t kDefaultTableBudget = std::size_t{512} << 20;

  ScheduleLikelihood(PhaseGrid grid, int period, std::size_t table_budget_bytes = kDefaultTableBudget);

  const PhaseGrid& grid() const { return grid_; }
  int period() const { return period_; }
  bool tabulated() const { return !table_.empty(); }

  /// Scheduled auxiliary phase for 1-based index j in [1, k].
  double aux_phase(int index) const;

  /// log_weights[i] += count * log p(u | phi_i, Phi_index).
  void accumulate(std::span<double> log_weights, int index, Outcome u, std::int64_t count) const;

 private:
  PhaseGrid grid_;
  int period_;
  std::vector<double> table_;  // [(index - 1) * 2 + u][i]
};

/// Posterior driven only by scheduled phases. Outcomes are tallied per
/// (schedule index, outcome) and folded into a log-space accumulator when
/// the posterior is requested. Products of likelihoods commute, so the
/// result equals the same sequence of bayes_update calls.
class ScheduledPosterior {
 public:
  explicit ScheduledPosterior(std::shared_ptr<const ScheduleLikelihood> rows);

  /// index is the 1-based position within the period.
  void add(int index, Outcome u);
  std::int64_t updates() const { return updates_; }

  Posterior materialize();

 private:
  void flush();

  std::shared_ptr<const ScheduleLikelihood> rows_;
  std::vector<std::int64_t> pending_;  // [(index - 1) * 2 + u]
  std::vector<double> log_weights_;
  std::int64_t updates_ = 0;
};

}  // namespace bpeal
