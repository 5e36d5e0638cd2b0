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

#include "bpeal/posterior.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bpeal/error.hpp"

namespace bpeal {

PhaseGrid::PhaseGrid(std::size_t size) : size_(size) {
  if (size < kMinSize) {
    throw std::invalid_argument("phase grid needs at least " + std::to_string(kMinSize) + " points, got " +
                                std::to_string(size));
  }
}

NodeTrig::NodeTrig(const PhaseGrid& grid) : cos(grid.size()), sin(grid.size()) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    cos[i] = std::cos(grid.node(i));
    sin[i] = std::sin(grid.node(i));
  }
}

Posterior Posterior::from_unnormalized(PhaseGrid grid, std::vector<double> weights) {
  if (weights.size() != grid.size()) {
    throw std::invalid_argument("posterior has " + std::to_string(weights.size()) + " weights for a grid of " +
                                std::to_string(grid.size()));
  }
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("posterior weights must be non-negative");
  }
  Posterior p(grid, std::move(weights));
  p.normalize();
  return p;
}

Posterior Posterior::restore(PhaseGrid grid, std::vector<double> weights) {
  auto p = from_unnormalized(grid, weights);
  Posterior raw(grid, std::move(weights));
  if (std::abs(raw.integral() - 1.0) <= 1e-9) return raw;
  return p;
}

double Posterior::integral() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0) * grid_.spacing();
}

void Posterior::normalize() {
  const double total = integral();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericError("posterior normalization vanished (all weights underflowed or non-finite)");
  }
  const double scale = 1.0 / total;
  for (double& w : weights_) w *= scale;
}

void Posterior::update(Outcome u, double aux_phase) {
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    weights_[i] *= likelihood(u, grid_.node(i), aux_phase);
  }
  normalize();
}

void Posterior::update(Outcome u, double aux_phase, const NodeTrig& trig) {
  const double sign = u == Outcome::kZero ? 0.5 : -0.5;
  const double ca = sign * std::cos(aux_phase);
  const double sa = sign * std::sin(aux_phase);
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    weights_[i] *= 0.5 + ca * trig.cos[i] + sa * trig.sin[i];
  }
  normalize();
}

Posterior uniform_prior(const PhaseGrid& grid) {
  return Posterior::from_unnormalized(grid, std::vector<double>(grid.size(), 1.0 / kTwoPi));
}

Posterior bayes_update(const Posterior& prior, Outcome u, double aux_phase) {
  Posterior next = prior;
  next.update(u, aux_phase);
  return next;
}

namespace {

struct CircularMoment {
  double c = 0.0;
  double s = 0.0;
};

CircularMoment circular_moment(const Posterior& p) {
  CircularMoment m;
  const auto& grid = p.grid();
  const auto w = p.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double phi = grid.node(i);
    m.c += std::cos(phi) * w[i];
    m.s += std::sin(phi) * w[i];
  }
  m.c *= grid.spacing();
  m.s *= grid.spacing();
  return m;
}

double linear_mean(const Posterior& p) {
  const auto& grid = p.grid();
  const auto w = p.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += grid.node(i) * w[i];
  return acc * grid.spacing();
}

}  // namespace

double estimate_mean(const Posterior& p, MomentMode mode) {
  if (mode == MomentMode::kLinear) return linear_mean(p);
  const auto m = circular_moment(p);
  double mean = std::atan2(m.s, m.c);
  if (mean < 0.0) mean += kTwoPi;
  return mean >= kTwoPi ? 0.0 : mean;
}

double estimate_uncertainty(const Posterior& p, MomentMode mode) {
  if (mode == MomentMode::kCircular) {
    const auto m = circular_moment(p);
    const double resultant = std::min(1.0, std::hypot(m.c, m.s));
    return std::sqrt(-2.0 * std::log(resultant));
  }
  const double mean = linear_mean(p);
  const auto& grid = p.grid();
  const auto w = p.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = grid.node(i) - mean;
    acc += d * d * w[i];
  }
  return std::sqrt(std::max(0.0, acc * grid.spacing()));
}

bool resolution_limited(const Posterior& p) {
  return estimate_uncertainty(p) < kResolutionCells * p.grid().spacing();
}

GhoshBound ghosh_bound(const Posterior& p) {
  const auto w = p.weights();
  const std::size_t n = w.size();
  const double h = p.grid().spacing();
  double information = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] < kGhoshWeightFloor) continue;
    const double next = w[i + 1 == n ? 0 : i + 1];
    const double prev = w[i == 0 ? n - 1 : i - 1];
    const double derivative = (next - prev) / (2.0 * h);
    information += derivative * derivative / w[i];
  }
  information *= h;
  if (!(information > 0.0)) {
    throw NumericError("Ghosh bound undefined: posterior carries no Fisher information");
  }
  return GhoshBound{1.0 / information, resolution_limited(p)};
}

double ghosh_bound_gaussian(const Posterior& p) {
  const double s = estimate_uncertainty(p);
  return s * s;
}

double wrapped_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

void write_posterior_csv(const Posterior& p, std::ostream& out) {
  out << "phi,weight\n";
  char line[64];
  const auto w = p.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", p.grid().node(i), w[i]);
    out << line;
  }
}

namespace {

double parse_double(std::string_view text, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("posterior CSV line " + std::to_string(line_no) + ": bad number '" +
                                std::string(text) + "'");
  }
  return value;
}

}  // namespace

Posterior read_posterior_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("phi,weight", 0) != 0) {
    throw std::invalid_argument("posterior CSV must start with a 'phi,weight' header");
  }
  std::vector<double> phis;
  std::vector<double> weights;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("posterior CSV line " + std::to_string(line_no) + ": expected two columns");
    }
    phis.push_back(parse_double(std::string_view(line).substr(0, comma), line_no));
    weights.push_back(parse_double(std::string_view(line).substr(comma + 1), line_no));
  }
  const PhaseGrid grid(weights.size());
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (std::abs(phis[i] - grid.node(i)) > 1e-9) {
      throw std::invalid_argument("posterior CSV row " + std::to_string(i) + " is not grid node 2 pi i / G");
    }
  }
  return Posterior::restore(grid, std::move(weights));
}

ScheduleLikelihood::ScheduleLikelihood(PhaseGrid grid, int period, std::size_t table_budget_bytes)
    : grid_(grid), period_(period) {
  if (period < 1) throw std::invalid_argument("schedule period must be >= 1");
  const std::size_t entries = std::size_t{2} * static_cast<std::size_t>(period) * grid.size();
  if (entries * sizeof(double) > table_budget_bytes) return;
  table_.resize(entries);
  for (int j = 1; j <= period; ++j) {
    const double aux = aux_phase(j);
    for (int u = 0; u < 2; ++u) {
      double* row = table_.data() + (static_cast<std::size_t>(j - 1) * 2 + u) * grid.size();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        row[i] = std::log(likelihood(static_cast<Outcome>(u), grid.node(i), aux));
      }
    }
  }
}

double ScheduleLikelihood::aux_phase(int index) const {
  return kTwoPi * static_cast<double>(index) / static_cast<double>(period_);
}

void ScheduleLikelihood::accumulate(std::span<double> log_weights, int index, Outcome u,
                                    std::int64_t count) const {
  if (count <= 0) return;
  const double c = static_cast<double>(count);
  if (tabulated()) {
    const double* row = table_.data() + (static_cast<std::size_t>(index - 1) * 2 + to_int(u)) * grid_.size();
    for (std::size_t i = 0; i < log_weights.size(); ++i) log_weights[i] += c * row[i];
    return;
  }
  const double aux = aux_phase(index);
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    log_weights[i] += c * std::log(likelihood(u, grid_.node(i), aux));
  }
}

ScheduledPosterior::ScheduledPosterior(std::shared_ptr<const ScheduleLikelihood> rows)
    : rows_(std::move(rows)),
      pending_(static_cast<std::size_t>(rows_->period()) * 2, 0),
      log_weights_(rows_->grid().size(), 0.0) {}

void ScheduledPosterior::add(int index, Outcome u) {
  if (index < 1 || index > rows_->period()) {
    throw std::out_of_range("schedule index " + std::to_string(index) + " outside [1, " +
                            std::to_string(rows_->period()) + "]");
  }
  ++pending_[static_cast<std::size_t>(index - 1) * 2 + to_int(u)];
  ++updates_;
}

void ScheduledPosterior::flush() {
  bool touched = false;
  for (int j = 1; j <= rows_->period(); ++j) {
    for (int u = 0; u < 2; ++u) {
      auto& count = pending_[static_cast<std::size_t>(j - 1) * 2 + u];
      if (count == 0) continue;
      rows_->accumulate(log_weights_, j, static_cast<Outcome>(u), count);
      count = 0;
      touched = true;
    }
  }
  if (!touched) return;
  const double peak = *std::max_element(log_weights_.begin(), log_weights_.end());
  if (!std::isfinite(peak)) {
    throw NumericError("posterior normalization vanished: every grid point has zero likelihood");
  }
  for (double& lw : log_weights_) lw -= peak;
}

Posterior ScheduledPosterior::materialize() {
  flush();
  std::vector<double> weights(log_weights_.size());
  std::transform(log_weights_.begin(), log_weights_.end(), weights.begin(), [](double lw) { return std::exp(lw); });
  return Posterior::from_unnormalized(rows_->grid(), std::move(weights));
}

}  // namespace bpeal
