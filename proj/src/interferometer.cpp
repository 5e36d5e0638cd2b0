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

#include "bpeal/interferometer.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/binomial.hpp>

#include "bpeal/error.hpp"

namespace bpeal {

void MeasurementSetting::validate() const {
  if (!(phi_true >= 0.0 && phi_true < 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("phi_true must lie in [0, 2pi), got " + std::to_string(phi_true));
  }
  if (!std::isfinite(aux_phase)) throw std::invalid_argument("aux_phase must be finite");
  if (particles < 1) throw std::invalid_argument("particles must be >= 1, got " + std::to_string(particles));
}

void NoiseSpec::validate() const {
  if (!(depolarization >= 0.0) || !std::isfinite(depolarization)) {
    throw std::invalid_argument("depolarization strength must be finite and >= 0");
  }
  if (!(phase_noise >= 0.0) || !std::isfinite(phase_noise)) {
    throw std::invalid_argument("phase-noise strength must be finite and >= 0");
  }
}

double likelihood(Outcome u, double phi, double aux_phase) {
  const double c = std::cos(phi - aux_phase);
  return u == Outcome::kZero ? 0.5 * (1.0 + c) : 0.5 * (1.0 - c);
}

double binomial_readout_pmf(int r, const MeasurementSetting& setting) {
  if (r < 0 || r > setting.particles) {
    throw std::out_of_range("readout count " + std::to_string(r) + " outside [0, " +
                            std::to_string(setting.particles) + "]");
  }
  const double p1 = likelihood(Outcome::kOne, setting.phi_true, setting.aux_phase);
  // Exact at the p1 in {0, 1} corners.
  const boost::math::binomial_distribution<double> dist(setting.particles, p1);
  return boost::math::pdf(dist, r);
}

double gaussian_readout_density(double r, const MeasurementSetting& setting) {
  const double p1 = likelihood(Outcome::kOne, setting.phi_true, setting.aux_phase);
  const double p0 = 1.0 - p1;
  const double variance = setting.particles * p1 * p0;
  if (!(variance > 0.0)) {
    throw NumericError("Gaussian readout approximation is degenerate: p1 = " + std::to_string(p1));
  }
  const double mean = setting.particles * p1;
  const double z = r - mean;
  return std::exp(-z * z / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

ReadoutCount sample_readout(const MeasurementSetting& setting, const NoiseSpec& noise, Rng& rng) {
  double applied_phase = setting.aux_phase;
  if (noise.phase_noise > 0.0) {
    std::normal_distribution<double> kappa(0.0, noise.phase_noise);
    applied_phase += kappa(rng) * std::numbers::pi;
  }
  const double p1 = likelihood(Outcome::kOne, setting.phi_true, applied_phase);
  std::binomial_distribution<int> draw(setting.particles, p1);
  double r = static_cast<double>(draw(rng));
  if (noise.depolarization > 0.0) {
    std::normal_distribution<double> kappa(0.0, noise.depolarization);
    r *= 1.0 + kappa(rng);
  }
  return ReadoutCount{r};
}

Outcome threshold(ReadoutCount r, int particles) {
  return r.value > 0.5 * static_cast<double>(particles) ? Outcome::kOne : Outcome::kZero;
}

Outcome measure(const MeasurementSetting& setting, const NoiseSpec& noise, Rng& rng) {
  return threshold(sample_readout(setting, noise, rng), setting.particles);
}

}  // namespace bpeal
