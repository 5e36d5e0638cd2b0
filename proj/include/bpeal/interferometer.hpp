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

#include "bpeal/random.hpp"

namespace bpeal {

/// Binary measurement outcome of the two-mode interferometer.
enum class Outcome : std::uint8_t { kZero = 0, kOne = 1 };

inline int to_int(Outcome u) { return static_cast<int>(u); }

struct MeasurementSetting {
  double phi_true = 0.0;    // unknown phase, [0, 2pi)
  double aux_phase = 0.0;   // nominal auxiliary phase, any real
  int particles = 1;        // R

  /// Throws std::invalid_argument on phi_true outside [0, 2pi) or R < 1.
  void validate() const;
};

/// Gaussian noise strengths. Zero in both means noiseless.
struct NoiseSpec {
  double depolarization = 0.0;  // q_d, readout count scaled by (1 + kappa_d)
  double phase_noise = 0.0;     // q_p, applied phase shifted by kappa_p * pi

  bool noiseless() const { return depolarization == 0.0 && phase_noise == 0.0; }
  void validate() const;
};

/// Number of particles found in |1>. Integral for a noiseless readout, real
/// once depolarization has scaled it.
struct ReadoutCount {
  double value = 0.0;
};

/// p(u | phi, Phi) = (1 + (-1)^u cos(phi - Phi)) / 2.
double likelihood(Outcome u, double phi, double aux_phase);

/// Exact binomial probability of r of R particles in |1>.
/// Throws std::out_of_range for r outside [0, R].
double binomial_readout_pmf(int r, const MeasurementSetting& setting);

/// Large-R Gaussian stand-in for the binomial readout, mean R p1 and
/// variance R p1 p0. Throws NumericError when p1 is 0 or 1.
double gaussian_readout_density(double r, const MeasurementSetting& setting);

/// Draws one readout. Phase noise perturbs only the phase the physics sees;
/// the caller's nominal aux_phase is what inference keeps using. Noise
/// draws are skipped entirely at zero strength so a noiseless stream is
/// bit-identical to one that never configured noise.
ReadoutCount sample_readout(const MeasurementSetting& setting, const NoiseSpec& noise, Rng& rng);

/// Majority vote: 1 iff r > R/2. Real (noisy, possibly negative) counts are
/// compared as-is.
Outcome threshold(ReadoutCount r, int particles);

Outcome measure(const MeasurementSetting& setting, const NoiseSpec& noise, Rng& rng);

}  // namespace bpeal
