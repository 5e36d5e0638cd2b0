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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bpeal/config.hpp"
#include "bpeal/interferometer.hpp"
#include "bpeal/random.hpp"

namespace bpeal {

/// M x k matrix of pre-learning outcomes, row m holding one full sweep of
/// the schedule Phi_j = 2 pi j / k.
class LearningData {
 public:
  LearningData(int repeats, int period, std::vector<Outcome> outcomes);

  int repeats() const { return repeats_; }
  int period() const { return period_; }
  /// m is 0-based, index is the 1-based schedule position.
  Outcome at(int m, int index) const { return outcomes_[static_cast<std::size_t>(m) * period_ + (index - 1)]; }
  std::span<const Outcome> row_major() const { return outcomes_; }
  std::int64_t measurements() const { return std::int64_t{repeats_} * period_; }

 private:
  int repeats_;
  int period_;
  std::vector<Outcome> outcomes_;
};

struct OutcomeSummary {
  std::vector<double> means;  // u-bar per schedule index
  std::vector<double> stds;   // population std, divisor M
};

struct Selection {
  std::vector<int> indices;  // 1-based, ascending
  bool fallback = false;     // threshold yielded fewer than k_min
};

struct LearningProfile {
  int period = 0;
  double threshold = 0.0;
  int k_min = 0;
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<int> selected;
  bool fallback = false;
  /// Raw outcomes, kept so a stored profile can also seed the first M k
  /// updates of a later run.
  std::optional<LearningData> data;

  int k_prime() const { return static_cast<int>(selected.size()); }
};

/// 1-based position within the period: ((n - 1) mod k) + 1.
int base_index(std::int64_t n, int period);

/// M repeats of the k-step schedule, M k real measurements.
LearningData run_learning(const ExperimentConfig& config, Rng& rng);

OutcomeSummary summarize(const LearningData& data);

/// Shannon entropy (nats) of a Bernoulli(u_bar) outcome, 0 log 0 = 0.
double binary_entropy(double u_bar);

/// {n : sigma_n > threshold}. When fewer than k_min qualify, the k_min
/// largest sigma are taken instead (ties to the smaller index) and the
/// fallback flag is set.
Selection select_informative(std::span<const double> stds, double threshold, int k_min);

LearningProfile build_profile(LearningData data, double threshold, int k_min);

/// Whether update n (1-based) falls on a selected schedule position.
bool is_informative(std::int64_t n, const LearningProfile& profile);

/// Outcome substituted for a skipped measurement: 1 iff u_bar >= 0.5.
/// Throws ContractViolation if n is informative.
Outcome synthetic_outcome(std::int64_t n, const LearningProfile& profile);

std::string profile_to_json(const LearningProfile& profile);
/// Throws ConfigError on malformed or inconsistent documents.
LearningProfile profile_from_json(std::string_view text);

}  // namespace bpeal
