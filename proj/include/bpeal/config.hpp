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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bpeal/interferometer.hpp"
#include "bpeal/posterior.hpp"

namespace bpeal {

enum class Algorithm { kBpe, kBpeAl, kGoReconstructed };

/// How protocols apply Bayes updates. kScheduled tallies outcomes per
/// schedule index and materializes in log space; kSequential runs one
/// renormalized grid update per outcome. Both give the same posterior.
enum class UpdateMode { kScheduled, kSequential };

std::string_view to_string(Algorithm algorithm);
std::string_view to_string(MomentMode mode);
std::string_view to_string(UpdateMode mode);
/// Accepts "bpe", "bpe-al", "go-reconstructed". Throws ConfigError.
Algorithm parse_algorithm(std::string_view text);

inline constexpr std::size_t kDefaultGridSize = 100'000;
inline constexpr std::size_t kPaperGridSize = 1'000'000;

/// Every free parameter of one experiment. Defaults reproduce the reference
/// demonstration: k = 40, M = 20, R = 100, phi = 2.7624, noiseless.
struct ExperimentConfig {
  double phi_true = 2.7624;
  int particles = 100;             // R
  int period = 40;                 // k
  int repeats = 20;                // M
  std::int64_t updates = 40'000;   // N
  double sigma_threshold = 0.01;
  std::optional<int> k_min;        // defaults to ceil(0.15 k)
  std::size_t grid_size = kDefaultGridSize;
  NoiseSpec noise;
  std::uint64_t seed = 20'210'623;
  std::vector<std::int64_t> checkpoints;  // empty: powers of two plus N
  Algorithm algorithm = Algorithm::kBpeAl;
  MomentMode estimator = MomentMode::kLinear;
  UpdateMode update_mode = UpdateMode::kScheduled;

  int effective_k_min() const;
  /// Sorted checkpoints in [1, N], always ending at N (empty when N == 0).
  std::vector<std::int64_t> effective_checkpoints() const;
  std::int64_t learning_measurements() const { return std::int64_t{repeats} * period; }

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// 1, 2, 4, ... up to N, plus N itself.
std::vector<std::int64_t> geometric_checkpoints(std::int64_t updates);

/// Sets one field from its textual form, using the config-file key names.
/// Throws ConfigError for unknown keys or unparsable values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Parses a flat key = value document (TOML subset: numbers, booleans,
/// quoted strings, arrays of integers, # comments). Unset keys keep their
/// defaults. Validates the result.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Round-trips through parse_config.
std::string to_toml(const ExperimentConfig& config);

}  // namespace bpeal
