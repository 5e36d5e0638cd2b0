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
#include <random>

namespace bpeal {

using Rng = std::mt19937_64;

/// Separates the random streams used by the different stages of one trial.
enum class StageTag : std::uint64_t {
  kLearning = 0x4c45'4152'4e00'0001ULL,
  kEstimation = 0x4553'5449'4d00'0002ULL,
};

/// Mixes (master seed, axis index, trial index, stage) into an independent
/// stream seed. Stable across platforms and releases.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t axis_index,
                          std::uint64_t trial_index, StageTag stage);

inline Rng make_rng(std::uint64_t master_seed, std::uint64_t axis_index,
                    std::uint64_t trial_index, StageTag stage) {
  return Rng(derive_seed(master_seed, axis_index, trial_index, stage));
}

}  // namespace bpeal
