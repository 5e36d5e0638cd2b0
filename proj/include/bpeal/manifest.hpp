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
#include <filesystem>
#include <string>
#include <vector>

#include "bpeal/config.hpp"

namespace bpeal {

/// Library version, git-describe style when built from a checkout.
const char* version_string();

/// Lowercase hex SHA-256 of a file's bytes. Throws IoError.
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  ExperimentConfig config;
  std::string extra;  // free-form flags summary
  std::string started_utc;
  std::string finished_utc;
  std::vector<std::filesystem::path> outputs;
};

std::string utc_timestamp();

/// Writes JSON with the config snapshot, seed, version, timestamps and a
/// digest per output file. Throws IoError.
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

}  // namespace bpeal
