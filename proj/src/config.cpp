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

#include "bpeal/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "bpeal/error.hpp"

namespace bpeal {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kBpe: return "bpe";
    case Algorithm::kBpeAl: return "bpe-al";
    case Algorithm::kGoReconstructed: return "go-reconstructed";
  }
  return "unknown";
}

std::string_view to_string(MomentMode mode) {
  return mode == MomentMode::kLinear ? "linear" : "circular";
}

std::string_view to_string(UpdateMode mode) {
  return mode == UpdateMode::kScheduled ? "scheduled" : "sequential";
}

Algorithm parse_algorithm(std::string_view text) {
  if (text == "bpe") return Algorithm::kBpe;
  if (text == "bpe-al") return Algorithm::kBpeAl;
  if (text == "go-reconstructed" || text == "go") return Algorithm::kGoReconstructed;
  throw ConfigError("field 'algorithm': expected bpe, bpe-al or go-reconstructed, got '" + std::string(text) + "'");
}

int ExperimentConfig::effective_k_min() const {
  if (k_min) return *k_min;
  return static_cast<int>(std::ceil(0.15 * period - 1e-9));
}

std::vector<std::int64_t> geometric_checkpoints(std::int64_t updates) {
  std::vector<std::int64_t> out;
  for (std::int64_t n = 1; n < updates; n *= 2) out.push_back(n);
  if (updates >= 1) out.push_back(updates);
  return out;
}

std::vector<std::int64_t> ExperimentConfig::effective_checkpoints() const {
  if (checkpoints.empty()) return geometric_checkpoints(updates);
  std::vector<std::int64_t> out;
  for (auto n : checkpoints) {
    if (n >= 1 && n <= updates) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (updates >= 1 && (out.empty() || out.back() != updates)) out.push_back(updates);
  return out;
}

namespace {

[[noreturn]] void field_error(std::string_view field, const std::string& what) {
  throw ConfigError("field '" + std::string(field) + "': " + what);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(phi_true >= 0.0 && phi_true < kTwoPi)) field_error("phi_true", "must lie in [0, 2pi)");
  if (particles < 1) field_error("particles", "must be >= 1");
  if (period < 2) field_error("period", "must be >= 2");
  if (repeats < 2) field_error("repeats", "must be >= 2");
  if (updates < 0) field_error("updates", "must be >= 0");
  if (algorithm == Algorithm::kBpeAl && updates < learning_measurements()) {
    field_error("updates", "active learning needs updates >= repeats * period (" +
                               std::to_string(learning_measurements()) + ")");
  }
  if (!(sigma_threshold > 0.0) || !std::isfinite(sigma_threshold)) field_error("sigma_threshold", "must be > 0");
  const int kmin = effective_k_min();
  if (kmin < 0 || kmin > period) field_error("k_min", "must lie in [0, period]");
  if (grid_size < PhaseGrid::kMinSize) field_error("grid_size", "must be >= 8");
  if (!(noise.depolarization >= 0.0) || !std::isfinite(noise.depolarization)) {
    field_error("depolarization", "must be finite and >= 0");
  }
  if (!(noise.phase_noise >= 0.0) || !std::isfinite(noise.phase_noise)) {
    field_error("phase_noise", "must be finite and >= 0");
  }
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > updates) field_error("checkpoints", "entries must lie in [1, updates]");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) field_error("checkpoints", "must be strictly increasing");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    field_error(key, "expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

double parse_real(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    field_error(key, "expected a finite number, got '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::int64_t> parse_int_list(std::string_view key, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') field_error(key, "unterminated array");
    text = text.substr(1, text.size() - 2);
  }
  std::vector<std::int64_t> out;
  while (!trim(text).empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.push_back(parse_integer<std::int64_t>(key, item));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

}  // namespace

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view raw) {
  const auto value = unquote(trim(raw));
  if (key == "phi_true" || key == "phi") {
    c.phi_true = parse_real(key, value);
  } else if (key == "particles" || key == "R") {
    c.particles = parse_integer<int>(key, value);
  } else if (key == "period" || key == "k") {
    c.period = parse_integer<int>(key, value);
  } else if (key == "repeats" || key == "M") {
    c.repeats = parse_integer<int>(key, value);
  } else if (key == "updates" || key == "N") {
    c.updates = parse_integer<std::int64_t>(key, value);
  } else if (key == "sigma_threshold") {
    c.sigma_threshold = parse_real(key, value);
  } else if (key == "k_min") {
    if (value == "auto") {
      c.k_min.reset();
    } else {
      c.k_min = parse_integer<int>(key, value);
    }
  } else if (key == "grid_size") {
    c.grid_size = parse_integer<std::size_t>(key, value);
  } else if (key == "depolarization" || key == "q_d") {
    c.noise.depolarization = parse_real(key, value);
  } else if (key == "phase_noise" || key == "q_p") {
    c.noise.phase_noise = parse_real(key, value);
  } else if (key == "seed") {
    c.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "checkpoints") {
    if (value == "geometric") {
      c.checkpoints.clear();
    } else {
      c.checkpoints = parse_int_list(key, value);
    }
  } else if (key == "algorithm") {
    c.algorithm = parse_algorithm(value);
  } else if (key == "estimator") {
    if (value == "linear") {
      c.estimator = MomentMode::kLinear;
    } else if (value == "circular") {
      c.estimator = MomentMode::kCircular;
    } else {
      field_error(key, "expected linear or circular, got '" + std::string(value) + "'");
    }
  } else if (key == "update_mode") {
    if (value == "scheduled") {
      c.update_mode = UpdateMode::kScheduled;
    } else if (value == "sequential") {
      c.update_mode = UpdateMode::kSequential;
    } else {
      field_error(key, "expected scheduled or sequential, got '" + std::string(value) + "'");
    }
  } else {
    throw ConfigError("unknown key '" + std::string(key) + "'");
  }
}

namespace {

std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quote) {
      if (ch == quote) quote = 0;
    } else if (ch == '"' || ch == '\'') {
      quote = ch;
    } else if (ch == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    const auto line = trim(strip_comment(text.substr(0, eol)));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty()) continue;
    if (line.front() == '[') {
      throw ConfigError("line " + std::to_string(line_no) + ": tables are not supported, keys must be flat");
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_setting(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string to_toml(const ExperimentConfig& c) {
  std::ostringstream out;
  char num[64];
  auto real = [&](double v) {
    std::snprintf(num, sizeof num, "%.17g", v);
    return std::string(num);
  };
  out << "phi_true = " << real(c.phi_true) << "\n";
  out << "particles = " << c.particles << "\n";
  out << "period = " << c.period << "\n";
  out << "repeats = " << c.repeats << "\n";
  out << "updates = " << c.updates << "\n";
  out << "sigma_threshold = " << real(c.sigma_threshold) << "\n";
  if (c.k_min) out << "k_min = " << *c.k_min << "\n";
  out << "grid_size = " << c.grid_size << "\n";
  out << "depolarization = " << real(c.noise.depolarization) << "\n";
  out << "phase_noise = " << real(c.noise.phase_noise) << "\n";
  out << "seed = " << c.seed << "\n";
  if (!c.checkpoints.empty()) {
    out << "checkpoints = [";
    for (std::size_t i = 0; i < c.checkpoints.size(); ++i) out << (i ? ", " : "") << c.checkpoints[i];
    out << "]\n";
  }
  out << "algorithm = \"" << to_string(c.algorithm) << "\"\n";
  out << "estimator = \"" << to_string(c.estimator) << "\"\n";
  out << "update_mode = \"" << to_string(c.update_mode) << "\"\n";
  return out.str();
}

}  // namespace bpeal
