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

#include "bpeal/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "bpeal/error.hpp"
#include "bpeal/posterior.hpp"

namespace bpeal {

LearningData::LearningData(int repeats, int period, std::vector<Outcome> outcomes)
    : repeats_(repeats), period_(period), outcomes_(std::move(outcomes)) {
  if (repeats < 1 || period < 1) throw std::invalid_argument("learning data needs repeats >= 1 and period >= 1");
  if (outcomes_.size() != static_cast<std::size_t>(repeats) * period) {
    throw std::invalid_argument("learning data must hold exactly repeats * period outcomes");
  }
}

int base_index(std::int64_t n, int period) {
  if (n < 1) throw std::invalid_argument("update index must be >= 1");
  return static_cast<int>((n - 1) % period) + 1;
}

LearningData run_learning(const ExperimentConfig& config, Rng& rng) {
  if (config.repeats < 2 || config.period < 2) {
    throw std::invalid_argument("learning needs repeats >= 2 and period >= 2");
  }
  std::vector<Outcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(config.repeats) * config.period);
  MeasurementSetting setting{config.phi_true, 0.0, config.particles};
  for (int m = 0; m < config.repeats; ++m) {
    for (int j = 1; j <= config.period; ++j) {
      setting.aux_phase = kTwoPi * j / config.period;
      outcomes.push_back(measure(setting, config.noise, rng));
    }
  }
  return LearningData(config.repeats, config.period, std::move(outcomes));
}

OutcomeSummary summarize(const LearningData& data) {
  const int k = data.period();
  const double m_count = data.repeats();
  OutcomeSummary s{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
  for (int j = 1; j <= k; ++j) {
    double sum = 0.0;
    for (int m = 0; m < data.repeats(); ++m) sum += to_int(data.at(m, j));
    const double mean = sum / m_count;
    double sq = 0.0;
    for (int m = 0; m < data.repeats(); ++m) {
      const double d = to_int(data.at(m, j)) - mean;
      sq += d * d;
    }
    s.means[j - 1] = mean;
    s.stds[j - 1] = std::sqrt(sq / m_count);
  }
  return s;
}

double binary_entropy(double u_bar) {
  if (!(u_bar >= 0.0 && u_bar <= 1.0)) throw std::invalid_argument("binary entropy needs a mean in [0, 1]");
  auto term = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
  return term(u_bar) + term(1.0 - u_bar);
}

Selection select_informative(std::span<const double> stds, double threshold, int k_min) {
  if (!(threshold > 0.0)) throw std::invalid_argument("selection threshold must be > 0");
  Selection out;
  for (std::size_t i = 0; i < stds.size(); ++i) {
    if (stds[i] > threshold) out.indices.push_back(static_cast<int>(i) + 1);
  }
  const auto wanted = static_cast<std::size_t>(std::clamp<int>(k_min, 0, static_cast<int>(stds.size())));
  if (out.indices.size() >= wanted) return out;

  std::vector<int> order(stds.size());
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return stds[a - 1] > stds[b - 1]; });
  order.resize(wanted);
  std::sort(order.begin(), order.end());
  return Selection{std::move(order), true};
}

LearningProfile build_profile(LearningData data, double threshold, int k_min) {
  auto summary = summarize(data);
  auto selection = select_informative(summary.stds, threshold, k_min);
  LearningProfile p;
  p.period = data.period();
  p.threshold = threshold;
  p.k_min = k_min;
  p.means = std::move(summary.means);
  p.stds = std::move(summary.stds);
  p.selected = std::move(selection.indices);
  p.fallback = selection.fallback;
  p.data = std::move(data);
  return p;
}

bool is_informative(std::int64_t n, const LearningProfile& profile) {
  const int base = base_index(n, profile.period);
  return std::binary_search(profile.selected.begin(), profile.selected.end(), base);
}

Outcome synthetic_outcome(std::int64_t n, const LearningProfile& profile) {
  if (is_informative(n, profile)) {
    throw ContractViolation("synthetic outcome requested for informative update " + std::to_string(n));
  }
  return profile.means[base_index(n, profile.period) - 1] >= 0.5 ? Outcome::kOne : Outcome::kZero;
}

std::string profile_to_json(const LearningProfile& profile) {
  nlohmann::ordered_json j;
  j["k"] = profile.period;
  j["threshold"] = profile.threshold;
  j["k_min"] = profile.k_min;
  j["means"] = profile.means;
  j["stds"] = profile.stds;
  j["selected"] = profile.selected;
  j["k_prime"] = profile.k_prime();
  j["flags"] = {{"fallback", profile.fallback}};
  if (profile.data) {
    j["repeats"] = profile.data->repeats();
    std::vector<std::string> rows;
    for (int m = 0; m < profile.data->repeats(); ++m) {
      std::string row;
      for (int idx = 1; idx <= profile.period; ++idx) row.push_back(profile.data->at(m, idx) == Outcome::kOne ? '1' : '0');
      rows.push_back(std::move(row));
    }
    j["outcomes"] = rows;
  }
  return j.dump(2) + "\n";
}

LearningProfile profile_from_json(std::string_view text) {
  LearningProfile p;
  try {
    const auto j = nlohmann::json::parse(text);
    p.period = j.at("k").get<int>();
    p.threshold = j.at("threshold").get<double>();
    p.k_min = j.value("k_min", 0);
    p.means = j.at("means").get<std::vector<double>>();
    p.stds = j.at("stds").get<std::vector<double>>();
    p.selected = j.at("selected").get<std::vector<int>>();
    p.fallback = j.at("flags").value("fallback", false);
    if (j.contains("outcomes")) {
      const auto rows = j.at("outcomes").get<std::vector<std::string>>();
      std::vector<Outcome> outcomes;
      for (const auto& row : rows) {
        if (row.size() != static_cast<std::size_t>(p.period)) throw ConfigError("profile outcome row length != k");
        for (char ch : row) {
          if (ch != '0' && ch != '1') throw ConfigError("profile outcomes must be 0/1 strings");
          outcomes.push_back(ch == '1' ? Outcome::kOne : Outcome::kZero);
        }
      }
      p.data = LearningData(static_cast<int>(rows.size()), p.period, std::move(outcomes));
    }
    if (j.contains("k_prime") && j.at("k_prime").get<int>() != p.k_prime()) {
      throw ConfigError("profile k_prime disagrees with the selected list");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed learning profile: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("malformed learning profile: ") + e.what());
  }
  if (p.period < 1 || p.means.size() != static_cast<std::size_t>(p.period) ||
      p.stds.size() != static_cast<std::size_t>(p.period)) {
    throw ConfigError("learning profile needs k >= 1 and k means/stds");
  }
  if (!std::is_sorted(p.selected.begin(), p.selected.end()) ||
      std::adjacent_find(p.selected.begin(), p.selected.end()) != p.selected.end()) {
    throw ConfigError("learning profile 'selected' must be strictly increasing");
  }
  for (int idx : p.selected) {
    if (idx < 1 || idx > p.period) throw ConfigError("learning profile 'selected' entries must lie in [1, k]");
  }
  return p;
}

}  // namespace bpeal
