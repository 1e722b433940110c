// Copyright 2026 The npgame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON scenario files for the command-line driver.

#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "npgame/error.hpp"
#include "npgame/penalty.hpp"
#include "npgame/pmf.hpp"
#include "npgame/proactive.hpp"
#include "npgame/sequential.hpp"

namespace npgame {

enum class Spacing { kLinear, kLog };

struct GridSpec {
  std::size_t count = 1;
  double min = 0.0;
  double max = 0.0;
  Spacing spacing = Spacing::kLinear;

  std::vector<double> values() const {
    std::vector<double> out(count);
    if (count == 1) {
      out[0] = min;
      return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(count - 1);
      out[i] = spacing == Spacing::kLinear
                   ? min + t * (max - min)
                   : std::exp(std::log(min) + t * (std::log(max) - std::log(min)));
    }
    // Pin the ends so that e.g. an alpha grid ending at 1 ends at exactly 1.
    out.front() = min;
    out.back() = max;
    return out;
  }
};

struct ScenarioConfig {
  SpacePtr space;
  Pmf f0;
  Pmf f1;
  Penalty lambda{0.0};
  std::optional<double> beta = {};    // threshold given directly
  std::optional<double> alpha = {};   // or through a size
  double prior0 = 0.5;
  std::size_t stages = 1;
  std::optional<GridSpec> alpha_grid = {};
  std::optional<GridSpec> beta_grid = {};
  std::optional<GridSpec> sweep_theta0 = {};
  std::optional<GridSpec> sweep_theta1 = {};
  double r_star = 0.0;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  RegionSelection selection = RegionSelection::kPotentialMinimizing;
  ZetaSearch zeta_search = ZetaSearch::kAssumptionBracket;
  std::optional<double> oracle_step = {};

  ThresholdSpec threshold() const {
    if (beta) return ThresholdSpec::from_beta(*beta, prior0);
    return ThresholdSpec::from_alpha(*alpha, prior0, 1.0 - prior0);
  }

  ProactiveOptions proactive_options() const {
    ProactiveOptions opt;
    opt.selection = selection;
    opt.zeta_search = zeta_search;
    opt.r_star = r_star;
    return opt;
  }

  void override_grid_counts(std::size_t n) {
    for (auto* g : {&alpha_grid, &beta_grid, &sweep_theta0, &sweep_theta1}) {
      if (*g) (*g)->count = n;
    }
  }
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& what) {
  throw Error(ErrorKind::kConfigInvalid, what);
}

inline double positive_number(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) config_error("'" + key + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_error("'" + key + "' must be finite");
  return v;
}

inline std::vector<double> number_list(const nlohmann::json& j,
                                       const std::string& key) {
  if (!j.is_array()) config_error("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(positive_number(x, key));
  return out;
}

inline GridSpec parse_grid(const nlohmann::json& j, const std::string& key) {
  if (!j.is_object()) config_error("'" + key + "' must be an object");
  static const std::set<std::string> known{"count", "min", "max", "spacing"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) config_error("unknown key '" + key + "." + k + "'");
  }
  GridSpec g;
  if (!j.contains("count") || !j["count"].is_number_integer() ||
      j["count"].get<long long>() < 1) {
    config_error("'" + key + ".count' must be a positive integer");
  }
  g.count = j["count"].get<std::size_t>();
  if (!j.contains("min") || !j.contains("max")) {
    config_error("'" + key + "' needs 'min' and 'max'");
  }
  g.min = positive_number(j["min"], key + ".min");
  g.max = positive_number(j["max"], key + ".max");
  if (!(g.min > 0.0) || !(g.max >= g.min)) {
    config_error("'" + key + "' needs 0 < min <= max");
  }
  if (g.count > 1 && !(g.max > g.min)) {
    config_error("'" + key + "' needs min < max for more than one point");
  }
  const std::string spacing = j.value("spacing", std::string("linear"));
  if (spacing == "linear") {
    g.spacing = Spacing::kLinear;
  } else if (spacing == "log") {
    g.spacing = Spacing::kLog;
  } else {
    config_error("'" + key + ".spacing' must be 'linear' or 'log'");
  }
  return g;
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const nlohmann::json& j) {
  using detail::config_error;
  if (!j.is_object()) config_error("scenario must be a JSON object");
  static const std::set<std::string> known{
      "space",      "weights",     "f0",           "f1",
      "lambda",     "threshold",   "stages",       "alpha_grid",
      "beta_grid",  "r_star",      "enumeration_cap", "solver",
      "zeta_search", "oracle_step", "sweep",       "description"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) config_error("unknown key '" + k + "'");
  }
  for (const char* key : {"space", "f0", "f1", "lambda", "threshold"}) {
    if (!j.contains(key)) config_error(std::string("missing '") + key + "'");
  }

  if (!j["space"].is_array() || j["space"].empty()) {
    config_error("'space' must be a nonempty array of labels");
  }
  std::vector<std::string> labels;
  for (const auto& x : j["space"]) {
    if (x.is_string()) {
      labels.push_back(x.get<std::string>());
    } else if (x.is_number_integer()) {
      labels.push_back(std::to_string(x.get<long long>()));
    } else {
      config_error("message labels must be strings or integers");
    }
    if (labels.back().find_first_of(",\"\r\n") != std::string::npos) {
      config_error("message labels may not contain commas, quotes or newlines");
    }
  }
  std::vector<double> weights;
  if (j.contains("weights")) weights = detail::number_list(j["weights"], "weights");

  try {
    auto space = std::make_shared<const MessageSpace>(labels, weights);
    const auto raw0 = detail::number_list(j["f0"], "f0");
    const auto raw1 = detail::number_list(j["f1"], "f1");
    if (raw0.size() != labels.size() || raw1.size() != labels.size()) {
      config_error("'f0' and 'f1' must have one entry per message");
    }
    ScenarioConfig c{space, normalize(raw0, space), normalize(raw1, space)};
    require_common_support(c.f0, c.f1);

    const auto& lam = j["lambda"];
    if (lam.is_string() && (lam == "inf" || lam == "infinity")) {
      c.lambda = Penalty::infinite();
    } else if (lam.is_number()) {
      c.lambda = Penalty(lam.get<double>());
    } else {
      config_error("'lambda' must be a number >= 0 or \"inf\"");
    }

    const auto& th = j["threshold"];
    if (!th.is_object()) config_error("'threshold' must be an object");
    for (const auto& [k, v] : th.items()) {
      if (k != "beta" && k != "alpha" && k != "prior0") {
        config_error("unknown key 'threshold." + k + "'");
      }
    }
    if (th.contains("beta") == th.contains("alpha")) {
      config_error("'threshold' needs exactly one of 'beta' or 'alpha'");
    }
    if (th.contains("prior0")) {
      c.prior0 = detail::positive_number(th["prior0"], "threshold.prior0");
    } else if (th.contains("alpha")) {
      config_error("'threshold.alpha' needs 'prior0'");
    }
    if (th.contains("beta")) {
      c.beta = detail::positive_number(th["beta"], "threshold.beta");
    } else {
      c.alpha = detail::positive_number(th["alpha"], "threshold.alpha");
    }
    (void)c.threshold();  // validates beta, alpha and priors

    if (j.contains("stages")) {
      if (!j["stages"].is_number_integer() || j["stages"].get<long long>() < 1) {
        config_error("'stages' must be an integer >= 1");
      }
      c.stages = j["stages"].get<std::size_t>();
    }
    if (j.contains("alpha_grid")) {
      c.alpha_grid = detail::parse_grid(j["alpha_grid"], "alpha_grid");
      if (c.alpha_grid->max > 1.0) config_error("'alpha_grid.max' must be <= 1");
    }
    if (j.contains("beta_grid")) {
      c.beta_grid = detail::parse_grid(j["beta_grid"], "beta_grid");
    }
    if (j.contains("r_star")) {
      c.r_star = detail::positive_number(j["r_star"], "r_star");
      if (c.r_star < 0.0 || c.r_star > 1.0) config_error("'r_star' must lie in [0, 1]");
    }
    if (j.contains("enumeration_cap")) {
      if (!j["enumeration_cap"].is_number_integer() ||
          j["enumeration_cap"].get<long long>() < 1) {
        config_error("'enumeration_cap' must be a positive integer");
      }
      c.enumeration_cap = j["enumeration_cap"].get<std::size_t>();
    }
    if (j.contains("solver")) {
      const auto s = j["solver"];
      if (s == "potential_minimizing") {
        c.selection = RegionSelection::kPotentialMinimizing;
      } else if (s == "kkt_threshold") {
        c.selection = RegionSelection::kKktThreshold;
      } else {
        config_error("'solver' must be 'potential_minimizing' or 'kkt_threshold'");
      }
    }
    if (j.contains("zeta_search")) {
      const auto s = j["zeta_search"];
      if (s == "assumption_bracket") {
        c.zeta_search = ZetaSearch::kAssumptionBracket;
      } else if (s == "positive_axis") {
        c.zeta_search = ZetaSearch::kPositiveAxis;
      } else {
        config_error("'zeta_search' must be 'assumption_bracket' or 'positive_axis'");
      }
    }
    if (j.contains("oracle_step")) {
      c.oracle_step = detail::positive_number(j["oracle_step"], "oracle_step");
      if (!(*c.oracle_step > 0.0 && *c.oracle_step <= 0.5)) {
        config_error("'oracle_step' must lie in (0, 0.5]");
      }
    }
    if (j.contains("sweep")) {
      const auto& sw = j["sweep"];
      if (!sw.is_object() || !sw.contains("theta0") || !sw.contains("theta1") ||
          sw.size() != 2) {
        config_error("'sweep' must hold exactly 'theta0' and 'theta1' grids");
      }
      c.sweep_theta0 = detail::parse_grid(sw["theta0"], "sweep.theta0");
      c.sweep_theta1 = detail::parse_grid(sw["theta1"], "sweep.theta1");
      for (const auto* g : {&*c.sweep_theta0, &*c.sweep_theta1}) {
        if (!(g->max < 1.0)) config_error("sweep grids must lie inside (0, 1)");
      }
    }
    return c;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfigInvalid) throw;
    config_error(std::string(to_string(e.kind())) + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    config_error(e.what());
  }
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) detail::config_error("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    detail::config_error(std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(j);
}

}  // namespace npgame
