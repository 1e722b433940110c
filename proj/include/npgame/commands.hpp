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

// Command dispatch for the npgame driver. Every table is computed before the
// first byte hits disk, so a failing command leaves the output directory as
// it found it.

#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "npgame/csv.hpp"
#include "npgame/error.hpp"
#include "npgame/neyman_pearson.hpp"
#include "npgame/oracle.hpp"
#include "npgame/passive.hpp"
#include "npgame/proactive.hpp"
#include "npgame/scenario.hpp"
#include "npgame/sequential.hpp"

namespace npgame {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

using CommandOutput = std::vector<std::pair<std::string, CsvTable>>;

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"equilibrium", "eroc", "sequential",
                                              "sweep", "oracle-check"};
  return names;
}

namespace detail {

inline std::string fmt(double x) { return format_number(x); }

inline std::string fmt(const Penalty& lambda) {
  return lambda.is_infinite() ? "inf" : format_number(lambda.value());
}

// The nominal test the detector runs when it ignores the attacker.
inline NpTest nominal_test(const ScenarioConfig& c) {
  if (c.alpha) return np_rule(c.f0, c.f1, *c.alpha);
  return lr_threshold_rule(c.f0, c.f1, *c.beta, c.r_star);
}

template <typename T>
const T& need(const std::optional<T>& v, const char* what) {
  if (!v) throw Error(ErrorKind::kConfigInvalid, std::string("missing '") + what + "'");
  return *v;
}

inline void strategy_rows(CsvTable& t, const std::string& detector,
                          const ScenarioConfig& c, const Pmf& s0, const Pmf& s1,
                          const RegionPartition& regions,
                          const DecisionRule& rule) {
  for (std::size_t m = 0; m < c.f0.size(); ++m) {
    t.add({detector, c.space->label(m), fmt(c.f0[m]), fmt(c.f1[m]), fmt(s0[m]),
           fmt(s1[m]), std::string(to_string(regions.at(m))),
           fmt(rule.accept_prob[m])});
  }
}

inline CommandOutput equilibrium_command(const ScenarioConfig& c) {
  const PassiveEquilibrium pas = passive_response(c.f0, c.f1, nominal_test(c), c.lambda);
  const EquilibriumProfile pro = proactive_equilibrium(
      c.f0, c.f1, c.threshold(), c.lambda, c.proactive_options());

  CsvTable eq{{"detector", "message", "f0", "f1", "sigma0_star", "sigma1_star",
               "region", "rule"}, {}};
  strategy_rows(eq, "passive", c, pas.sigma0_star, pas.sigma1_star, pas.regions,
                pas.rule);
  strategy_rows(eq, "proactive", c, pro.sigma0_star, pro.sigma1_star,
                pro.regions, pro.rule);

  CsvTable sc{{"detector", "zeta", "c0", "c1", "beta", "lambda", "pf", "pd",
               "pd_counterfactual"}, {}};
  sc.add({"passive", "nan", fmt(1.0), fmt(1.0 / pas.normalizer), fmt(pas.rule.tau),
          fmt(c.lambda), fmt(pas.p_f), fmt(pas.p_d),
          fmt(weighted_total(pas.rule.accept_prob, c.f1))});
  sc.add({"proactive", fmt(pro.zeta), fmt(pro.c0), fmt(pro.c1), fmt(pro.beta),
          fmt(c.lambda), fmt(pro.p_f_defacto), fmt(pro.p_d_defacto),
          fmt(pro.p_d_counterfactual)});
  return {{"equilibrium.csv", std::move(eq)}, {"scalars.csv", std::move(sc)}};
}

inline CommandOutput eroc_command(const ScenarioConfig& c) {
  const auto alphas = need(c.alpha_grid, "alpha_grid").values();
  const auto betas = need(c.beta_grid, "beta_grid").values();
  const auto nominal = roc_curve(c.f0, c.f1, alphas);
  const auto passive = passive_eroc(c.f0, c.f1, c.lambda, alphas);
  const auto proactive =
      proactive_eroc(c.f0, c.f1, c.lambda, betas, c.proactive_options());

  CsvTable t{{"detector", "param", "pf", "pd", "pd_counterfactual"}, {}};
  for (const auto& p : nominal) {
    t.add({"nonadversarial", fmt(p.alpha), fmt(p.p_f), fmt(p.p_d), fmt(p.p_d)});
  }
  for (std::size_t i = 0; i < passive.size(); ++i) {
    const auto& p = passive[i];
    t.add({"passive", fmt(p.alpha), fmt(p.p_f), fmt(p.p_d), fmt(nominal[i].p_d)});
  }
  // A beta without an equilibrium shows up as a nan row.
  for (const auto& p : proactive) {
    t.add({"proactive", fmt(p.beta), fmt(p.p_f), fmt(p.p_d),
           fmt(p.p_d_counterfactual)});
  }
  return {{"eroc.csv", std::move(t)}};
}

inline CommandOutput sequential_command(const ScenarioConfig& c) {
  std::vector<Rates> nonadv, passive;
  if (c.alpha) {
    nonadv = nonadversarial_sequential_rates(c.f0, c.f1, *c.alpha, c.stages,
                                             c.enumeration_cap);
    passive = passive_sequential_rates(c.f0, c.f1, *c.alpha, c.lambda, c.stages,
                                       c.enumeration_cap);
  } else {
    const RatioThreshold th{*c.beta, c.r_star};
    nonadv = nonadversarial_sequential_rates(c.f0, c.f1, th, c.stages,
                                             c.enumeration_cap);
    passive = passive_sequential_rates(c.f0, c.f1, th, c.lambda, c.stages,
                                       c.enumeration_cap);
  }
  SequentialOptions opt;
  opt.proactive = c.proactive_options();
  opt.enumeration_cap = c.enumeration_cap;
  const HistoryTree tree =
      forward_induction(c.f0, c.f1, c.threshold(), c.lambda, c.stages, opt);

  CsvTable t{{"stage", "detector", "pf", "pd"}, {}};
  for (std::size_t j = 1; j <= c.stages; ++j) {
    const std::string stage = std::to_string(j);
    const Rates pro = sequential_rates(tree, j);
    t.add({stage, "nonadversarial", fmt(nonadv[j - 1].p_f), fmt(nonadv[j - 1].p_d)});
    t.add({stage, "passive", fmt(passive[j - 1].p_f), fmt(passive[j - 1].p_d)});
    t.add({stage, "proactive", fmt(pro.p_f), fmt(pro.p_d)});
  }
  return {{"sequential.csv", std::move(t)}};
}

// Two-message spaces only: theta is the probability of the second message.
inline CommandOutput sweep_command(const ScenarioConfig& c) {
  if (c.space->size() != 2) {
    throw Error(ErrorKind::kConfigInvalid, "sweep needs a two-message space");
  }
  const auto th0 = need(c.sweep_theta0, "sweep").values();
  const auto th1 = need(c.sweep_theta1, "sweep").values();
  auto bernoulli = [&](double theta) {
    return normalize({(1.0 - theta) / c.space->weight(0), theta / c.space->weight(1)},
                     c.space);
  };

  CsvTable t{{"theta0", "theta1", "theta0_bar", "theta1_bar", "zeta", "c0", "c1",
              "region0", "region1", "pf", "pd", "pd_counterfactual"}, {}};
  for (double a : th0) {
    for (double b : th1) {
      const Pmf f0 = bernoulli(a);
      const Pmf f1 = bernoulli(b);
      try {
        const auto p = proactive_equilibrium(f0, f1, c.threshold(), c.lambda,
                                             c.proactive_options());
        t.add({fmt(a), fmt(b), fmt(p.sigma0_star.probability(1)),
               fmt(p.sigma1_star.probability(1)), fmt(p.zeta), fmt(p.c0),
               fmt(p.c1), std::string(to_string(p.regions.at(0))),
               std::string(to_string(p.regions.at(1))), fmt(p.p_f_defacto),
               fmt(p.p_d_defacto), fmt(p.p_d_counterfactual)});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNoRoot) throw;
        t.add({fmt(a), fmt(b), "nan", "nan", "nan", "nan", "nan", "none", "none",
               "nan", "nan", "nan"});
      }
    }
  }
  return {{"sweep.csv", std::move(t)}};
}

inline std::string joined(const Pmf& p) {
  std::string s;
  for (std::size_t m = 0; m < p.size(); ++m) {
    if (m) s += ';';
    s += format_number(p.probability(m));
  }
  return s;
}

inline CommandOutput oracle_command(const ScenarioConfig& c) {
  if (c.space->size() > kOracleMaxMessages) {
    throw Error(ErrorKind::kSpaceTooLarge,
                "oracle-check supports at most 3 messages");
  }
  const double step =
      c.oracle_step.value_or(live_messages(c.f0, c.f1).size() <= 2 ? 1e-3 : 1e-2);
  const auto pas = passive_response(c.f0, c.f1, nominal_test(c), c.lambda);
  const auto pro = proactive_equilibrium(c.f0, c.f1, c.threshold(), c.lambda,
                                         c.proactive_options());

  CsvTable t{{"detector", "objective_at_solution", "best_grid_objective",
              "improvement", "grid_step", "evaluations", "best_sigma0",
              "best_sigma1", "stationarity_residual", "slackness_residual",
              "c_relation_residual"}, {}};
  auto row = [&](const std::string& name, const OracleReport& r) {
    t.add({name, fmt(r.objective_at_solution), fmt(r.best_grid_objective),
           fmt(r.improvement), fmt(r.grid_step), std::to_string(r.evaluations),
           r.best_grid_point ? joined(r.best_grid_point->first) : "",
           r.best_grid_point ? joined(r.best_grid_point->second) : "",
           fmt(r.stationarity_residual), fmt(r.slackness_residual),
           fmt(r.c_relation_residual)});
  };
  row("passive", grid_best_response_check(pas, c.f0, c.f1, step));
  row("proactive", grid_best_response_check(pro, c.f0, c.f1, step));
  return {{"oracle.csv", std::move(t)}};
}

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNoRoot:
    case ErrorKind::kCapExceeded:
    case ErrorKind::kSpaceTooLarge:
      return kExitSolver;
    default:
      return kExitConfig;
  }
}

// Writes through temporary names and renames at the end; on failure, removes
// whatever it created.
inline void commit_files(const std::filesystem::path& dir,
                         const CommandOutput& files) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<fs::path> staged, committed;
  try {
    for (const auto& [name, table] : files) {
      const fs::path tmp = dir / (name + ".partial");
      staged.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      write_csv(out, table);
      out.close();
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
      fs::rename(staged[i], dir / files[i].first);
      committed.push_back(dir / files[i].first);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : staged) fs::remove(p, ec);
    for (const auto& p : committed) fs::remove(p, ec);
    throw;
  }
}

}  // namespace detail

inline CommandOutput compute(std::string_view command, const ScenarioConfig& c) {
  if (command == "equilibrium") return detail::equilibrium_command(c);
  if (command == "eroc") return detail::eroc_command(c);
  if (command == "sequential") return detail::sequential_command(c);
  if (command == "sweep") return detail::sweep_command(c);
  if (command == "oracle-check") return detail::oracle_command(c);
  throw Error(ErrorKind::kConfigInvalid, "unknown command '" + std::string(command) + "'");
}

// Runs one command end to end. Errors become a single stderr line of the form
// "error: <Kind>: <message>" and a nonzero exit status.
inline int run(std::string_view command, const std::filesystem::path& config,
               const std::filesystem::path& out_dir,
               std::optional<std::size_t> grid_override, std::ostream& err) {
  CommandOutput files;
  try {
    ScenarioConfig c = load_scenario(config);
    if (grid_override) {
      if (*grid_override < 1) {
        throw Error(ErrorKind::kConfigInvalid, "--grid-override must be >= 1");
      }
      c.override_grid_counts(*grid_override);
    }
    files = compute(command, c);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return detail::exit_code(e.kind());
  }
  try {
    detail::commit_files(out_dir, files);
  } catch (const std::exception& e) {
    err << "error: IoError: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace npgame
