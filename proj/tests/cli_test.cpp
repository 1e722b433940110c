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


#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "npgame/commands.hpp"

namespace npgame {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t data_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n - 1;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("npgame_cli_" + std::string(::testing::UnitTest::GetInstance()
                                            ->current_test_info()
                                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path config(const std::string& name) {
    return fs::path(NPGAME_CONFIG_DIR) / name;
  }

  fs::path write_config(const std::string& body) {
    const fs::path p = dir_ / "scenario.json";
    std::ofstream(p) << body;
    return p;
  }

  int run_cmd(const std::string& command, const fs::path& cfg, const fs::path& out,
              std::optional<std::size_t> grid = std::nullopt) {
    err_.str("");
    return run(command, cfg, out, grid, err_);
  }

  fs::path dir_;
  std::ostringstream err_;
};

TEST_F(Cli, GoldenFiles) {
  const fs::path golden(NPGAME_GOLDEN_DIR);
  ASSERT_EQ(run_cmd("sequential", config("bernoulli_repeated.json"), dir_ / "b"), 0);
  EXPECT_EQ(slurp(dir_ / "b" / "sequential.csv"), slurp(golden / "bernoulli_repeated_sequential.csv"));
  ASSERT_EQ(run_cmd("eroc", config("bernoulli_eroc.json"), dir_ / "a", 5), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "eroc.csv"), slurp(golden / "bernoulli_eroc_n5.csv"));
  ASSERT_EQ(run_cmd("equilibrium", config("bernoulli_sweep.json"), dir_ / "c"), 0);
  EXPECT_EQ(slurp(dir_ / "c" / "equilibrium.csv"), slurp(golden / "bernoulli_sweep_equilibrium.csv"));
  EXPECT_EQ(slurp(dir_ / "c" / "scalars.csv"), slurp(golden / "bernoulli_sweep_scalars.csv"));
  ASSERT_EQ(run_cmd("sweep", config("bernoulli_sweep.json"), dir_ / "d", 3), 0);
  EXPECT_EQ(slurp(dir_ / "d" / "sweep.csv"), slurp(golden / "bernoulli_sweep_n3.csv"));
}

TEST_F(Cli, SchemasAndRowCounts) {
  ASSERT_EQ(run_cmd("eroc", config("bernoulli_eroc.json"), dir_), 0);
  EXPECT_EQ(first_line(dir_ / "eroc.csv"), "detector,param,pf,pd,pd_counterfactual");
  EXPECT_EQ(data_rows(dir_ / "eroc.csv"), 150u);
  ASSERT_EQ(run_cmd("sequential", config("bernoulli_repeated.json"), dir_), 0);
  EXPECT_EQ(first_line(dir_ / "sequential.csv"), "stage,detector,pf,pd");
  EXPECT_EQ(data_rows(dir_ / "sequential.csv"), 45u);
  ASSERT_EQ(run_cmd("equilibrium", config("bernoulli_repeated.json"), dir_), 0);
  EXPECT_EQ(first_line(dir_ / "equilibrium.csv"),
            "detector,message,f0,f1,sigma0_star,sigma1_star,region,rule");
  EXPECT_EQ(first_line(dir_ / "scalars.csv"),
            "detector,zeta,c0,c1,beta,lambda,pf,pd,pd_counterfactual");
  ASSERT_EQ(run_cmd("oracle-check", config("bernoulli_repeated.json"), dir_), 0);
  EXPECT_EQ(data_rows(dir_ / "oracle.csv"), 2u);
  ASSERT_EQ(run_cmd("sweep", config("bernoulli_sweep.json"), dir_), 0);
  EXPECT_EQ(data_rows(dir_ / "sweep.csv"), 19u * 19u);
}

TEST_F(Cli, Deterministic) {
  for (const auto& [cmd, cfg, file] :
       {std::tuple{"eroc", "bernoulli_eroc.json", "eroc.csv"},
        std::tuple{"sequential", "bernoulli_repeated.json", "sequential.csv"},
        std::tuple{"sweep", "bernoulli_sweep.json", "sweep.csv"}}) {
    ASSERT_EQ(run_cmd(cmd, config(cfg), dir_ / "1"), 0);
    ASSERT_EQ(run_cmd(cmd, config(cfg), dir_ / "2"), 0);
    EXPECT_EQ(slurp(dir_ / "1" / file), slurp(dir_ / "2" / file)) << cmd;
  }
}

TEST_F(Cli, MalformedConfigWritesNothing) {
  const auto cfg = write_config(R"({"space": ["0", "1"], "f0": [0.2, 0.3, 0.5],
      "f1": [0.3, 0.7], "lambda": 0.75, "threshold": {"beta": 0.9}})");
  const fs::path out = dir_ / "out";
  EXPECT_EQ(run_cmd("equilibrium", cfg, out), kExitConfig);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(err_.str().rfind("error: ConfigInvalid: ", 0), 0u) << err_.str();
}

TEST_F(Cli, ConfigErrors) {
  const char* bad[] = {
      R"({"space": ["0", "1"], "f0": [0.7, 0.3], "f1": [0.3, 0.7], "lambda": 0.75})",
      R"({"space": ["0", "1"], "f0": [0.7, 0.3], "f1": [0.3, 0.7], "lambda": 0.75,
          "threshold": {"beta": 0.9}, "stagez": 3})",
      R"({"space": ["0", "1"], "f0": [0.7, 0.3], "f1": [0.3, 0.7], "lambda": -1,
          "threshold": {"beta": 0.9}})",
      R"({"space": ["0", "1"], "f0": [0.7, 0.3], "f1": [0.0, 1.0], "lambda": 1,
          "threshold": {"beta": 0.9}})",
      R"({"space": ["0", "1"], "f0": [0.7, 0.3], "f1": [0.3, 0.7], "lambda": 1,
          "threshold": {"alpha": 0.3}})",
      R"({"space": ["0", "1"], "f0": [0.7, 0.3], "f1": [0.3, 0.7], "lambda": 1,
          "threshold": {"beta": 0.9}, "beta_grid": {"count": 3, "min": 2, "max": 1}})",
      R"({"space": ["0", "1"])",
  };
  for (const char* body : bad) {
    EXPECT_EQ(run_cmd("equilibrium", write_config(body), dir_ / "out"), kExitConfig)
        << body;
    EXPECT_FALSE(fs::exists(dir_ / "out"));
  }
  // The eroc command needs its grids.
  EXPECT_EQ(run_cmd("eroc", config("bernoulli_repeated.json"), dir_ / "out"), kExitConfig);
}

TEST_F(Cli, SolverErrorsExitWithThree) {
  const auto nr = write_config(R"({"space": ["0", "1"], "f0": [0.7, 0.3],
      "f1": [0.3, 0.7], "lambda": 0.75, "threshold": {"beta": 0.9},
      "solver": "kkt_threshold"})");
  EXPECT_EQ(run_cmd("equilibrium", nr, dir_ / "out"), kExitSolver);
  EXPECT_EQ(err_.str().rfind("error: NoRoot: ", 0), 0u) << err_.str();

  const auto cap = write_config(R"({"space": ["0", "1"], "f0": [0.7, 0.3],
      "f1": [0.3, 0.7], "lambda": 0.75, "threshold": {"beta": 0.9},
      "stages": 12, "enumeration_cap": 1000})");
  EXPECT_EQ(run_cmd("sequential", cap, dir_ / "out"), kExitSolver);
  EXPECT_EQ(err_.str().rfind("error: CapExceeded: ", 0), 0u) << err_.str();

  const auto big = write_config(R"({"space": ["a", "b", "c", "d"],
      "f0": [1, 2, 3, 4], "f1": [4, 3, 2, 1], "lambda": 1,
      "threshold": {"beta": 1.5}})");
  EXPECT_EQ(run_cmd("oracle-check", big, dir_ / "out"), kExitSolver);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(Cli, FailureLeavesExistingFilesAlone) {
  const fs::path out = dir_ / "out";
  fs::create_directories(out);
  std::ofstream(out / "sequential.csv") << "keep\n";
  const auto cap = write_config(R"({"space": ["0", "1"], "f0": [0.7, 0.3],
      "f1": [0.3, 0.7], "lambda": 0.75, "threshold": {"beta": 0.9},
      "stages": 12, "enumeration_cap": 1000})");
  EXPECT_EQ(run_cmd("sequential", cap, out), kExitSolver);
  EXPECT_EQ(slurp(out / "sequential.csv"), "keep\n");
  EXPECT_EQ(std::distance(fs::directory_iterator(out), fs::directory_iterator()), 1);
}

TEST_F(Cli, GridOverride) {
  ASSERT_EQ(run_cmd("eroc", config("bernoulli_eroc.json"), dir_, 7), 0);
  EXPECT_EQ(data_rows(dir_ / "eroc.csv"), 21u);
}

TEST_F(Cli, SizeFormThreshold) {
  const auto cfg = write_config(R"({"space": ["lo", "hi"], "f0": [0.7, 0.3],
      "f1": [0.3, 0.7], "lambda": 0.75,
      "threshold": {"alpha": 0.3, "prior0": 0.5}, "stages": 4})");
  ASSERT_EQ(run_cmd("sequential", cfg, dir_), 0);
  std::ifstream in(dir_ / "sequential.csv");
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.find("nonadversarial") != std::string::npos) {
      EXPECT_NE(line.find(",0.3,"), std::string::npos) << line;
    }
  }
}

int run_binary(const std::string& args) {
  const int status = std::system((std::string(NPGAME_CLI) + " " + args).c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(Cli, BinaryExitCodes) {
  const std::string out = (dir_ / "bin").string();
  EXPECT_EQ(run_binary("equilibrium --config " + config("bernoulli_repeated.json").string() +
                       " --out " + out),
            0);
  EXPECT_TRUE(fs::exists(dir_ / "bin" / "scalars.csv"));
  EXPECT_EQ(run_binary("equilibrium --config /nonexistent.json --out " + out +
                       " 2>/dev/null"),
            2);
  EXPECT_EQ(run_binary("frobnicate --config x --out y 2>/dev/null"), 2);
  EXPECT_EQ(run_binary("eroc --config " + config("bernoulli_eroc.json").string() + " --out " +
                       out + " --grid-override 0 2>/dev/null"),
            2);
}

}  // namespace
}  // namespace npgame
