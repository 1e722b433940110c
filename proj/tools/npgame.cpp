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


#include <cstddef>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "npgame/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium detectors for adversarial hypothesis testing"};
  app.require_subcommand(1);

  std::string config, out;
  std::size_t grid = 0;
  for (const auto& name : npgame::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON scenario file")->required();
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--grid-override", grid, "point count for every grid")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: Usage: " << e.what() << '\n';
    return npgame::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<std::size_t> override;
  if (grid > 0) override = grid;
  return npgame::run(command, config, out, override, std::cerr);
}
