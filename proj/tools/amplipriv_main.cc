//
// Copyright 2026 The Amplipriv Authors
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
//

// amplipriv: runs scenario files through the calibration, amplification,
// audit and simulation pipeline and writes machine-readable reports.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "amplipriv/scenario.h"

namespace {

struct Options {
  std::string scenario;
  std::string out;
  std::optional<uint64_t> seed;
  std::string format = "json";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Differentially private queries over incomplete data, with the privacy "
      "amplification granted by MCAR/MAR missingness and audits of it.\n"
      "Exit status: 0 success, 1 error, 2 audit FAIL."};
  app.require_subcommand(1);

  const struct {
    const char* name;
    const char* help;
  } kSubcommands[] = {
      {"calibrate", "Calibrate the noise scale for the scenario's query."},
      {"amplify", "Report the amplified (eps, delta) for the missingness."},
      {"audit", "Measure the composed divergence against the accountant."},
      {"simulate", "Draw one release of the composed mechanism."},
      {"counterexample", "Evaluate the p* = 1 construction with no gain."},
      {"report", "Run every step the scenario declares."},
  };

  Options options;
  for (const auto& sub : kSubcommands) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    cmd->add_option("scenario", options.scenario, "Scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", options.out, "Directory for the report files");
    cmd->add_option("--seed", options.seed, "Override the scenario seed");
    cmd->add_option("--format", options.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::string command = app.get_subcommands().front()->get_name();
  amplipriv::RunOverrides overrides;
  overrides.seed = options.seed;
  if (!options.out.empty()) overrides.out = options.out;
  overrides.format = options.format;

  amplipriv::RunResult result =
      amplipriv::RunCommand(command, options.scenario, overrides);
  std::ostream& stream = result.exit_code == 1 ? std::cerr : std::cout;
  if (!result.summary.empty()) stream << result.summary << "\n";
  for (const std::string& file : result.files) {
    std::cout << "wrote " << file << "\n";
  }
  return result.exit_code;
}
