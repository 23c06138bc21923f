// Copyright 2026 The GGT Authors.
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

// ggt: graph-guided adversarial sample detection, one subcommand per stage.
//
//   ggt reproduce --profile smoke --out runs/smoke
//   ggt report --out runs/smoke

#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "ggt/config.h"
#include "ggt/error.h"
#include "ggt/pipeline.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitEnsemble = 4;
constexpr int kExitIo = 5;

int ExitCodeFor(ggt::ErrorKind kind) {
  switch (kind) {
    case ggt::ErrorKind::kConfig:
      return kExitConfig;
    case ggt::ErrorKind::kInfeasibleDegree:
    case ggt::ErrorKind::kGenerationExhausted:
    case ggt::ErrorKind::kRegulationExhausted:
      return kExitInfeasible;
    case ggt::ErrorKind::kEnsembleTooSmall:
      return kExitEnsemble;
    case ggt::ErrorKind::kIo:
    case ggt::ErrorKind::kFormat:
      return kExitIo;
    default:
      return kExitOther;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-guided testing: pruned-model ensembles for adversarial sample detection"};
  app.require_subcommand(1);

  ggt::ConfigOverrides overrides;
  uint64_t seed = 0;
  std::map<std::string, std::function<void(const ggt::ExperimentConfig&)>> actions = {
      {"graphs", [](const auto& c) { ggt::CmdGraphs(c); }},
      {"train", [](const auto& c) { ggt::CmdTrain(c); }},
      {"attack", [](const auto& c) { ggt::CmdAttack(c); }},
      {"calibrate", [](const auto& c) { ggt::CmdCalibrate(c); }},
      {"detect", [](const auto& c) { std::cout << ggt::RenderReportText(ggt::CmdDetect(c)); }},
      {"reproduce",
       [](const auto& c) { std::cout << ggt::RenderReportText(ggt::CmdReproduce(c)); }},
      {"report", [](const auto& c) { std::cout << ggt::CmdReport(c); }},
  };
  const std::map<std::string, std::string> help = {
      {"graphs", "generate ASPL-binned k-regular relational graphs"},
      {"train", "train the original model and the pruned ensemble"},
      {"attack", "build the normal / WL / FGSM sample corpora"},
      {"calibrate", "choose the LCR threshold on the calibration corpus"},
      {"detect", "run SPRT detection on the test corpus and write the report"},
      {"reproduce", "run every stage in order"},
      {"report", "print the stored report as a table"},
  };
  std::map<std::string, CLI::Option*> seed_opts;
  for (const auto& [name, text] : help) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->add_option("--config", overrides.config_file, "experiment config JSON");
    sub->add_option("--profile", overrides.profile, "base profile")
        ->check(CLI::IsMember({"smoke", "paper-scale"}));
    seed_opts[name] = sub->add_option("--seed", seed, "experiment seed");
    sub->add_option("--out", overrides.out, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    for (const auto& [name, action] : actions) {
      CLI::App* sub = app.get_subcommand(name);
      if (!sub->parsed()) continue;
      if (seed_opts[name]->count() > 0) overrides.seed = seed;
      action(ggt::ResolveConfig(overrides));
    }
  } catch (const ggt::Error& e) {
    std::cerr << "ggt: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ggt: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOk;
}
