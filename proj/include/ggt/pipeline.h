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

#ifndef GGT_PIPELINE_H_
#define GGT_PIPELINE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "ggt/config.h"
#include "ggt/detector.h"
#include "ggt/masked_net.h"
#include "ggt/metrics.h"
#include "ggt/sample_forge.h"

namespace ggt {

// File layout under the experiment output directory.
struct StagePaths {
  explicit StagePaths(const std::filesystem::path& out);

  std::filesystem::path root;
  std::filesystem::path config;             // config.resolved.json
  std::filesystem::path graphs_dir;         // graphs/
  std::filesystem::path graph_manifest;     // graphs/manifest.json
  std::filesystem::path models_dir;         // models/
  std::filesystem::path original_model;     // models/original.ggtm
  std::filesystem::path ensemble_manifest;  // models/ensemble.json
  std::filesystem::path calibration_corpus; // corpus/calibration.ggts
  std::filesystem::path test_corpus;        // corpus/test.ggts
  std::filesystem::path calibration_labels; // labels/calibration.csv
  std::filesystem::path test_labels;        // labels/test.csv
  std::filesystem::path calibration;        // calibration.json
  std::filesystem::path report_json;        // report.json
  std::filesystem::path report_text;        // report.txt
};

// Per-stage seeds, all derived from the experiment seed.
struct StageSeeds {
  explicit StageSeeds(uint64_t seed);
  uint64_t data, init, graphs, train, pruned, order;
};

DatasetSplits LoadExperimentData(const ExperimentConfig& c);

// Pruned models in SPRT order plus their provenance.
struct LoadedEnsemble {
  std::vector<MaskedModel> models;
  std::vector<std::string> graph_files;
  std::vector<std::string> graph_hashes;
};
LoadedEnsemble LoadEnsemble(const ExperimentConfig& c);

DetectorCalibration LoadCalibration(const std::filesystem::path& path);

void CmdGraphs(const ExperimentConfig& c);
void CmdTrain(const ExperimentConfig& c);
void CmdAttack(const ExperimentConfig& c);
DetectorCalibration CmdCalibrate(const ExperimentConfig& c);
EvaluationReport CmdDetect(const ExperimentConfig& c);
EvaluationReport CmdReproduce(const ExperimentConfig& c);
// Text table of the stored report.
std::string CmdReport(const ExperimentConfig& c);

}  // namespace ggt

#endif  // GGT_PIPELINE_H_
