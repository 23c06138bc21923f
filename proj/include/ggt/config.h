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

#ifndef GGT_CONFIG_H_
#define GGT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ggt/aspl_regulator.h"
#include "ggt/detector.h"
#include "ggt/model_spec.h"
#include "ggt/sample_forge.h"

namespace ggt {

struct DatasetConfig {
  int classes = 4;
  int per_class = 500;
  Shape3 shape{1, 10, 10};
  double separation = 0.5;
  double noise = 0.18;
  double max_blend = 0.4;
  // When set, samples come from this "label,v0,v1,..." file instead of the
  // procedural generator (still split 70/15/15 by the seed).
  std::string csv;
};

struct GraphConfig {
  int nodes = 64;
  int degree = 3;
  std::vector<AsplTarget> bins;
  int per_bin = 24;
  int max_tries = kDefaultGenerationTries;
  int restart_factor = kDefaultRestartFactor;
};

struct TrainingConfig {
  int width = 64;
  int epochs = 30;
  int pruned_epochs = 15;
  double learning_rate = 0.05;
  int batch_size = 32;
  double accept_ratio = 0.9;
};

struct EnsembleConfig {
  int size = 16;
  // Index into GraphConfig::bins of the bin the pruned models come from.
  int bin = 0;
  // Fewer accepted models than this is an error; 0 means `size`.
  int min_size = 0;
};

struct AttackConfig {
  double epsilon = kDefaultFgsmEpsilon;
  double tau = kDefaultHighConfidence;
  int high_confidence_count = 500;
};

struct DetectorConfig {
  double alpha = kDefaultSprtAlpha;
  double beta = kDefaultSprtBeta;
  double relax_fraction = kDefaultRelaxFraction;
  int max_models = kDefaultMaxModels;
  CalibrationMode mode = CalibrationMode::kYouden;
  double quantile = 0.95;
};

struct ExperimentConfig {
  std::string profile = "smoke";
  uint64_t seed = 1;
  std::string out = "ggt_out";
  DatasetConfig dataset;
  GraphConfig graphs;
  TrainingConfig training;
  EnsembleConfig ensemble;
  AttackConfig attack;
  DetectorConfig detector;

  // Throws kConfig naming the offending field.
  void Validate() const;
  ModelSpec Model() const;
  CalibrationOptions Calibration() const;
  size_t MinEnsemble() const;
};

ExperimentConfig SmokeProfile();
ExperimentConfig PaperScaleProfile();
ExperimentConfig ProfileByName(const std::string& name);

nlohmann::json ConfigToJson(const ExperimentConfig& c);
// Fields missing from `j` keep their values from `base`.
ExperimentConfig ConfigFromJson(const nlohmann::json& j, const ExperimentConfig& base);

struct ConfigOverrides {
  std::string config_file;
  std::string profile;
  std::optional<uint64_t> seed;
  std::string out;
};

// Base profile (--profile, else the file's "profile" key, else smoke), then
// the file's fields, then --seed / --out; validated.
ExperimentConfig ResolveConfig(const ConfigOverrides& o);

}  // namespace ggt

#endif  // GGT_CONFIG_H_
