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

#ifndef GGT_SAMPLE_FORGE_H_
#define GGT_SAMPLE_FORGE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ggt/masked_net.h"
#include "ggt/model_spec.h"

namespace ggt {

inline constexpr double kDefaultFgsmEpsilon = 0.03;
inline constexpr double kDefaultHighConfidence = 0.9;

struct DatasetOptions {
  // Contrast of the class prototype against the 0.5 background.
  double separation = 0.6;
  // Per-pixel Gaussian noise standard deviation.
  double noise = 0.15;
  // Each sample blends in a random other class's prototype with weight
  // drawn from U(0, max_blend); keeps a population of near-boundary inputs.
  double max_blend = 0.35;
};

struct DatasetSplits {
  LabeledSet train;
  LabeledSet validation;
  LabeledSet test;
};

// Procedural class-conditional images (oriented gratings plus blobs, with
// noise), shuffled and split 70/15/15. Pure function of its arguments.
DatasetSplits MakeDataset(int classes, int per_class, Shape3 shape, uint64_t seed,
                          const DatasetOptions& options = {});

// Seeded shuffle of `all` split 70/15/15.
DatasetSplits SplitDataset(const LabeledSet& all, uint64_t seed);

// Rows of "label,v0,v1,...", values already in [0,1].
LabeledSet LoadCsvSet(const std::filesystem::path& path, Shape3 shape);

enum class SampleKind { kNormal, kWrongLabel, kFgsm };

std::string SampleKindName(SampleKind kind);
SampleKind SampleKindFromName(const std::string& name);

struct LabeledSample {
  std::vector<float> x;
  int y_true = 0;
  SampleKind kind = SampleKind::kNormal;
  // Original model's probability of its predicted label on x.
  float confidence = 0.0f;
  int64_t source_index = -1;
};

// x' = clip(x + eps * sign(grad_x J(x, y)), 0, 1). Returns nullopt (not
// fooled) when the original's label is unchanged. Requires the original to
// classify the source correctly.
std::optional<LabeledSample> Fgsm(const MaskedModel& original, const LabeledSample& source,
                                  double epsilon);

// Clean samples the original model classifies correctly.
std::vector<LabeledSample> HarvestNormals(const MaskedModel& original, const LabeledSet& set);
// Clean samples the original model misclassifies; no perturbation.
std::vector<LabeledSample> HarvestWrongLabels(const MaskedModel& original, const LabeledSet& set);
// FGSM over every correctly classified sample; failures are dropped.
std::vector<LabeledSample> GenerateFgsm(const MaskedModel& original, const LabeledSet& set,
                                        double epsilon, int threads = 0);

struct SubsetResult {
  std::vector<LabeledSample> samples;
  bool insufficient = false;
};

// Samples with confidence > tau, in input order, truncated to `count`.
SubsetResult HighConfidenceSubset(const std::vector<LabeledSample>& samples, double tau,
                                  size_t count);

struct Corpus {
  Shape3 shape;
  std::vector<LabeledSample> samples;
};

// "GGTS", u32 version, u64 index length, JSON index, then little-endian
// float32 inputs in index order.
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus LoadCorpus(const std::filesystem::path& path);

}  // namespace ggt

#endif  // GGT_SAMPLE_FORGE_H_
