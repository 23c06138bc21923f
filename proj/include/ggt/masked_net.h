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

#ifndef GGT_MASKED_NET_H_
#define GGT_MASKED_NET_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ggt/graph.h"
#include "ggt/graph_mapping.h"
#include "ggt/model_spec.h"
#include "ggt/network.h"

namespace ggt {

// Row-major batch of inputs with integer labels.
struct LabeledSet {
  Shape3 shape;
  std::vector<float> inputs;
  std::vector<int> labels;

  size_t size() const { return labels.size(); }
  std::span<const float> Input(size_t i) const {
    return {inputs.data() + i * shape.size(), shape.size()};
  }
  void Append(std::span<const float> x, int label);
};

struct TrainingMeta {
  int epochs = 0;
  uint64_t seed = 0;
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;
};

struct TrainHyper {
  int epochs = 30;
  double learning_rate = 0.05;
  int batch_size = 32;
  uint64_t seed = 0;
};

// A classifier whose maskable layers are optionally gated by a MaskPlan.
// Without a plan it is the original (unpruned) model.
class MaskedModel {
 public:
  MaskedModel() = default;
  static MaskedModel Create(ModelSpec spec, uint64_t init_seed);
  // Copies `original`'s weights and applies the plan (warm start).
  static MaskedModel Pruned(const MaskedModel& original, MaskPlan plan);

  const ModelSpec& spec() const { return net_.spec(); }
  const Network<float>& network() const { return net_; }
  Network<float>& mutable_network() { return net_; }
  const std::optional<MaskPlan>& plan() const { return plan_; }
  const TrainingMeta& meta() const { return meta_; }
  TrainingMeta& mutable_meta() { return meta_; }

  // Class probabilities; throws kShapeMismatch or kNonFinite.
  std::vector<float> Forward(std::span<const float> x) const;
  // Argmax of Forward, lowest index on ties.
  int PredictLabel(std::span<const float> x) const;
  // d(cross-entropy)/dx for `target_label`.
  std::vector<float> GradInput(std::span<const float> x, int target_label) const;

  // True iff every masked weight is exactly zero.
  bool MaskedWeightsAreZero() const;

 private:
  Network<float> net_;
  std::optional<MaskPlan> plan_;
  TrainingMeta meta_;
};

int ArgMax(std::span<const float> values);

// Batch inference helpers; reuse one Evaluator snapshot.
std::vector<int> PredictLabels(const MaskedModel& model, const LabeledSet& data);
double Accuracy(const MaskedModel& model, const LabeledSet& data);

using EpochCallback = std::function<void(int epoch, const MaskedModel& model)>;

// Mini-batch SGD on softmax cross-entropy; masked weights are re-zeroed after
// every update. Deterministic in hyper.seed. Throws kDivergenceDetected when
// the loss stops being finite.
MaskedModel Train(MaskedModel model, const LabeledSet& train, const LabeledSet* validation,
                  const TrainHyper& hyper, const EpochCallback& on_epoch = {});

struct GraphEntry {
  RelationalGraph graph;
  GraphRef ref;
};

struct EnsembleResult {
  std::vector<MaskedModel> models;
  std::vector<size_t> accepted;  // index into the graph list per model
  std::vector<size_t> rejected;
  std::vector<double> validation_accuracy;  // per graph; NaN if never trained
  double bar = 0.0;
};

struct EnsembleOptions {
  double accept_ratio = 0.9;
  size_t min_models = 1;
  // Stop once this many models are accepted (0: train every graph). Graphs
  // are trained in index order, so the kept models do not depend on threads.
  size_t target_size = 0;
  int threads = 0;
};

// One pruned model per graph: plan masks, warm-start from `original`,
// retrain, keep it iff validation accuracy >= accept_ratio * original's.
// Throws kEnsembleTooSmall when fewer than min_models survive.
EnsembleResult BuildPrunedEnsemble(const MaskedModel& original,
                                   const std::vector<GraphEntry>& graphs,
                                   const LabeledSet& train, const LabeledSet& validation,
                                   const TrainHyper& hyper, const EnsembleOptions& options);

// Multiply-accumulates of one forward pass, counting only retained weights.
uint64_t RetainedMacs(const MaskedModel& model);

// Binary model file: "GGTM", u32 version, u64 JSON length, JSON header,
// little-endian float32 tensors in layer order (weights then bias), then
// u32 length + mask-plan hash (empty for an unpruned model).
void SaveModel(const MaskedModel& model, const std::filesystem::path& path,
               const std::string& plan_file = "");
// Resolves the plan file relative to the model's directory and verifies its hash.
MaskedModel LoadModel(const std::filesystem::path& path);

}  // namespace ggt

#endif  // GGT_MASKED_NET_H_
