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

#include "ggt/masked_net.h"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>

#include "ggt/error.h"
#include "ggt/io.h"
#include "ggt/parallel.h"
#include "ggt/rng.h"

namespace ggt {

template class Network<float>;
template class Network<double>;
template class Evaluator<float>;
template class Evaluator<double>;

namespace {

using json = nlohmann::json;

constexpr char kModelMagic[4] = {'G', 'G', 'T', 'M'};
constexpr uint32_t kModelVersion = 1;

}  // namespace

void LabeledSet::Append(std::span<const float> x, int label) {
  Require(x.size() == shape.size(), ErrorKind::kShapeMismatch, "sample does not match set shape");
  inputs.insert(inputs.end(), x.begin(), x.end());
  labels.push_back(label);
}

MaskedModel MaskedModel::Create(ModelSpec spec, uint64_t init_seed) {
  MaskedModel m;
  m.net_ = Network<float>(std::move(spec));
  m.net_.InitFanInUniform(init_seed);
  m.meta_.seed = init_seed;
  return m;
}

MaskedModel MaskedModel::Pruned(const MaskedModel& original, MaskPlan plan) {
  MaskedModel m;
  m.net_ = original.net_;
  m.net_.ApplyMasks(plan);
  m.plan_ = std::move(plan);
  m.meta_ = {};
  return m;
}

std::vector<float> MaskedModel::Forward(std::span<const float> x) const {
  return Evaluator<float>(net_).Probabilities(x);
}

int ArgMax(std::span<const float> values) {
  int best = 0;
  for (size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[best]) best = static_cast<int>(k);
  return best;
}

int MaskedModel::PredictLabel(std::span<const float> x) const { return ArgMax(Forward(x)); }

std::vector<float> MaskedModel::GradInput(std::span<const float> x, int target_label) const {
  Evaluator<float> ev(net_);
  Activations<float> acts;
  ev.Forward(x, acts);
  auto grads = ev.ZeroGradients(/*want_input=*/true, /*want_weights=*/false);
  ev.Backward(acts, target_label, grads);
  for (float g : grads.input)
    if (!std::isfinite(g)) Fail(ErrorKind::kNonFinite, "non-finite input gradient");
  return std::move(grads.input);
}

bool MaskedModel::MaskedWeightsAreZero() const {
  for (const auto& p : net_.params()) {
    for (size_t k = 0; k < p.mask.size(); ++k)
      if (!p.mask[k] && p.weights[k] != 0.0f) return false;
  }
  return true;
}

std::vector<int> PredictLabels(const MaskedModel& model, const LabeledSet& data) {
  Evaluator<float> ev(model.network());
  Activations<float> acts;
  std::vector<int> out(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    ev.Forward(data.Input(i), acts);
    out[i] = ArgMax(acts.probabilities);
  }
  return out;
}

double Accuracy(const MaskedModel& model, const LabeledSet& data) {
  if (data.size() == 0) return 0.0;
  const auto pred = PredictLabels(model, data);
  size_t hits = 0;
  for (size_t i = 0; i < pred.size(); ++i) hits += pred[i] == data.labels[i];
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

MaskedModel Train(MaskedModel model, const LabeledSet& train, const LabeledSet* validation,
                  const TrainHyper& hyper, const EpochCallback& on_epoch) {
  Require(train.size() > 0, ErrorKind::kInvalidArgument, "training set is empty");
  Require(train.shape == model.spec().input, ErrorKind::kShapeMismatch,
          "training data shape differs from model input");
  Require(hyper.epochs >= 0 && hyper.batch_size >= 1 && hyper.learning_rate > 0.0,
          ErrorKind::kInvalidArgument, "invalid training hyperparameters");
  for (int y : train.labels)
    Require(y >= 0 && y < model.spec().class_count, ErrorKind::kInvalidArgument,
            "label out of range");

  Network<float>& net = model.mutable_network();
  net.ZeroMaskedWeights();
  Rng rng(hyper.seed);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  Activations<float> acts;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.Shuffle(std::span<size_t>(order));
    for (size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const size_t end = std::min(order.size(), start + hyper.batch_size);
      Evaluator<float> ev(net);
      auto grads = ev.ZeroGradients(/*want_input=*/false, /*want_weights=*/true);
      for (size_t b = start; b < end; ++b) {
        const size_t idx = order[b];
        float loss;
        try {
          ev.Forward(train.Input(idx), acts);
          loss = ev.Backward(acts, train.labels[idx], grads);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kNonFinite) throw;
          Fail(ErrorKind::kDivergenceDetected, "epoch " + std::to_string(epoch) + ": " + e.what());
        }
        if (!std::isfinite(loss))
          Fail(ErrorKind::kDivergenceDetected, "non-finite loss at epoch " + std::to_string(epoch));
      }
      ev.MaskGradients(grads);
      const float step = static_cast<float>(hyper.learning_rate / static_cast<double>(end - start));
      for (size_t i = 0; i < net.params().size(); ++i) {
        auto& p = net.params()[i];
        for (size_t k = 0; k < p.weights.size(); ++k) p.weights[k] -= step * grads.weights[i][k];
        for (size_t k = 0; k < p.bias.size(); ++k) p.bias[k] -= step * grads.bias[i][k];
      }
      net.ZeroMaskedWeights();
    }
    if (on_epoch) on_epoch(epoch, model);
  }

  TrainingMeta& meta = model.mutable_meta();
  meta.epochs = hyper.epochs;
  meta.seed = hyper.seed;
  meta.train_accuracy = Accuracy(model, train);
  meta.validation_accuracy = validation ? Accuracy(model, *validation) : 0.0;
  return model;
}

EnsembleResult BuildPrunedEnsemble(const MaskedModel& original,
                                   const std::vector<GraphEntry>& graphs,
                                   const LabeledSet& train, const LabeledSet& validation,
                                   const TrainHyper& hyper, const EnsembleOptions& options) {
  Require(options.accept_ratio > 0.0, ErrorKind::kInvalidArgument, "accept ratio must be > 0");
  EnsembleResult result;
  result.bar = options.accept_ratio * Accuracy(original, validation);
  result.validation_accuracy.assign(graphs.size(), std::numeric_limits<double>::quiet_NaN());
  const size_t target = options.target_size ? options.target_size : graphs.size();
  const size_t threads = static_cast<size_t>(
      options.threads > 0 ? options.threads : DefaultThreadCount());
  size_t next = 0;
  while (next < graphs.size() && result.models.size() < target) {
    const size_t wave = std::min(graphs.size() - next,
                                 std::max(threads, target - result.models.size()));
    std::vector<MaskedModel> trained(wave);
    ParallelFor(wave, options.threads, [&](size_t w) {
      const size_t g = next + w;
      MaskPlan plan = PlanForModel(original.spec(), graphs[g].graph, graphs[g].ref);
      TrainHyper h = hyper;
      h.seed = DeriveSeed(hyper.seed, {g});
      trained[w] = Train(MaskedModel::Pruned(original, std::move(plan)), train, &validation, h);
      result.validation_accuracy[g] = trained[w].meta().validation_accuracy;
    });
    for (size_t w = 0; w < wave; ++w) {
      const size_t g = next + w;
      if (result.validation_accuracy[g] >= result.bar && result.models.size() < target) {
        result.accepted.push_back(g);
        result.models.push_back(std::move(trained[w]));
      } else if (result.validation_accuracy[g] < result.bar) {
        result.rejected.push_back(g);
      }
    }
    next += wave;
  }
  Require(result.models.size() >= options.min_models, ErrorKind::kEnsembleTooSmall,
          std::to_string(result.models.size()) + " of " + std::to_string(graphs.size()) +
              " pruned models reached validation accuracy " + std::to_string(result.bar) +
              "; need " + std::to_string(options.min_models));
  return result;
}

uint64_t RetainedMacs(const MaskedModel& model) {
  const ModelSpec& spec = model.spec();
  const auto shapes = spec.Shapes();
  uint64_t total = 0;
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    if (!spec.layers[i].parametric()) continue;
    const auto& p = model.network().params()[i];
    const uint64_t retained =
        p.mask.empty() ? p.weights.size()
                       : static_cast<uint64_t>(std::count(p.mask.begin(), p.mask.end(), 1));
    const uint64_t positions = spec.layers[i].kind == LayerKind::kConv
                                   ? static_cast<uint64_t>(shapes[i + 1].height) * shapes[i + 1].width
                                   : 1;
    total += retained * positions;
  }
  return total;
}

void SaveModel(const MaskedModel& model, const std::filesystem::path& path,
               const std::string& plan_file) {
  Require(!model.plan() || !plan_file.empty(), ErrorKind::kInvalidArgument,
          "pruned model needs a mask plan file name");
  const TrainingMeta& m = model.meta();
  json header = {
      {"spec", model.spec()},
      {"meta",
       {{"epochs", m.epochs},
        {"seed", m.seed},
        {"train_accuracy", m.train_accuracy},
        {"validation_accuracy", m.validation_accuracy}}},
      {"plan_file", model.plan() ? plan_file : ""},
  };
  const std::string hj = header.dump();
  ByteWriter w;
  w.Bytes(std::string_view(kModelMagic, 4));
  w.U32(kModelVersion);
  w.U64(hj.size());
  w.Bytes(hj);
  for (const auto& p : model.network().params()) {
    w.F32s(p.weights);
    w.F32s(p.bias);
  }
  const std::string hash = model.plan() ? MaskPlanHash(*model.plan()) : "";
  w.U32(static_cast<uint32_t>(hash.size()));
  w.Bytes(hash);
  WriteFile(path, w.str());
}

MaskedModel LoadModel(const std::filesystem::path& path) {
  const std::string data = ReadFile(path);
  ByteReader r(data, path.string());
  Require(r.Bytes(4) == std::string_view(kModelMagic, 4), ErrorKind::kFormat,
          path.string() + ": not a GGTM model file");
  const uint32_t version = r.U32();
  Require(version == kModelVersion, ErrorKind::kFormat,
          path.string() + ": unsupported model version " + std::to_string(version));
  json header;
  try {
    header = json::parse(r.Bytes(r.U64()));
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
  MaskedModel model;
  try {
    model = MaskedModel::Create(header.at("spec").get<ModelSpec>(), 0);
    const auto& jm = header.at("meta");
    model.mutable_meta() = {jm.at("epochs").get<int>(), jm.at("seed").get<uint64_t>(),
                            jm.at("train_accuracy").get<double>(),
                            jm.at("validation_accuracy").get<double>()};
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
  for (auto& p : model.mutable_network().params()) {
    p.weights = r.F32s(p.weights.size());
    p.bias = r.F32s(p.bias.size());
  }
  const std::string hash(r.Bytes(r.U32()));
  Require(r.AtEnd(), ErrorKind::kFormat, path.string() + ": trailing bytes");
  const std::string plan_file = header.value("plan_file", "");
  if (hash.empty()) return model;
  Require(!plan_file.empty(), ErrorKind::kFormat, path.string() + ": plan hash without plan file");
  MaskPlan plan = LoadMaskPlan(path.parent_path() / plan_file);
  Require(MaskPlanHash(plan) == hash, ErrorKind::kFormat,
          path.string() + ": mask plan " + plan_file + " does not match recorded hash");
  const TrainingMeta meta = model.meta();
  model = MaskedModel::Pruned(model, std::move(plan));
  model.mutable_meta() = meta;
  return model;
}

}  // namespace ggt
