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

#include "ggt/sample_forge.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ggt/error.h"
#include "ggt/io.h"
#include "ggt/parallel.h"
#include "ggt/rng.h"

namespace ggt {
namespace {

using json = nlohmann::json;

constexpr char kCorpusMagic[4] = {'G', 'G', 'T', 'S'};
constexpr uint32_t kCorpusVersion = 1;

// One class template: two oriented gratings and a Gaussian blob per channel,
// min-max normalized to [0, 1].
std::vector<double> MakePrototype(Shape3 shape, Rng& rng) {
  std::vector<double> p(shape.size());
  const double h = shape.height, w = shape.width;
  for (int c = 0; c < shape.channels; ++c) {
    double theta[2], freq[2], phase[2];
    for (int g = 0; g < 2; ++g) {
      theta[g] = rng.Uniform(0.0, std::numbers::pi);
      freq[g] = rng.Uniform(0.5, 1.5) * 2.0 * std::numbers::pi / std::max(h, w);
      phase[g] = rng.Uniform(0.0, 2.0 * std::numbers::pi);
    }
    const double by = rng.Uniform(0.0, h - 1.0), bx = rng.Uniform(0.0, w - 1.0);
    const double radius = std::max(1.0, 0.25 * std::min(h, w));
    double lo = 1e300, hi = -1e300;
    for (int y = 0; y < shape.height; ++y) {
      for (int x = 0; x < shape.width; ++x) {
        double v = 0.0;
        for (int g = 0; g < 2; ++g)
          v += std::sin(freq[g] * (x * std::cos(theta[g]) + y * std::sin(theta[g])) + phase[g]);
        const double d2 = (y - by) * (y - by) + (x - bx) * (x - bx);
        v += 1.5 * std::exp(-d2 / (2.0 * radius * radius));
        p[(static_cast<size_t>(c) * shape.height + y) * shape.width + x] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (size_t k = static_cast<size_t>(c) * shape.height * shape.width;
         k < static_cast<size_t>(c + 1) * shape.height * shape.width; ++k)
      p[k] = (p[k] - lo) / span;
  }
  return p;
}

float Clip01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

LabeledSample Clean(const LabeledSet& set, size_t i, SampleKind kind, float confidence) {
  auto x = set.Input(i);
  return {std::vector<float>(x.begin(), x.end()), set.labels[i], kind, confidence,
          static_cast<int64_t>(i)};
}

}  // namespace

DatasetSplits MakeDataset(int classes, int per_class, Shape3 shape, uint64_t seed,
                          const DatasetOptions& options) {
  Require(classes >= 2, ErrorKind::kInvalidArgument, "dataset needs at least 2 classes");
  Require(per_class >= 10, ErrorKind::kInvalidArgument, "dataset needs >= 10 samples per class");
  Require(shape.size() > 0, ErrorKind::kShapeMismatch, "empty sample shape");
  Require(options.noise >= 0.0 && options.max_blend >= 0.0 && options.max_blend < 0.5,
          ErrorKind::kInvalidArgument, "dataset noise must be >= 0 and max_blend in [0, 0.5)");

  Rng proto_rng(DeriveSeed(seed, {0}));
  std::vector<std::vector<double>> protos;
  for (int c = 0; c < classes; ++c) protos.push_back(MakePrototype(shape, proto_rng));

  Rng rng(DeriveSeed(seed, {1}));
  const size_t total = static_cast<size_t>(classes) * per_class;
  LabeledSet all{shape, {}, {}};
  all.inputs.reserve(total * shape.size());
  std::vector<float> x(shape.size());
  for (int i = 0; i < per_class; ++i) {
    for (int c = 0; c < classes; ++c) {
      int other = static_cast<int>(rng.UniformIndex(classes - 1));
      if (other >= c) ++other;
      const double blend = rng.Uniform(0.0, options.max_blend);
      const double gain = options.separation * rng.Uniform(0.8, 1.2);
      for (size_t k = 0; k < x.size(); ++k) {
        const double signal = (1.0 - blend) * protos[c][k] + blend * protos[other][k] - 0.5;
        x[k] = Clip01(0.5 + gain * signal + options.noise * rng.Normal());
      }
      all.Append(x, c);
    }
  }

  return SplitDataset(all, DeriveSeed(seed, {2}));
}

DatasetSplits SplitDataset(const LabeledSet& all, uint64_t seed) {
  Rng rng(seed);
  const size_t total = all.size();
  std::vector<size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(std::span<size_t>(order));
  const size_t n_train = total * 70 / 100;
  const size_t n_val = total * 15 / 100;
  const Shape3 shape = all.shape;
  DatasetSplits s{{shape, {}, {}}, {shape, {}, {}}, {shape, {}, {}}};
  for (size_t r = 0; r < total; ++r) {
    LabeledSet& dst = r < n_train ? s.train : (r < n_train + n_val ? s.validation : s.test);
    dst.Append(all.Input(order[r]), all.labels[order[r]]);
  }
  return s;
}

LabeledSet LoadCsvSet(const std::filesystem::path& path, Shape3 shape) {
  std::istringstream in(ReadFile(path));
  LabeledSet set{shape, {}, {}};
  std::string line;
  std::vector<float> x;
  size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    x.clear();
    int label = -1;
    bool first = true;
    while (std::getline(fields, cell, ',')) {
      try {
        if (first) {
          label = std::stoi(cell);
          first = false;
        } else {
          x.push_back(std::stof(cell));
        }
      } catch (const std::exception&) {
        Fail(ErrorKind::kFormat, path.string() + ":" + std::to_string(row) + ": bad number");
      }
    }
    Require(x.size() == shape.size(), ErrorKind::kShapeMismatch,
            path.string() + ":" + std::to_string(row) + ": expected " +
                std::to_string(shape.size()) + " values");
    set.Append(x, label);
  }
  return set;
}

std::string SampleKindName(SampleKind kind) {
  switch (kind) {
    case SampleKind::kNormal: return "normal";
    case SampleKind::kWrongLabel: return "WL";
    case SampleKind::kFgsm: return "FGSM";
  }
  return "unknown";
}

SampleKind SampleKindFromName(const std::string& name) {
  if (name == "normal") return SampleKind::kNormal;
  if (name == "WL") return SampleKind::kWrongLabel;
  if (name == "FGSM") return SampleKind::kFgsm;
  Fail(ErrorKind::kFormat, "unknown sample kind '" + name + "'");
}

std::optional<LabeledSample> Fgsm(const MaskedModel& original, const LabeledSample& source,
                                  double epsilon) {
  Require(epsilon >= 0.0, ErrorKind::kInvalidArgument, "FGSM epsilon must be >= 0");
  Require(original.PredictLabel(source.x) == source.y_true, ErrorKind::kInvalidArgument,
          "FGSM source must be classified correctly by the original model");
  const auto grad = original.GradInput(source.x, source.y_true);
  LabeledSample adv = source;
  adv.kind = SampleKind::kFgsm;
  const float eps = static_cast<float>(epsilon);
  for (size_t k = 0; k < adv.x.size(); ++k) {
    const float s = grad[k] > 0.0f ? 1.0f : (grad[k] < 0.0f ? -1.0f : 0.0f);
    adv.x[k] = std::clamp(source.x[k] + eps * s, 0.0f, 1.0f);
  }
  const auto probs = original.Forward(adv.x);
  const int label = ArgMax(probs);
  if (label == source.y_true) return std::nullopt;
  adv.confidence = probs[label];
  return adv;
}

std::vector<LabeledSample> HarvestNormals(const MaskedModel& original, const LabeledSet& set) {
  std::vector<LabeledSample> out;
  Evaluator<float> ev(original.network());
  for (size_t i = 0; i < set.size(); ++i) {
    const auto p = ev.Probabilities(set.Input(i));
    const int label = ArgMax(p);
    if (label == set.labels[i]) out.push_back(Clean(set, i, SampleKind::kNormal, p[label]));
  }
  return out;
}

std::vector<LabeledSample> HarvestWrongLabels(const MaskedModel& original, const LabeledSet& set) {
  std::vector<LabeledSample> out;
  Evaluator<float> ev(original.network());
  for (size_t i = 0; i < set.size(); ++i) {
    const auto p = ev.Probabilities(set.Input(i));
    const int label = ArgMax(p);
    if (label != set.labels[i]) out.push_back(Clean(set, i, SampleKind::kWrongLabel, p[label]));
  }
  return out;
}

std::vector<LabeledSample> GenerateFgsm(const MaskedModel& original, const LabeledSet& set,
                                        double epsilon, int threads) {
  const auto normals = HarvestNormals(original, set);
  std::vector<std::optional<LabeledSample>> attacked(normals.size());
  ParallelFor(normals.size(), threads,
              [&](size_t i) { attacked[i] = Fgsm(original, normals[i], epsilon); });
  std::vector<LabeledSample> out;
  for (auto& a : attacked)
    if (a) out.push_back(std::move(*a));
  return out;
}

SubsetResult HighConfidenceSubset(const std::vector<LabeledSample>& samples, double tau,
                                  size_t count) {
  Require(tau >= 0.0 && tau <= 1.0, ErrorKind::kInvalidArgument, "tau must be in [0, 1]");
  SubsetResult r;
  for (const auto& s : samples) {
    if (r.samples.size() == count) break;
    if (s.confidence > tau) r.samples.push_back(s);
  }
  r.insufficient = r.samples.size() < count;
  return r;
}

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  json index = {{"shape", corpus.shape}, {"samples", json::array()}};
  for (const auto& s : corpus.samples) {
    Require(s.x.size() == corpus.shape.size(), ErrorKind::kShapeMismatch,
            "corpus sample does not match corpus shape");
    index["samples"].push_back({{"kind", SampleKindName(s.kind)},
                                {"y_true", s.y_true},
                                {"confidence", s.confidence},
                                {"source", s.source_index}});
  }
  const std::string ij = index.dump();
  ByteWriter w;
  w.Bytes(std::string_view(kCorpusMagic, 4));
  w.U32(kCorpusVersion);
  w.U64(ij.size());
  w.Bytes(ij);
  for (const auto& s : corpus.samples) w.F32s(s.x);
  WriteFile(path, w.str());
}

Corpus LoadCorpus(const std::filesystem::path& path) {
  const std::string data = ReadFile(path);
  ByteReader r(data, path.string());
  Require(r.Bytes(4) == std::string_view(kCorpusMagic, 4), ErrorKind::kFormat,
          path.string() + ": not a GGTS corpus file");
  Require(r.U32() == kCorpusVersion, ErrorKind::kFormat, path.string() + ": unsupported version");
  Corpus corpus;
  try {
    const json index = json::parse(r.Bytes(r.U64()));
    corpus.shape = index.at("shape").get<Shape3>();
    for (const auto& js : index.at("samples")) {
      LabeledSample s;
      s.kind = SampleKindFromName(js.at("kind").get<std::string>());
      s.y_true = js.at("y_true").get<int>();
      s.confidence = js.at("confidence").get<float>();
      s.source_index = js.at("source").get<int64_t>();
      corpus.samples.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
  for (auto& s : corpus.samples) s.x = r.F32s(corpus.shape.size());
  Require(r.AtEnd(), ErrorKind::kFormat, path.string() + ": trailing bytes");
  return corpus;
}

}  // namespace ggt
