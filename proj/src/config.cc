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

#include "ggt/config.h"

#include "ggt/error.h"
#include "ggt/graph.h"
#include "ggt/io.h"

namespace ggt {
namespace {

using json = nlohmann::json;

void Check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) Fail(ErrorKind::kConfig, field + ": " + what);
}

template <typename T>
void Take(const json& j, const char* key, T& field, const char* section = "") {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception& e) {
    Fail(ErrorKind::kConfig, std::string(section) + key + ": " + e.what());
  }
}

std::vector<AsplTarget> StepBins(double lo, double hi, double step) {
  std::vector<AsplTarget> bins;
  for (double l = lo; l + step <= hi + 1e-9; l += step) bins.push_back({l, l + step});
  return bins;
}

}  // namespace

void ExperimentConfig::Validate() const {
  Check(profile == "smoke" || profile == "paper-scale", "profile",
        "must be smoke or paper-scale");
  Check(!out.empty(), "out", "output directory must be set");

  const auto& d = dataset;
  Check(d.classes >= 2, "dataset.classes", "need at least 2 classes");
  Check(d.per_class >= 10, "dataset.per_class", "need at least 10 samples per class");
  Check(d.shape.channels > 0 && d.shape.height > 0 && d.shape.width > 0, "dataset.shape",
        "dimensions must be positive");
  Check(d.separation > 0.0, "dataset.separation", "must be > 0");
  Check(d.noise >= 0.0, "dataset.noise", "must be >= 0");
  Check(d.max_blend >= 0.0 && d.max_blend < 0.5, "dataset.max_blend", "must be in [0, 0.5)");

  const auto& g = graphs;
  Check(g.nodes >= 2 && g.nodes <= kMaxGraphNodes, "graphs.nodes",
        "must be in [2, " + std::to_string(kMaxGraphNodes) + "]");
  Check(g.degree >= 1 && g.degree < g.nodes, "graphs.degree", "must be in [1, nodes)");
  Check((static_cast<int64_t>(g.nodes) * g.degree) % 2 == 0, "graphs.degree",
        "nodes * degree must be even");
  Check(!g.bins.empty(), "graphs.bins", "at least one ASPL bin required");
  for (size_t b = 0; b < g.bins.size(); ++b) {
    const std::string name = "graphs.bins[" + std::to_string(b) + "]";
    Check(g.bins[b].lower >= 1.0 && g.bins[b].lower < g.bins[b].upper, name,
          "need 1 <= lower < upper");
    Check(g.bins[b].max_swaps >= 1, name, "max_swaps must be positive");
    if (b > 0)
      Check(g.bins[b - 1].upper <= g.bins[b].lower, name,
            "bins must be ascending and disjoint");
  }
  Check(g.per_bin >= 1, "graphs.per_bin", "must be positive");
  Check(g.max_tries >= 1, "graphs.max_tries", "must be positive");
  Check(g.restart_factor >= 1, "graphs.restart_factor", "must be positive");

  const auto& t = training;
  Check(t.width >= g.nodes, "training.width", "layer width must be >= graphs.nodes");
  Check(t.epochs >= 0 && t.pruned_epochs >= 0, "training.epochs", "must be >= 0");
  Check(t.learning_rate > 0.0, "training.learning_rate", "must be > 0");
  Check(t.batch_size >= 1, "training.batch_size", "must be positive");
  Check(t.accept_ratio > 0.0, "training.accept_ratio", "must be > 0");

  const auto& e = ensemble;
  Check(e.size >= 1, "ensemble.size", "must be positive");
  Check(e.bin >= 0 && e.bin < static_cast<int>(g.bins.size()), "ensemble.bin",
        "must index graphs.bins");
  Check(e.min_size >= 0 && e.min_size <= e.size, "ensemble.min_size", "must be in [0, size]");
  Check(e.size <= g.per_bin, "ensemble.size", "cannot exceed graphs.per_bin");

  Check(attack.epsilon > 0.0, "attack.epsilon", "must be > 0");
  Check(attack.tau >= 0.0 && attack.tau <= 1.0, "attack.tau", "must be in [0, 1]");
  Check(attack.high_confidence_count >= 1, "attack.high_confidence_count", "must be positive");

  const auto& r = detector;
  Check(r.alpha > 0.0 && r.beta > 0.0 && r.alpha + r.beta < 1.0, "detector.alpha",
        "alpha, beta must be > 0 with alpha + beta < 1");
  Check(r.relax_fraction > 0.0, "detector.relax_fraction", "must be > 0");
  Check(r.max_models >= 1, "detector.max_models", "must be positive");
  Check(r.quantile > 0.0 && r.quantile < 1.0, "detector.quantile", "must be in (0, 1)");

  try {
    Model().Validate();
  } catch (const Error& err) {
    Fail(ErrorKind::kConfig, std::string("model: ") + err.what());
  }
}

ModelSpec ExperimentConfig::Model() const {
  return DefaultModelSpec(dataset.shape, dataset.classes, training.width);
}

CalibrationOptions ExperimentConfig::Calibration() const {
  CalibrationOptions o;
  o.mode = detector.mode;
  o.quantile = detector.quantile;
  o.alpha = detector.alpha;
  o.beta = detector.beta;
  o.relax_fraction = detector.relax_fraction;
  o.max_models = detector.max_models;
  return o;
}

size_t ExperimentConfig::MinEnsemble() const {
  return static_cast<size_t>(ensemble.min_size > 0 ? ensemble.min_size : ensemble.size);
}

ExperimentConfig SmokeProfile() {
  ExperimentConfig c;
  c.profile = "smoke";
  c.dataset.per_class = 1000;
  c.dataset.max_blend = 0.2;
  c.graphs.bins = {{3.0, 5.0}, {5.0, 7.0}};
  c.training.pruned_epochs = 30;
  return c;
}

ExperimentConfig PaperScaleProfile() {
  ExperimentConfig c;
  c.profile = "paper-scale";
  c.dataset.per_class = 2000;
  c.dataset.shape = {1, 12, 12};
  c.graphs.bins = StepBins(3.0, 15.0, 2.0);
  c.graphs.per_bin = 100;
  c.training.pruned_epochs = 30;
  c.ensemble.size = 100;
  return c;
}

ExperimentConfig ProfileByName(const std::string& name) {
  if (name == "smoke") return SmokeProfile();
  if (name == "paper-scale") return PaperScaleProfile();
  Fail(ErrorKind::kConfig, "unknown profile '" + name + "' (expected smoke or paper-scale)");
}

json ConfigToJson(const ExperimentConfig& c) {
  json bins = json::array();
  for (const auto& b : c.graphs.bins) bins.push_back({b.lower, b.upper});
  return {
      {"profile", c.profile},
      {"seed", c.seed},
      {"out", c.out},
      {"dataset",
       {{"classes", c.dataset.classes},
        {"per_class", c.dataset.per_class},
        {"shape", c.dataset.shape},
        {"separation", c.dataset.separation},
        {"noise", c.dataset.noise},
        {"max_blend", c.dataset.max_blend},
        {"csv", c.dataset.csv}}},
      {"graphs",
       {{"nodes", c.graphs.nodes},
        {"degree", c.graphs.degree},
        {"bins", bins},
        {"max_swaps", c.graphs.bins.empty() ? kDefaultMaxSwaps : c.graphs.bins[0].max_swaps},
        {"per_bin", c.graphs.per_bin},
        {"max_tries", c.graphs.max_tries},
        {"restart_factor", c.graphs.restart_factor}}},
      {"training",
       {{"width", c.training.width},
        {"epochs", c.training.epochs},
        {"pruned_epochs", c.training.pruned_epochs},
        {"learning_rate", c.training.learning_rate},
        {"batch_size", c.training.batch_size},
        {"accept_ratio", c.training.accept_ratio}}},
      {"ensemble",
       {{"size", c.ensemble.size}, {"bin", c.ensemble.bin}, {"min_size", c.ensemble.min_size}}},
      {"attack",
       {{"epsilon", c.attack.epsilon},
        {"tau", c.attack.tau},
        {"high_confidence_count", c.attack.high_confidence_count}}},
      {"detector",
       {{"alpha", c.detector.alpha},
        {"beta", c.detector.beta},
        {"relax_fraction", c.detector.relax_fraction},
        {"max_models", c.detector.max_models},
        {"mode", CalibrationModeName(c.detector.mode)},
        {"quantile", c.detector.quantile}}},
  };
}

ExperimentConfig ConfigFromJson(const json& j, const ExperimentConfig& base) {
  Check(j.is_object(), "config", "must be a JSON object");
  ExperimentConfig c = base;
  Take(j, "profile", c.profile);
  Take(j, "seed", c.seed);
  Take(j, "out", c.out);
  for (const char* section : {"dataset", "graphs", "training", "ensemble", "attack", "detector"})
    Check(!j.contains(section) || j[section].is_object(), section, "must be a JSON object");
  if (j.contains("dataset")) {
    const json& d = j["dataset"];
    Take(d, "classes", c.dataset.classes, "dataset.");
    Take(d, "per_class", c.dataset.per_class, "dataset.");
    if (d.contains("shape")) {
      try {
        c.dataset.shape = d["shape"].get<Shape3>();
      } catch (const Error& e) {
        Fail(ErrorKind::kConfig, std::string("dataset.shape: ") + e.what());
      }
    }
    Take(d, "separation", c.dataset.separation, "dataset.");
    Take(d, "noise", c.dataset.noise, "dataset.");
    Take(d, "max_blend", c.dataset.max_blend, "dataset.");
    Take(d, "csv", c.dataset.csv, "dataset.");
  }
  if (j.contains("graphs")) {
    const json& g = j["graphs"];
    Take(g, "nodes", c.graphs.nodes, "graphs.");
    Take(g, "degree", c.graphs.degree, "graphs.");
    if (g.contains("bins")) {
      std::vector<std::vector<double>> raw;
      Take(g, "bins", raw, "graphs.");
      c.graphs.bins.clear();
      for (const auto& b : raw) {
        Check(b.size() == 2, "graphs.bins", "each bin is [lower, upper]");
        c.graphs.bins.push_back({b[0], b[1]});
      }
    }
    int max_swaps = c.graphs.bins.empty() ? kDefaultMaxSwaps : c.graphs.bins[0].max_swaps;
    Take(g, "max_swaps", max_swaps, "graphs.");
    for (auto& b : c.graphs.bins) b.max_swaps = max_swaps;
    Take(g, "per_bin", c.graphs.per_bin, "graphs.");
    Take(g, "max_tries", c.graphs.max_tries, "graphs.");
    Take(g, "restart_factor", c.graphs.restart_factor, "graphs.");
  }
  if (j.contains("training")) {
    const json& t = j["training"];
    Take(t, "width", c.training.width, "training.");
    Take(t, "epochs", c.training.epochs, "training.");
    Take(t, "pruned_epochs", c.training.pruned_epochs, "training.");
    Take(t, "learning_rate", c.training.learning_rate, "training.");
    Take(t, "batch_size", c.training.batch_size, "training.");
    Take(t, "accept_ratio", c.training.accept_ratio, "training.");
  }
  if (j.contains("ensemble")) {
    const json& e = j["ensemble"];
    Take(e, "size", c.ensemble.size, "ensemble.");
    Take(e, "bin", c.ensemble.bin, "ensemble.");
    Take(e, "min_size", c.ensemble.min_size, "ensemble.");
  }
  if (j.contains("attack")) {
    const json& a = j["attack"];
    Take(a, "epsilon", c.attack.epsilon, "attack.");
    Take(a, "tau", c.attack.tau, "attack.");
    Take(a, "high_confidence_count", c.attack.high_confidence_count, "attack.");
  }
  if (j.contains("detector")) {
    const json& r = j["detector"];
    Take(r, "alpha", c.detector.alpha, "detector.");
    Take(r, "beta", c.detector.beta, "detector.");
    Take(r, "relax_fraction", c.detector.relax_fraction, "detector.");
    Take(r, "max_models", c.detector.max_models, "detector.");
    if (r.contains("mode")) {
      std::string mode;
      Take(r, "mode", mode, "detector.");
      try {
        c.detector.mode = CalibrationModeFromName(mode);
      } catch (const Error& e) {
        Fail(ErrorKind::kConfig, std::string("detector.mode: ") + e.what());
      }
    }
    Take(r, "quantile", c.detector.quantile, "detector.");
  }
  return c;
}

ExperimentConfig ResolveConfig(const ConfigOverrides& o) {
  json file = json::object();
  if (!o.config_file.empty()) {
    std::string text;
    try {
      text = ReadFile(o.config_file);
    } catch (const Error& e) {
      Fail(ErrorKind::kConfig, e.what());
    }
    try {
      file = json::parse(text);
    } catch (const json::exception& e) {
      Fail(ErrorKind::kConfig, o.config_file + ": " + e.what());
    }
  }
  std::string profile = o.profile;
  if (profile.empty() && file.is_object() && file.contains("profile") &&
      file["profile"].is_string())
    profile = file["profile"].get<std::string>();
  if (profile.empty()) profile = "smoke";
  ExperimentConfig c = ConfigFromJson(file, ProfileByName(profile));
  c.profile = profile;
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.out = o.out;
  c.Validate();
  return c;
}

}  // namespace ggt
