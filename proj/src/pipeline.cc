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

#include "ggt/pipeline.h"

#include <cstdio>
#include <iostream>
#include <numeric>

#include "ggt/aspl_regulator.h"
#include "ggt/error.h"
#include "ggt/graph.h"
#include "ggt/graph_mapping.h"
#include "ggt/io.h"
#include "ggt/rng.h"

namespace ggt {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

void Log(const std::string& stage, const std::string& msg) {
  std::clog << "[" << stage << "] " << msg << "\n";
}

// Missing outputs of an earlier stage are reported as resumable IO errors.
void RequireInput(const fs::path& p, const std::string& stage, const std::string& producer) {
  if (!fs::exists(p))
    Fail(ErrorKind::kIo, stage + ": missing " + p.string() + "; run `ggt " + producer +
                             "` with the same config first");
}

json ReadJson(const fs::path& p) {
  try {
    return json::parse(ReadFile(p));
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, p.string() + ": " + e.what());
  }
}

void WriteJson(const fs::path& p, const json& j) { WriteFile(p, j.dump(2) + "\n"); }

void WriteResolvedConfig(const ExperimentConfig& c) {
  WriteJson(StagePaths(c.out).config, ConfigToJson(c));
}

std::string ModelStem(size_t graph_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "pruned_%04zu", graph_index);
  return buf;
}

std::vector<SampleKind> KindsOf(const std::vector<LabeledSample>& samples) {
  std::vector<SampleKind> kinds;
  kinds.reserve(samples.size());
  for (const auto& s : samples) kinds.push_back(s.kind);
  return kinds;
}

Corpus BuildCorpus(const MaskedModel& original, const LabeledSet& split, double epsilon) {
  Corpus corpus{split.shape, HarvestNormals(original, split)};
  auto wl = HarvestWrongLabels(original, split);
  auto fgsm = GenerateFgsm(original, split, epsilon);
  corpus.samples.insert(corpus.samples.end(), wl.begin(), wl.end());
  corpus.samples.insert(corpus.samples.end(), fgsm.begin(), fgsm.end());
  return corpus;
}

LabelMatrix SubMatrix(const LabelMatrix& m, const std::vector<size_t>& rows) {
  LabelMatrix out;
  out.model_count = m.model_count;
  for (size_t r : rows) {
    out.sample_ids.push_back(m.sample_ids[r]);
    out.y_true.push_back(m.y_true[r]);
    out.original_label.push_back(m.original_label[r]);
    const auto row = m.Row(r);
    out.labels.insert(out.labels.end(), row.begin(), row.end());
  }
  return out;
}

json CalibrationToJson(const DetectorCalibration& cal, CalibrationMode mode, size_t normals,
                       size_t adversarials) {
  return {{"mode", CalibrationModeName(mode)},
          {"threshold", cal.threshold},
          {"relax", cal.relax},
          {"relax_clamped", cal.relax_clamped},
          {"alpha", cal.alpha},
          {"beta", cal.beta},
          {"max_models", cal.max_models},
          {"deny_bound", cal.deny_bound()},
          {"accept_bound", cal.accept_bound()},
          {"normal_count", normals},
          {"adversarial_count", adversarials}};
}

}  // namespace

StagePaths::StagePaths(const fs::path& out)
    : root(out),
      config(out / "config.resolved.json"),
      graphs_dir(out / "graphs"),
      graph_manifest(out / "graphs" / "manifest.json"),
      models_dir(out / "models"),
      original_model(out / "models" / "original.ggtm"),
      ensemble_manifest(out / "models" / "ensemble.json"),
      calibration_corpus(out / "corpus" / "calibration.ggts"),
      test_corpus(out / "corpus" / "test.ggts"),
      calibration_labels(out / "labels" / "calibration.csv"),
      test_labels(out / "labels" / "test.csv"),
      calibration(out / "calibration.json"),
      report_json(out / "report.json"),
      report_text(out / "report.txt") {}

StageSeeds::StageSeeds(uint64_t seed)
    : data(DeriveSeed(seed, {1})),
      init(DeriveSeed(seed, {2})),
      graphs(DeriveSeed(seed, {3})),
      train(DeriveSeed(seed, {4})),
      pruned(DeriveSeed(seed, {5})),
      order(DeriveSeed(seed, {6})) {}

DatasetSplits LoadExperimentData(const ExperimentConfig& c) {
  const StageSeeds seeds(c.seed);
  const auto& d = c.dataset;
  if (!d.csv.empty()) return SplitDataset(LoadCsvSet(d.csv, d.shape), seeds.data);
  return MakeDataset(d.classes, d.per_class, d.shape, seeds.data,
                     {d.separation, d.noise, d.max_blend});
}

void CmdGraphs(const ExperimentConfig& c) {
  c.Validate();
  const StagePaths paths(c.out);
  WriteResolvedConfig(c);
  BatchOptions options;
  options.max_tries = c.graphs.max_tries;
  options.restart_factor = c.graphs.restart_factor;
  const auto outcomes = BatchGenerate(c.graphs.nodes, c.graphs.degree, c.graphs.bins,
                                      c.graphs.per_bin, StageSeeds(c.seed).graphs, options);
  json bins = json::array();
  for (const auto& o : outcomes) {
    json files = json::array();
    for (size_t i = 0; i < o.graphs.size(); ++i) {
      const std::string name =
          BinGraphFileName(c.graphs.nodes, c.graphs.degree, o.target, static_cast<int>(i));
      SaveGraph(o.graphs[i], paths.graphs_dir / name);
      files.push_back({{"file", name},
                       {"sha256", GraphHash(o.graphs[i])},
                       {"aspl", Aspl(o.graphs[i])}});
    }
    Log("graphs", "bin " + o.target.Label() + ": " + std::to_string(o.graphs.size()) + "/" +
                      std::to_string(c.graphs.per_bin) + " graphs, " +
                      std::to_string(o.restarts_used) + " restarts");
    bins.push_back({{"bin", o.target.Label()},
                    {"lower", o.target.lower},
                    {"upper", o.target.upper},
                    {"filled", o.filled},
                    {"restarts", o.restarts_used},
                    {"graphs", files}});
  }
  WriteJson(paths.graph_manifest,
            {{"n", c.graphs.nodes}, {"k", c.graphs.degree}, {"bins", bins}});
}

void CmdTrain(const ExperimentConfig& c) {
  c.Validate();
  const StagePaths paths(c.out);
  const StageSeeds seeds(c.seed);
  RequireInput(paths.graph_manifest, "train", "graphs");
  WriteResolvedConfig(c);
  const json manifest = ReadJson(paths.graph_manifest);
  const AsplTarget& bin = c.graphs.bins[c.ensemble.bin];

  std::vector<GraphEntry> graphs;
  try {
    Require(manifest.at("n").get<int>() == c.graphs.nodes &&
                manifest.at("k").get<int>() == c.graphs.degree,
            ErrorKind::kConfig, "train: graph manifest was built for a different (N, k)");
    const json* entry = nullptr;
    for (const auto& b : manifest.at("bins"))
      if (b.at("bin").get<std::string>() == bin.Label()) entry = &b;
    Require(entry != nullptr, ErrorKind::kConfig,
            "train: graph manifest has no bin " + bin.Label());
    for (const auto& g : entry->at("graphs")) {
      const std::string file = g.at("file").get<std::string>();
      RequireInput(paths.graphs_dir / file, "train", "graphs");
      RelationalGraph graph = LoadGraph(paths.graphs_dir / file);
      const std::string hash = GraphHash(graph);
      Require(hash == g.at("sha256").get<std::string>(), ErrorKind::kFormat,
              "train: " + file + " does not match its manifest hash");
      graphs.push_back({std::move(graph), {"graphs/" + file, hash}});
    }
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, paths.graph_manifest.string() + ": " + e.what());
  }

  const DatasetSplits data = LoadExperimentData(c);
  TrainHyper hyper;
  hyper.epochs = c.training.epochs;
  hyper.learning_rate = c.training.learning_rate;
  hyper.batch_size = c.training.batch_size;
  hyper.seed = seeds.train;
  MaskedModel original =
      Train(MaskedModel::Create(c.Model(), seeds.init), data.train, &data.validation, hyper);
  Log("train", "original: train " + std::to_string(original.meta().train_accuracy) +
                   ", validation " + std::to_string(original.meta().validation_accuracy));
  SaveModel(original, paths.original_model, "");

  TrainHyper pruned = hyper;
  pruned.epochs = c.training.pruned_epochs;
  pruned.seed = seeds.pruned;
  EnsembleOptions options;
  options.accept_ratio = c.training.accept_ratio;
  options.min_models = c.MinEnsemble();
  options.target_size = static_cast<size_t>(c.ensemble.size);
  EnsembleResult ens =
      BuildPrunedEnsemble(original, graphs, data.train, data.validation, pruned, options);
  Log("train", std::to_string(ens.models.size()) + " pruned models accepted, " +
                   std::to_string(ens.rejected.size()) + " rejected (bar " +
                   std::to_string(ens.bar) + ")");

  // One fixed shuffled order, shared by every sample at detection time.
  std::vector<size_t> order(ens.models.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seeds.order);
  rng.Shuffle(std::span<size_t>(order));

  json models = json::array();
  for (size_t slot : order) {
    const size_t g = ens.accepted[slot];
    const std::string stem = ModelStem(g);
    SaveMaskPlan(*ens.models[slot].plan(), paths.models_dir / (stem + ".plan.json"));
    SaveModel(ens.models[slot], paths.models_dir / (stem + ".ggtm"), stem + ".plan.json");
    models.push_back({{"file", stem + ".ggtm"},
                      {"graph", graphs[g].ref.file},
                      {"graph_sha256", graphs[g].ref.sha256},
                      {"validation_accuracy", ens.validation_accuracy[g]}});
  }
  json rejected = json::array();
  for (size_t g : ens.rejected)
    rejected.push_back({{"graph", graphs[g].ref.file},
                        {"validation_accuracy", ens.validation_accuracy[g]}});
  WriteJson(paths.ensemble_manifest,
            {{"bin", bin.Label()},
             {"original_validation_accuracy", original.meta().validation_accuracy},
             {"accept_bar", ens.bar},
             {"models", models},
             {"rejected", rejected}});
}

LoadedEnsemble LoadEnsemble(const ExperimentConfig& c) {
  const StagePaths paths(c.out);
  RequireInput(paths.ensemble_manifest, "load ensemble", "train");
  const json manifest = ReadJson(paths.ensemble_manifest);
  LoadedEnsemble e;
  try {
    for (const auto& m : manifest.at("models")) {
      const fs::path file = paths.models_dir / m.at("file").get<std::string>();
      RequireInput(file, "load ensemble", "train");
      e.models.push_back(LoadModel(file));
      e.graph_files.push_back(m.at("graph").get<std::string>());
      e.graph_hashes.push_back(m.at("graph_sha256").get<std::string>());
    }
  } catch (const json::exception& ex) {
    Fail(ErrorKind::kFormat, paths.ensemble_manifest.string() + ": " + ex.what());
  }
  Require(!e.models.empty(), ErrorKind::kEmptyEnsemble, "ensemble manifest lists no models");
  return e;
}

void CmdAttack(const ExperimentConfig& c) {
  c.Validate();
  const StagePaths paths(c.out);
  RequireInput(paths.original_model, "attack", "train");
  WriteResolvedConfig(c);
  const MaskedModel original = LoadModel(paths.original_model);
  const DatasetSplits data = LoadExperimentData(c);
  const Corpus cal = BuildCorpus(original, data.validation, c.attack.epsilon);
  const Corpus test = BuildCorpus(original, data.test, c.attack.epsilon);
  SaveCorpus(cal, paths.calibration_corpus);
  SaveCorpus(test, paths.test_corpus);
  auto count = [](const Corpus& corpus, SampleKind k) {
    return std::to_string(std::count_if(corpus.samples.begin(), corpus.samples.end(),
                                        [&](const LabeledSample& s) { return s.kind == k; }));
  };
  Log("attack", "test corpus: " + count(test, SampleKind::kNormal) + " normal, " +
                    count(test, SampleKind::kWrongLabel) + " WL, " +
                    count(test, SampleKind::kFgsm) + " FGSM");
}

DetectorCalibration LoadCalibration(const fs::path& path) {
  const json j = ReadJson(path);
  DetectorCalibration cal;
  try {
    cal.threshold = j.at("threshold").get<double>();
    cal.relax = j.at("relax").get<double>();
    cal.relax_clamped = j.at("relax_clamped").get<bool>();
    cal.alpha = j.at("alpha").get<double>();
    cal.beta = j.at("beta").get<double>();
    cal.max_models = j.at("max_models").get<int>();
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
  cal.Validate();
  return cal;
}

DetectorCalibration CmdCalibrate(const ExperimentConfig& c) {
  c.Validate();
  const StagePaths paths(c.out);
  RequireInput(paths.original_model, "calibrate", "train");
  RequireInput(paths.calibration_corpus, "calibrate", "attack");
  WriteResolvedConfig(c);
  const MaskedModel original = LoadModel(paths.original_model);
  const LoadedEnsemble ens = LoadEnsemble(c);
  const Corpus corpus = LoadCorpus(paths.calibration_corpus);
  const LabelMatrix m = ComputeLabelMatrix(original, ens.models, corpus.samples);
  SaveLabelMatrixCsv(m, paths.calibration_labels);

  std::vector<double> normal, adversarial;
  for (size_t r = 0; r < m.rows(); ++r) {
    if (corpus.samples[r].kind == SampleKind::kNormal) normal.push_back(m.RowLcr(r));
    if (corpus.samples[r].kind == SampleKind::kFgsm) adversarial.push_back(m.RowLcr(r));
  }
  const DetectorCalibration cal = CalibrateFromScores(normal, adversarial, c.Calibration());
  if (cal.relax_clamped)
    Log("calibrate", "relax scale clamped to " + std::to_string(cal.relax));
  Log("calibrate", "threshold " + std::to_string(cal.threshold) + " from " +
                       std::to_string(normal.size()) + " normal / " +
                       std::to_string(adversarial.size()) + " FGSM samples");
  WriteJson(paths.calibration,
            CalibrationToJson(cal, c.detector.mode, normal.size(), adversarial.size()));
  return cal;
}

EvaluationReport CmdDetect(const ExperimentConfig& c) {
  c.Validate();
  const StagePaths paths(c.out);
  RequireInput(paths.original_model, "detect", "train");
  RequireInput(paths.test_corpus, "detect", "attack");
  RequireInput(paths.calibration, "detect", "calibrate");
  WriteResolvedConfig(c);
  const DetectorCalibration cal = LoadCalibration(paths.calibration);
  const MaskedModel original = LoadModel(paths.original_model);
  const LoadedEnsemble ens = LoadEnsemble(c);
  const Corpus corpus = LoadCorpus(paths.test_corpus);
  const LabelMatrix m = ComputeLabelMatrix(original, ens.models, corpus.samples);
  SaveLabelMatrixCsv(m, paths.test_labels);
  const auto kinds = KindsOf(corpus.samples);

  EvaluationReport report;
  report.rows = BuildReportRows(EvaluateDetection(m, kinds, cal));

  // High-confidence FGSM subset, scored against the same normals.
  std::vector<LabeledSample> fgsm;
  std::vector<size_t> fgsm_rows, hc_rows;
  for (size_t r = 0; r < corpus.samples.size(); ++r) {
    if (kinds[r] == SampleKind::kNormal) hc_rows.push_back(r);
    if (kinds[r] == SampleKind::kFgsm) {
      fgsm.push_back(corpus.samples[r]);
      fgsm_rows.push_back(r);
    }
  }
  const size_t requested = static_cast<size_t>(c.attack.high_confidence_count);
  size_t found = 0;
  for (size_t i = 0; i < fgsm.size() && found < requested; ++i) {
    if (fgsm[i].confidence > c.attack.tau) {
      hc_rows.push_back(fgsm_rows[i]);
      ++found;
    }
  }
  // Same selection rule as HighConfidenceSubset.
  Require(found == HighConfidenceSubset(fgsm, c.attack.tau, requested).samples.size(),
          ErrorKind::kInvalidArgument, "high-confidence subset mismatch");
  if (found > 0) {
    std::vector<SampleKind> hc_kinds;
    for (size_t r : hc_rows) hc_kinds.push_back(kinds[r]);
    const auto rows = BuildReportRows(EvaluateDetection(SubMatrix(m, hc_rows), hc_kinds, cal));
    ReportRow hc = rows.back();
    char name[32];
    std::snprintf(name, sizeof(name), "FGSM>%g", c.attack.tau);
    hc.attack = name;
    report.rows.push_back(hc);
  }

  const AsplTarget& bin = c.graphs.bins[c.ensemble.bin];
  report.ensemble = {c.graphs.nodes, c.graphs.degree, bin.Label(), ens.models.size(),
                     ens.graph_hashes};
  report.calibration = cal;
  report.calibration_mode = CalibrationModeName(c.detector.mode);
  const StageSeeds seeds(c.seed);
  report.provenance = {
      {"profile", c.profile},
      {"seed", c.seed},
      {"stage_seeds",
       {{"data", seeds.data},
        {"init", seeds.init},
        {"graphs", seeds.graphs},
        {"train", seeds.train},
        {"pruned", seeds.pruned},
        {"order", seeds.order}}},
      {"graph_files", ens.graph_files},
      {"epsilon", c.attack.epsilon},
      {"high_confidence",
       {{"tau", c.attack.tau},
        {"requested", requested},
        {"found", found},
        {"insufficient", found < requested}}},
  };
  WriteFile(paths.report_json, RenderReportJson(report));
  WriteFile(paths.report_text, RenderReportText(report));
  return report;
}

EvaluationReport CmdReproduce(const ExperimentConfig& c) {
  CmdGraphs(c);
  CmdTrain(c);
  CmdAttack(c);
  CmdCalibrate(c);
  return CmdDetect(c);
}

std::string CmdReport(const ExperimentConfig& c) {
  const StagePaths paths(c.out);
  RequireInput(paths.report_json, "report", "detect");
  return RenderReportText(LoadReport(paths.report_json));
}

}  // namespace ggt
