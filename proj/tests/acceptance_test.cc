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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Runs from the build directory; scratch output goes to
// ./acceptance/.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ggt/aspl_regulator.h"
#include "ggt/config.h"
#include "ggt/detector.h"
#include "ggt/graph.h"
#include "ggt/graph_mapping.h"
#include "ggt/io.h"
#include "ggt/metrics.h"
#include "ggt/pipeline.h"
#include "oracles.h"
#include "test_util.h"

namespace ggt {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void Note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

Outcome GraphSuite() {
  Outcome o;
  const auto start = Clock::now();
  int good = 0;
  for (int i = 0; i < 100; ++i) {
    const RelationalGraph g = GenerateRegularGraph(64, 3, DeriveSeed(101, {uint64_t(i)}));
    const bool ok = IsConnected(g) && g.RegularDegree() == 3 && PruningRate(g) == 0.953125;
    good += ok;
  }
  o.Check(good == 100, "connected 3-regular graphs with theta 0.953125: " + std::to_string(good));
  o.Note(std::to_string(good) + "/100 graphs connected, 3-regular, theta=0.953125");

  Rng rng(7);
  int compared = 0, mismatched = 0;
  for (int n = 4; n <= 12; ++n) {
    for (int k = 2; k < n; ++k) {
      if ((n * k) % 2) continue;
      for (int rep = 0; rep < 3; ++rep) {
        const RelationalGraph g = GenerateRegularGraph(n, k, rng.NextU64());
        ++compared;
        mismatched += Aspl(g) != testing::FloydWarshallAspl(g);
      }
    }
  }
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.UniformIndex(11));
    const RelationalGraph g = testing::RandomGraph(n, rng.Uniform(0.3, 0.9), rng);
    if (!IsConnected(g)) continue;
    ++compared;
    mismatched += Aspl(g) != testing::FloydWarshallAspl(g);
  }
  o.Check(mismatched == 0, std::to_string(mismatched) + " ASPL mismatches vs Floyd-Warshall");
  o.Note(std::to_string(compared) + " small graphs match Floyd-Warshall exactly");
  o.Check(Aspl(testing::Petersen()) == 5.0 / 3.0, "Petersen ASPL 5/3");
  o.Check(Aspl(testing::Cycle(5)) == 1.5, "C5 ASPL 1.5");
  const double t = Seconds(start);
  o.Check(t < 10.0, "runtime under 10 s");
  o.Note(Num(t) + " s");
  return o;
}

Outcome RegulationSuite() {
  Outcome o;
  const auto start = Clock::now();
  const std::vector<AsplTarget> bins = {{3.0, 5.0}, {5.0, 7.0}};
  const auto outcomes = BatchGenerate(64, 3, bins, 10, 2024);
  for (const auto& b : outcomes) {
    int inside = 0;
    for (const auto& g : b.graphs) inside += b.target.Contains(Aspl(g)) && g.RegularDegree() == 3;
    o.Check(b.graphs.size() >= 9, "bin " + b.target.Label() + " filled " +
                                      std::to_string(b.graphs.size()) + "/10");
    o.Check(inside == static_cast<int>(b.graphs.size()),
            "bin " + b.target.Label() + " graph outside bin or irregular");
    o.Note("bin " + b.target.Label() + ": " + std::to_string(b.graphs.size()) + "/10, " +
           std::to_string(b.restarts_used) + " restarts");
  }
  const double t = Seconds(start);
  o.Check(t < 60.0, "runtime under 60 s");
  o.Note(Num(t) + " s");
  return o;
}

Outcome MaskingSuite() {
  Outcome o;
  const ModelSpec spec = DefaultModelSpec({1, 10, 10}, 4);
  const RelationalGraph g = GenerateRegularGraph(64, 3, 5);
  const MaskPlan plan = PlanForModel(spec, g);
  for (const auto& lm : plan.layers) {
    o.Check(lm.density() == 4.0 / 64.0, "layer " + std::to_string(lm.layer) + " density " +
                                            Num(lm.density()));
    o.Note("layer " + std::to_string(lm.layer) + " density " + Num(lm.density()));
  }
  o.Check(plan.layers.size() == 2, "two maskable layers");

  Network<float> net(spec);
  net.InitFanInUniform(9);
  net.ApplyMasks(plan);
  const Network<float> dirty = testing::WithGarbageInMaskedSlots(net, 10);
  Rng rng(11);
  int same = 0;
  for (int t = 0; t < 10; ++t) {
    std::vector<float> x(spec.input.size());
    for (float& v : x) v = static_cast<float>(rng.Uniform01());
    same += testing::SameOutputsAndGradients<float>(net, dirty, x, t % 4);
  }
  o.Check(same == 10, "garbage in masked slots changed outputs or gradients");
  o.Note("garbage oracle exact on " + std::to_string(same) + "/10 inputs");
  return o;
}

Outcome GradientSuite() {
  Outcome o;
  const auto start = Clock::now();
  const auto stats = testing::RunGradientSuite(1234, 20);
  o.Check(stats.failures == 0, stats.first_failure);
  o.Note(std::to_string(stats.checked) + " entries, worst relative error " +
         Num(stats.worst_relative));
  const double t = Seconds(start);
  o.Check(t < 30.0, "runtime under 30 s");
  o.Note(Num(t) + " s");
  return o;
}

Outcome SprtSuite() {
  Outcome o;
  const auto ref = DetectorCalibration::Make(0.2, 0.05, 0.05, 100, 0.02);
  const std::vector<DetectorCalibration> cals = {
      ref, DetectorCalibration::Make(0.5, 0.05, 0.05, 100, 0.25),
      DetectorCalibration::Make(0.3, 0.1, 0.2, 100, 0.1)};
  int mismatches = 0;
  for (const auto& cal : cals) mismatches += testing::SprtOracleMismatches(cal, 12);
  o.Check(mismatches == 0, std::to_string(mismatches) + " oracle mismatches");
  o.Note("3 calibrations x all trajectories n<=12 match the prefix oracle");

  const Verdict adv = SprtFromLabels(0, std::vector<int>(100, 1), ref);
  o.Check(adv.decision == Decision::kAdversarial && !adv.fallback && adv.models_used == 15,
          "all-disagree stops adversarial at 15");
  const Verdict nor = SprtFromLabels(0, std::vector<int>(100, 0), ref);
  o.Check(nor.decision == Decision::kNormal && !nor.fallback && nor.models_used == 59,
          "all-agree stops normal at 59");
  o.Note("stops at " + std::to_string(adv.models_used) + " / " +
         std::to_string(nor.models_used));
  o.Check(std::abs(ref.deny_bound() + 2.9444) <= 1e-4 &&
              std::abs(ref.accept_bound() - 2.9444) <= 1e-4,
          "DL/AL = -/+2.9444");
  o.Note("DL " + Num(ref.deny_bound()) + ", AL " + Num(ref.accept_bound()));
  return o;
}

Outcome AurocSuite() {
  Outcome o;
  Rng rng(2024);
  int exact = 0, tie_heavy = 0;
  for (int t = 0; t < 200; ++t) {
    const bool ties = t % 2 == 0;
    auto draw = [&] {
      std::vector<double> v(1 + rng.UniformIndex(100));
      for (double& x : v)
        x = ties ? static_cast<double>(rng.UniformIndex(5)) / 16.0 : rng.Uniform01();
      return v;
    };
    const auto n = draw(), a = draw();
    exact += Auroc(n, a) == testing::PairwiseAuroc(n, a);
    tie_heavy += ties;
  }
  o.Check(exact == 200, std::to_string(200 - exact) + " AUROC mismatches");
  o.Note(std::to_string(exact) + "/200 exact (" + std::to_string(tie_heavy) + " tie-heavy)");
  return o;
}

const ReportRow* FindRow(const EvaluationReport& r, const std::string& attack) {
  for (const auto& row : r.rows)
    if (row.attack == attack) return &row;
  return nullptr;
}

ExperimentConfig SmokeAt(const fs::path& out) {
  ExperimentConfig c = SmokeProfile();
  c.out = out.string();
  return c;
}

struct EndToEnd {
  EvaluationReport report;
  double seconds = 0.0;
  bool ok = false;
  std::string error;
};

EndToEnd RunSmoke(const fs::path& out) {
  EndToEnd e;
  fs::remove_all(out);
  const auto start = Clock::now();
  try {
    e.report = CmdReproduce(SmokeAt(out));
    e.ok = true;
  } catch (const std::exception& ex) {
    e.error = ex.what();
  }
  e.seconds = Seconds(start);
  return e;
}

Outcome EndToEndSuite(const EndToEnd& run) {
  Outcome o;
  if (!run.ok) {
    o.Check(false, "smoke reproduce threw: " + run.error);
    return o;
  }
  const ReportRow* normal = FindRow(run.report, "normal");
  const ReportRow* fgsm = FindRow(run.report, "FGSM");
  o.Check(normal && fgsm, "normal and FGSM rows present");
  if (!normal || !fgsm) return o;
  o.Check(run.report.ensemble.size == 16, "ensemble of 16");
  o.Check(fgsm->dsd && *fgsm->dsd > 2.0, "DSD > 2");
  o.Check(fgsm->auroc && *fgsm->auroc >= 0.85, "AUROC >= 0.85");
  o.Check(fgsm->detection_accuracy >= 0.80, "FGSM accuracy >= 0.80");
  o.Check(normal->detection_accuracy >= 0.90, "normal accuracy >= 0.90");
  for (const auto& row : run.report.rows)
    o.Check(row.mean_models_used < 100.0, row.attack + " mean models < 100");
  o.Check(run.seconds < 600.0, "runtime under 10 min");
  o.Note("ensemble " + std::to_string(run.report.ensemble.size) + ", DSD " +
         (fgsm->dsd ? Num(*fgsm->dsd) : "-") + ", AUROC " +
         (fgsm->auroc ? Num(*fgsm->auroc) : "-") + ", FGSM acc " +
         Num(fgsm->detection_accuracy) + " (n=" + std::to_string(fgsm->count) +
         "), normal acc " + Num(normal->detection_accuracy) + " (n=" +
         std::to_string(normal->count) + "), models " + Num(fgsm->mean_models_used) + "/" +
         Num(normal->mean_models_used) + ", " + Num(run.seconds) + " s");
  return o;
}

Outcome HighConfidenceSuite(const EndToEnd& run) {
  Outcome o;
  if (!run.ok) {
    o.Check(false, "smoke reproduce threw: " + run.error);
    return o;
  }
  const ReportRow* fgsm = FindRow(run.report, "FGSM");
  const ReportRow* hc = FindRow(run.report, "FGSM>0.9");
  o.Check(fgsm && hc, "FGSM and FGSM>0.9 rows present");
  if (!fgsm || !hc) return o;
  const double drop = fgsm->detection_accuracy - hc->detection_accuracy;
  o.Check(drop <= 0.10 + 1e-12, "accuracy drop <= 10 points");
  o.Note("FGSM " + Num(fgsm->detection_accuracy) + ", confidence>0.9 " +
         Num(hc->detection_accuracy) + " (n=" + std::to_string(hc->count) + "), drop " +
         Num(100 * drop) + " points");
  return o;
}

Outcome DeterminismSuite(const EndToEnd& first, const fs::path& first_out,
                         const fs::path& second_out) {
  Outcome o;
  if (!first.ok) {
    o.Check(false, "first run threw: " + first.error);
    return o;
  }
  // Second run with a different worker count.
  setenv("GGT_THREADS", "3", 1);
  const EndToEnd second = RunSmoke(second_out);
  unsetenv("GGT_THREADS");
  if (!second.ok) {
    o.Check(false, "second run threw: " + second.error);
    return o;
  }
  const std::string a = ReadFile(first_out / "report.json");
  const std::string b = ReadFile(second_out / "report.json");
  o.Check(a == b, "report.json differs between runs");
  o.Note(std::string(a == b ? "byte-identical" : "different") + " report.json (" +
         std::to_string(a.size()) + " bytes), second run " + Num(second.seconds) + " s");
  return o;
}

}  // namespace
}  // namespace ggt

int main() {
  using namespace ggt;
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };
  auto guarded = [](const std::function<Outcome()>& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      Outcome o;
      o.Check(false, std::string("threw: ") + e.what());
      return o;
    }
  };

  report(1, "graph suite", guarded(GraphSuite));
  report(2, "regulation suite", guarded(RegulationSuite));
  report(3, "masking suite", guarded(MaskingSuite));
  report(4, "gradient suite", guarded(GradientSuite));
  report(5, "SPRT suite", guarded(SprtSuite));
  report(6, "AUROC suite", guarded(AurocSuite));

  const fs::path root = "acceptance";
  const EndToEnd smoke = RunSmoke(root / "smoke_a");
  report(7, "end-to-end smoke run", guarded([&] { return EndToEndSuite(smoke); }));
  report(8, "high-confidence stress", guarded([&] { return HighConfidenceSuite(smoke); }));
  report(9, "determinism",
         guarded([&] { return DeterminismSuite(smoke, root / "smoke_a", root / "smoke_b"); }));

  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
