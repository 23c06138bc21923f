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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ggt/aspl_regulator.h"
#include "ggt/config.h"
#include "ggt/detector.h"
#include "ggt/graph.h"
#include "ggt/metrics.h"
#include "ggt/pipeline.h"

namespace py = pybind11;

namespace {

// JSON crosses the boundary as text; Python parses it with the json module.
std::string ReportJson(const ggt::EvaluationReport& r) { return ggt::RenderReportJson(r); }

ggt::ExperimentConfig ConfigFromText(const std::string& profile, const std::string& overlay) {
  const auto base = ggt::ProfileByName(profile);
  auto c = overlay.empty() ? base : ggt::ConfigFromJson(nlohmann::json::parse(overlay), base);
  c.Validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_ggt, m) {
  m.doc() = "Graph-guided testing core";

  py::register_exception<ggt::Error>(m, "GgtError", PyExc_RuntimeError);

  py::class_<ggt::RelationalGraph>(m, "RelationalGraph")
      .def_property_readonly("node_count", &ggt::RelationalGraph::node_count)
      .def("degree", &ggt::RelationalGraph::Degree)
      .def("has_edge", &ggt::RelationalGraph::HasEdge)
      .def("edges", &ggt::RelationalGraph::Edges)
      .def("to_json", [](const ggt::RelationalGraph& g) { return ggt::GraphToJson(g); })
      .def("sha256", [](const ggt::RelationalGraph& g) { return ggt::GraphHash(g); });

  m.def("generate_regular_graph",
        [](int n, int k, uint64_t seed) { return ggt::GenerateRegularGraph(n, k, seed); },
        py::arg("n"), py::arg("k"), py::arg("seed"));
  m.def("graph_from_edges", [](int n, const std::vector<ggt::Edge>& edges) {
    return ggt::RelationalGraph::FromEdges(n, edges);
  });
  m.def("graph_from_json", &ggt::GraphFromJson);
  m.def("aspl", &ggt::Aspl);
  m.def("regulate_aspl",
        [](const ggt::RelationalGraph& g, double lower, double upper, uint64_t seed) {
          ggt::AsplTarget t;
          t.lower = lower;
          t.upper = upper;
          auto r = ggt::RegulateAspl(g, t, seed);
          return std::make_pair(std::move(r.graph), r.aspl);
        },
        py::arg("graph"), py::arg("lower"), py::arg("upper"), py::arg("seed"));

  m.def("lcr", [](int original, const std::vector<int>& labels) {
    return ggt::LcrFromLabels(original, labels);
  });
  m.def("auroc", [](const std::vector<double>& normal, const std::vector<double>& adv) {
    return ggt::Auroc(normal, adv);
  });
  m.def("dsd", [](const std::vector<double>& normal, const std::vector<double>& adv) {
    return ggt::Dsd(normal, adv);
  });

  py::class_<ggt::DetectorCalibration>(m, "DetectorCalibration")
      .def(py::init([](double threshold, double alpha, double beta, int max_models,
                       std::optional<double> relax) {
             return ggt::DetectorCalibration::Make(threshold, alpha, beta, max_models, relax);
           }),
           py::arg("threshold"), py::arg("alpha") = ggt::kDefaultSprtAlpha,
           py::arg("beta") = ggt::kDefaultSprtBeta, py::arg("max_models") = ggt::kDefaultMaxModels,
           py::arg("relax") = std::nullopt)
      .def_readonly("threshold", &ggt::DetectorCalibration::threshold)
      .def_readonly("relax", &ggt::DetectorCalibration::relax)
      .def_readonly("relax_clamped", &ggt::DetectorCalibration::relax_clamped)
      .def_property_readonly("deny_bound", &ggt::DetectorCalibration::deny_bound)
      .def_property_readonly("accept_bound", &ggt::DetectorCalibration::accept_bound);

  m.def("calibrate",
        [](const std::vector<double>& normal, const std::vector<double>& adv,
           const std::string& mode, double quantile) {
          ggt::CalibrationOptions o;
          o.mode = ggt::CalibrationModeFromName(mode);
          o.quantile = quantile;
          return ggt::CalibrateFromScores(normal, adv, o);
        },
        py::arg("normal"), py::arg("adversarial"), py::arg("mode") = "youden",
        py::arg("quantile") = 0.95);

  m.def("sprt",
        [](int original, const std::vector<int>& labels, const ggt::DetectorCalibration& cal) {
          const auto v = ggt::SprtFromLabels(original, labels, cal);
          py::dict d;
          d["adversarial"] = v.decision == ggt::Decision::kAdversarial;
          d["fallback"] = v.fallback;
          d["models_used"] = v.models_used;
          d["label_changes"] = v.label_changes;
          d["log_ratio"] = v.log_ratio;
          return d;
        });

  m.def("config_json",
        [](const std::string& profile, const std::string& overlay) {
          return ggt::ConfigToJson(ConfigFromText(profile, overlay)).dump();
        },
        py::arg("profile") = "smoke", py::arg("overlay") = "");
  m.def("reproduce",
        [](const std::string& profile, const std::string& overlay) {
          const auto c = ConfigFromText(profile, overlay);
          py::gil_scoped_release release;
          return ReportJson(ggt::CmdReproduce(c));
        },
        py::arg("profile") = "smoke", py::arg("overlay") = "");
  m.def("render_report", [](const std::string& path) {
    return ggt::RenderReportText(ggt::LoadReport(path));
  });
}
