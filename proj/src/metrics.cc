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

#include "ggt/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "ggt/error.h"
#include "ggt/io.h"

namespace ggt {
namespace {

using json = nlohmann::json;

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string Fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

json OptionalNumber(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  return *v;
}

std::optional<double> ReadOptionalNumber(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    Fail(ErrorKind::kFormat, "unexpected number string '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

double Auroc(std::span<const double> normal, std::span<const double> adversarial) {
  Require(!normal.empty() && !adversarial.empty(), ErrorKind::kInvalidArgument,
          "AUROC needs both normal and adversarial scores");
  struct Item {
    double v;
    bool adversarial;
  };
  std::vector<Item> all;
  all.reserve(normal.size() + adversarial.size());
  for (double v : normal) all.push_back({v, false});
  for (double v : adversarial) all.push_back({v, true});
  std::sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.v < b.v; });

  // Twice the rank sum of the adversarial scores, ranks 1-based with ties at
  // their midrank; everything stays integral.
  uint64_t doubled_rank_sum = 0;
  for (size_t i = 0; i < all.size();) {
    size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    const uint64_t doubled_midrank = (i + 1) + j;
    for (size_t t = i; t < j; ++t)
      if (all[t].adversarial) doubled_rank_sum += doubled_midrank;
    i = j;
  }
  const uint64_t na = adversarial.size(), nn = normal.size();
  const uint64_t doubled_u = doubled_rank_sum - na * (na + 1);
  return static_cast<double>(doubled_u) / static_cast<double>(2 * na * nn);
}

double Dsd(std::span<const double> normal_lcr, std::span<const double> adversarial_lcr) {
  Require(!normal_lcr.empty() && !adversarial_lcr.empty(), ErrorKind::kInvalidArgument,
          "DSD needs both normal and adversarial LCRs");
  const double n = Mean(normal_lcr);
  if (n == 0.0) return std::numeric_limits<double>::infinity();
  return Mean(adversarial_lcr) / n;
}

std::vector<ReportRow> BuildReportRows(const std::vector<DetectionSummary>& summaries) {
  Require(!summaries.empty(), ErrorKind::kInvalidArgument, "report needs at least one row");
  const DetectionSummary* normal = nullptr;
  for (const auto& s : summaries)
    if (s.kind == SampleKind::kNormal) normal = &s;
  std::vector<ReportRow> rows;
  auto base_row = [](const DetectionSummary& s) {
    Require(s.count > 0, ErrorKind::kInvalidArgument,
            "empty sample set for " + SampleKindName(s.kind));
    ReportRow r;
    r.attack = SampleKindName(s.kind);
    r.count = s.count;
    r.detection_accuracy = s.accuracy;
    r.mean_models_used = s.mean_models_used;
    r.mean_lcr = s.mean_lcr;
    return r;
  };
  if (normal) rows.push_back(base_row(*normal));
  for (const auto& s : summaries) {
    if (s.kind == SampleKind::kNormal) continue;
    ReportRow r = base_row(s);
    if (normal) {
      r.auroc = Auroc(normal->lcrs, s.lcrs);
      r.dsd = Dsd(normal->lcrs, s.lcrs);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

json ReportToJson(const EvaluationReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"attack", r.attack},
                    {"count", r.count},
                    {"detection_accuracy", r.detection_accuracy},
                    {"mean_models_used", r.mean_models_used},
                    {"auroc", OptionalNumber(r.auroc)},
                    {"mean_lcr", r.mean_lcr},
                    {"dsd", OptionalNumber(r.dsd)}});
  }
  const auto& e = report.ensemble;
  const auto& c = report.calibration;
  return {
      {"schema", kReportSchema},
      {"rows", rows},
      {"ensemble",
       {{"n", e.node_count},
        {"k", e.degree},
        {"bin", e.bin},
        {"size", e.size},
        {"graph_hashes", e.graph_hashes}}},
      {"calibration",
       {{"mode", report.calibration_mode},
        {"threshold", c.threshold},
        {"relax", c.relax},
        {"relax_clamped", c.relax_clamped},
        {"alpha", c.alpha},
        {"beta", c.beta},
        {"max_models", c.max_models},
        {"deny_bound", c.deny_bound()},
        {"accept_bound", c.accept_bound()}}},
      {"provenance", report.provenance},
  };
}

EvaluationReport ReportFromJson(const json& j) {
  EvaluationReport report;
  try {
    Require(j.at("schema").get<std::string>() == kReportSchema, ErrorKind::kFormat,
            "unsupported report schema");
    for (const auto& jr : j.at("rows")) {
      ReportRow r;
      r.attack = jr.at("attack").get<std::string>();
      r.count = jr.at("count").get<size_t>();
      r.detection_accuracy = jr.at("detection_accuracy").get<double>();
      r.mean_models_used = jr.at("mean_models_used").get<double>();
      r.auroc = ReadOptionalNumber(jr.at("auroc"));
      r.mean_lcr = jr.at("mean_lcr").get<double>();
      r.dsd = ReadOptionalNumber(jr.at("dsd"));
      report.rows.push_back(std::move(r));
    }
    const auto& je = j.at("ensemble");
    report.ensemble = {je.at("n").get<int>(), je.at("k").get<int>(),
                       je.at("bin").get<std::string>(), je.at("size").get<size_t>(),
                       je.at("graph_hashes").get<std::vector<std::string>>()};
    const auto& jc = j.at("calibration");
    report.calibration_mode = jc.at("mode").get<std::string>();
    auto& c = report.calibration;
    c.threshold = jc.at("threshold").get<double>();
    c.relax = jc.at("relax").get<double>();
    c.relax_clamped = jc.at("relax_clamped").get<bool>();
    c.alpha = jc.at("alpha").get<double>();
    c.beta = jc.at("beta").get<double>();
    c.max_models = jc.at("max_models").get<int>();
    report.provenance = j.value("provenance", json::object());
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("report: ") + e.what());
  }
  return report;
}

std::string RenderReportJson(const EvaluationReport& report) {
  return ReportToJson(report).dump(2) + "\n";
}

std::string RenderReportText(const EvaluationReport& report) {
  const std::vector<std::string> header = {"attack", "count",    "accuracy", "mean_models",
                                           "auroc",  "mean_lcr", "dsd"};
  std::vector<std::vector<std::string>> cells = {header};
  for (const auto& r : report.rows) {
    cells.push_back({r.attack, std::to_string(r.count), Fmt(r.detection_accuracy),
                     Fmt(r.mean_models_used), r.auroc ? Fmt(*r.auroc) : "-", Fmt(r.mean_lcr),
                     r.dsd ? Fmt(*r.dsd) : "-"});
  }
  std::vector<size_t> width(header.size(), 0);
  for (const auto& row : cells)
    for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::ostringstream out;
  const auto& e = report.ensemble;
  out << "ensemble: N=" << e.node_count << " k=" << e.degree << " bin=" << e.bin
      << " size=" << e.size << "\n";
  out << "calibration: mode=" << report.calibration_mode
      << " threshold=" << Fmt(report.calibration.threshold)
      << " relax=" << Fmt(report.calibration.relax)
      << " alpha=" << Fmt(report.calibration.alpha) << " beta=" << Fmt(report.calibration.beta)
      << " max_models=" << report.calibration.max_models << "\n";
  for (const auto& row : cells) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      out << row[c];
      if (c + 1 < row.size()) out << std::string(width[c] - row[c].size(), ' ');
    }
    out << "\n";
  }
  return out.str();
}

EvaluationReport LoadReport(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
  return ReportFromJson(j);
}

}  // namespace ggt
