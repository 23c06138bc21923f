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

#ifndef GGT_METRICS_H_
#define GGT_METRICS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ggt/detector.h"

namespace ggt {

inline constexpr char kReportSchema[] = "ggt-report/1";

// Probability that a random adversarial score exceeds a random normal one,
// ties counted half. Exact for any input (midrank statistic).
double Auroc(std::span<const double> normal, std::span<const double> adversarial);

// Mean adversarial LCR over mean normal LCR; +infinity when the normal mean
// is zero.
double Dsd(std::span<const double> normal_lcr, std::span<const double> adversarial_lcr);

struct ReportRow {
  std::string attack;
  size_t count = 0;
  double detection_accuracy = 0.0;
  double mean_models_used = 0.0;
  std::optional<double> auroc;  // adversarial rows only
  double mean_lcr = 0.0;
  std::optional<double> dsd;    // adversarial rows only; may be +inf
  bool operator==(const ReportRow&) const = default;
};

struct EnsembleInfo {
  int node_count = 0;
  int degree = 0;
  std::string bin;
  size_t size = 0;
  std::vector<std::string> graph_hashes;
  bool operator==(const EnsembleInfo&) const = default;
};

struct EvaluationReport {
  std::vector<ReportRow> rows;
  EnsembleInfo ensemble;
  DetectorCalibration calibration;
  std::string calibration_mode = "youden";
  nlohmann::json provenance = nlohmann::json::object();
};

// Rows from per-kind detection summaries: the normal row first, then one row
// per adversarial kind scored against the normal LCRs.
std::vector<ReportRow> BuildReportRows(const std::vector<DetectionSummary>& summaries);

nlohmann::json ReportToJson(const EvaluationReport& report);
EvaluationReport ReportFromJson(const nlohmann::json& j);
std::string RenderReportJson(const EvaluationReport& report);
std::string RenderReportText(const EvaluationReport& report);
EvaluationReport LoadReport(const std::filesystem::path& path);

}  // namespace ggt

#endif  // GGT_METRICS_H_
