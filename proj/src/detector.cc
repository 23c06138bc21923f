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

#include "ggt/detector.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ggt/error.h"
#include "ggt/io.h"
#include "ggt/parallel.h"

namespace ggt {

DetectorCalibration DetectorCalibration::Make(double threshold, double alpha, double beta,
                                              int max_models, std::optional<double> relax,
                                              double relax_fraction) {
  Require(threshold > 0.0 && threshold < 1.0, ErrorKind::kDegenerateCalibration,
          "threshold " + std::to_string(threshold) + " outside (0, 1)");
  DetectorCalibration cal;
  cal.threshold = threshold;
  cal.alpha = alpha;
  cal.beta = beta;
  cal.max_models = max_models;
  cal.relax = relax.value_or(relax_fraction * threshold);
  Require(cal.relax > 0.0, ErrorKind::kInvalidArgument, "relax scale must be > 0");
  if (threshold - cal.relax <= 0.0) {
    cal.relax = threshold / 2.0;
    cal.relax_clamped = true;
  }
  if (threshold + cal.relax >= 1.0) {
    cal.relax = (1.0 - threshold) / 2.0;
    cal.relax_clamped = true;
  }
  cal.Validate();
  return cal;
}

void DetectorCalibration::Validate() const {
  Require(threshold > 0.0 && threshold < 1.0, ErrorKind::kInvalidArgument,
          "threshold must be in (0, 1)");
  Require(relax > 0.0 && normal_rate() > 0.0 && adversarial_rate() < 1.0,
          ErrorKind::kInvalidArgument, "relax scale must keep both rates inside (0, 1)");
  Require(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0 && alpha + beta < 1.0,
          ErrorKind::kInvalidArgument, "alpha, beta must be in (0, 1) with alpha + beta < 1");
  Require(max_models >= 1, ErrorKind::kInvalidArgument, "max_models must be positive");
}

double DetectorCalibration::deny_bound() const { return std::log(beta / (1.0 - alpha)); }
double DetectorCalibration::accept_bound() const { return std::log((1.0 - beta) / alpha); }

double LcrFromLabels(int original_label, std::span<const int> model_labels) {
  Require(!model_labels.empty(), ErrorKind::kEmptyEnsemble, "LCR needs at least one model");
  const auto changed = std::count_if(model_labels.begin(), model_labels.end(),
                                     [&](int l) { return l != original_label; });
  return static_cast<double>(changed) / static_cast<double>(model_labels.size());
}

double Lcr(const MaskedModel& original, std::span<const MaskedModel> ensemble,
           std::span<const float> x) {
  Require(!ensemble.empty(), ErrorKind::kEmptyEnsemble, "LCR needs at least one model");
  const int base = original.PredictLabel(x);
  std::vector<int> labels;
  labels.reserve(ensemble.size());
  for (const auto& m : ensemble) labels.push_back(m.PredictLabel(x));
  return LcrFromLabels(base, labels);
}

std::string CalibrationModeName(CalibrationMode mode) {
  return mode == CalibrationMode::kYouden ? "youden" : "quantile";
}

CalibrationMode CalibrationModeFromName(const std::string& name) {
  if (name == "youden") return CalibrationMode::kYouden;
  if (name == "quantile") return CalibrationMode::kQuantile;
  Fail(ErrorKind::kConfig, "unknown calibration mode '" + name + "'");
}

namespace {

double YoudenThreshold(std::span<const double> normal, std::span<const double> adversarial) {
  std::vector<double> values(normal.begin(), normal.end());
  values.insert(values.end(), adversarial.begin(), adversarial.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  Require(values.size() >= 2, ErrorKind::kDegenerateCalibration, "all LCR values are identical");

  auto rate_at_or_above = [](std::span<const double> s, double v) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double x) { return x >= v; })) /
           static_cast<double>(s.size());
  };
  size_t best = 0;
  double best_j = -2.0;
  for (size_t i = 0; i < values.size(); ++i) {
    const double j = rate_at_or_above(adversarial, values[i]) - rate_at_or_above(normal, values[i]);
    if (j > best_j) {
      best_j = j;
      best = i;
    }
  }
  const double below = best > 0 ? values[best - 1] : 0.0;
  return 0.5 * (below + values[best]);
}

double Quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

DetectorCalibration CalibrateFromScores(std::span<const double> normal_lcr,
                                        std::span<const double> adversarial_lcr,
                                        const CalibrationOptions& options) {
  Require(!normal_lcr.empty(), ErrorKind::kInvalidArgument, "calibration needs normal samples");
  double threshold = 0.0;
  if (options.mode == CalibrationMode::kYouden) {
    Require(!adversarial_lcr.empty(), ErrorKind::kInvalidArgument,
            "youden calibration needs adversarial samples");
    threshold = YoudenThreshold(normal_lcr, adversarial_lcr);
  } else {
    Require(options.quantile > 0.0 && options.quantile < 1.0, ErrorKind::kInvalidArgument,
            "quantile must be in (0, 1)");
    const auto [lo, hi] = std::minmax_element(normal_lcr.begin(), normal_lcr.end());
    Require(*lo != *hi, ErrorKind::kDegenerateCalibration, "all normal LCR values are identical");
    threshold = Quantile({normal_lcr.begin(), normal_lcr.end()}, options.quantile);
  }
  return DetectorCalibration::Make(threshold, options.alpha, options.beta, options.max_models,
                                   std::nullopt, options.relax_fraction);
}

double SprtLogRatio(int n, int z, const DetectorCalibration& cal) {
  const double p1 = cal.normal_rate(), p0 = cal.adversarial_rate();
  return z * std::log(p1 / p0) + (n - z) * std::log((1.0 - p1) / (1.0 - p0));
}

Verdict SprtDecide(const std::function<bool(int)>& disagrees, int available,
                   const DetectorCalibration& cal) {
  cal.Validate();
  const int limit = std::min(available, cal.max_models);
  Require(limit >= 1, ErrorKind::kEmptyEnsemble, "SPRT needs at least one pruned model");
  const double deny = cal.deny_bound(), accept = cal.accept_bound();
  Verdict v;
  for (int i = 0; i < limit; ++i) {
    ++v.models_used;
    if (disagrees(i)) ++v.label_changes;
    v.log_ratio = SprtLogRatio(v.models_used, v.label_changes, cal);
    if (v.log_ratio <= deny) {
      v.decision = Decision::kAdversarial;
      return v;
    }
    if (v.log_ratio >= accept) {
      v.decision = Decision::kNormal;
      return v;
    }
  }
  v.fallback = true;
  const double rate = static_cast<double>(v.label_changes) / v.models_used;
  v.decision = rate >= cal.threshold ? Decision::kAdversarial : Decision::kNormal;
  return v;
}

Verdict SprtFromLabels(int original_label, std::span<const int> model_labels,
                       const DetectorCalibration& cal) {
  return SprtDecide([&](int i) { return model_labels[i] != original_label; },
                    static_cast<int>(model_labels.size()), cal);
}

Verdict SprtDetect(const MaskedModel& original, std::span<const MaskedModel> stream,
                   std::span<const float> x, const DetectorCalibration& cal) {
  const int base = original.PredictLabel(x);
  return SprtDecide([&](int i) { return stream[i].PredictLabel(x) != base; },
                    static_cast<int>(stream.size()), cal);
}

LabelMatrix ComputeLabelMatrix(const MaskedModel& original, std::span<const MaskedModel> ensemble,
                               const std::vector<LabeledSample>& samples, int threads) {
  Require(!ensemble.empty(), ErrorKind::kEmptyEnsemble, "label matrix needs pruned models");
  LabelMatrix m;
  m.model_count = ensemble.size();
  m.sample_ids.resize(samples.size());
  m.y_true.resize(samples.size());
  m.original_label.resize(samples.size());
  m.labels.resize(samples.size() * ensemble.size());
  std::vector<Evaluator<float>> evaluators;
  evaluators.reserve(ensemble.size() + 1);
  evaluators.emplace_back(original.network());
  for (const auto& model : ensemble) evaluators.emplace_back(model.network());
  ParallelFor(samples.size(), threads, [&](size_t r) {
    Activations<float> acts;
    m.sample_ids[r] = static_cast<int64_t>(r);
    m.y_true[r] = samples[r].y_true;
    evaluators[0].Forward(samples[r].x, acts);
    m.original_label[r] = ArgMax(acts.probabilities);
    for (size_t j = 0; j < ensemble.size(); ++j) {
      evaluators[j + 1].Forward(samples[r].x, acts);
      m.labels[r * ensemble.size() + j] = ArgMax(acts.probabilities);
    }
  });
  return m;
}

void SaveLabelMatrixCsv(const LabelMatrix& m, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "sample_id,y_true,original_label";
  for (size_t j = 0; j < m.model_count; ++j) out << ",model_" << j;
  out << '\n';
  for (size_t r = 0; r < m.rows(); ++r) {
    out << m.sample_ids[r] << ',' << m.y_true[r] << ',' << m.original_label[r];
    for (int l : m.Row(r)) out << ',' << l;
    out << '\n';
  }
  WriteFile(path, out.str());
}

LabelMatrix LoadLabelMatrixCsv(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)), ErrorKind::kFormat,
          path.string() + ": empty label matrix");
  LabelMatrix m;
  m.model_count = static_cast<size_t>(std::count(line.begin(), line.end(), ',')) - 2;
  Require(line.rfind("sample_id,y_true,original_label", 0) == 0, ErrorKind::kFormat,
          path.string() + ": unexpected header");
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<int64_t> values;
    while (std::getline(fields, cell, ',')) {
      try {
        values.push_back(std::stoll(cell));
      } catch (const std::exception&) {
        Fail(ErrorKind::kFormat, path.string() + ":" + std::to_string(row) + ": bad value");
      }
    }
    Require(values.size() == m.model_count + 3, ErrorKind::kFormat,
            path.string() + ":" + std::to_string(row) + ": wrong column count");
    m.sample_ids.push_back(values[0]);
    m.y_true.push_back(static_cast<int>(values[1]));
    m.original_label.push_back(static_cast<int>(values[2]));
    for (size_t j = 3; j < values.size(); ++j) m.labels.push_back(static_cast<int>(values[j]));
  }
  return m;
}

std::vector<DetectionSummary> EvaluateDetection(const LabelMatrix& matrix,
                                                std::span<const SampleKind> kinds,
                                                const DetectorCalibration& cal) {
  Require(kinds.size() == matrix.rows(), ErrorKind::kShapeMismatch,
          "one sample kind per label-matrix row required");
  std::map<SampleKind, DetectionSummary> by_kind;
  for (size_t r = 0; r < matrix.rows(); ++r) {
    DetectionSummary& s = by_kind[kinds[r]];
    s.kind = kinds[r];
    const Verdict v = SprtFromLabels(matrix.original_label[r], matrix.Row(r), cal);
    const bool flagged = v.decision == Decision::kAdversarial;
    const bool correct = (kinds[r] == SampleKind::kNormal) ? !flagged : flagged;
    ++s.count;
    s.accuracy += correct;
    s.flagged_adversarial_rate += flagged;
    s.mean_models_used += v.models_used;
    const double lcr = matrix.RowLcr(r);
    s.mean_lcr += lcr;
    s.lcrs.push_back(lcr);
  }
  std::vector<DetectionSummary> out;
  for (auto& [kind, s] : by_kind) {
    const double n = static_cast<double>(s.count);
    s.accuracy /= n;
    s.flagged_adversarial_rate /= n;
    s.mean_models_used /= n;
    s.mean_lcr /= n;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<DetectionSummary> EvaluateDetection(const MaskedModel& original,
                                                std::span<const MaskedModel> ensemble,
                                                const std::vector<LabeledSample>& corpus,
                                                const DetectorCalibration& cal) {
  const LabelMatrix m = ComputeLabelMatrix(original, ensemble, corpus);
  std::vector<SampleKind> kinds;
  for (const auto& s : corpus) kinds.push_back(s.kind);
  return EvaluateDetection(m, kinds, cal);
}

}  // namespace ggt
