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

#ifndef GGT_DETECTOR_H_
#define GGT_DETECTOR_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ggt/masked_net.h"
#include "ggt/sample_forge.h"

namespace ggt {

inline constexpr double kDefaultSprtAlpha = 0.05;
inline constexpr double kDefaultSprtBeta = 0.05;
inline constexpr double kDefaultRelaxFraction = 0.1;
inline constexpr int kDefaultMaxModels = 100;

// Threshold on the label change rate plus the sequential test built around
// it. Under the "normal" hypothesis a pruned model disagrees with the
// original with probability threshold - relax, under "adversarial" with
// threshold + relax.
struct DetectorCalibration {
  double threshold = 0.0;
  double relax = 0.0;
  double alpha = kDefaultSprtAlpha;
  double beta = kDefaultSprtBeta;
  int max_models = kDefaultMaxModels;
  bool relax_clamped = false;

  // relax defaults to relax_fraction * threshold; it is clamped so that both
  // hypothesis rates stay inside (0, 1).
  static DetectorCalibration Make(double threshold, double alpha = kDefaultSprtAlpha,
                                  double beta = kDefaultSprtBeta,
                                  int max_models = kDefaultMaxModels,
                                  std::optional<double> relax = std::nullopt,
                                  double relax_fraction = kDefaultRelaxFraction);

  void Validate() const;
  double normal_rate() const { return threshold - relax; }
  double adversarial_rate() const { return threshold + relax; }
  // ln(beta / (1 - alpha)); at or below it the input is flagged adversarial.
  double deny_bound() const;
  // ln((1 - beta) / alpha); at or above it the input is accepted as normal.
  double accept_bound() const;
};

double LcrFromLabels(int original_label, std::span<const int> model_labels);
double Lcr(const MaskedModel& original, std::span<const MaskedModel> ensemble,
           std::span<const float> x);

enum class CalibrationMode { kYouden, kQuantile };

struct CalibrationOptions {
  CalibrationMode mode = CalibrationMode::kYouden;
  double quantile = 0.95;
  double alpha = kDefaultSprtAlpha;
  double beta = kDefaultSprtBeta;
  double relax_fraction = kDefaultRelaxFraction;
  int max_models = kDefaultMaxModels;
};

std::string CalibrationModeName(CalibrationMode mode);
CalibrationMode CalibrationModeFromName(const std::string& name);

// Youden: threshold maximizing TPR - FPR over the observed LCR values, placed
// midway between the optimal value and the next lower observed value.
// Quantile: the q-quantile of the normal LCRs. Throws kDegenerateCalibration
// when the scores cannot define a threshold in (0, 1).
DetectorCalibration CalibrateFromScores(std::span<const double> normal_lcr,
                                        std::span<const double> adversarial_lcr,
                                        const CalibrationOptions& options);

enum class Decision { kAdversarial, kNormal };

struct Verdict {
  Decision decision = Decision::kNormal;
  // Set when the stream ran out before either bound was crossed; the
  // decision then compares label_changes / models_used to the threshold.
  bool fallback = false;
  int models_used = 0;
  int label_changes = 0;
  double log_ratio = 0.0;
};

// ln of the likelihood ratio after n models with z label changes.
double SprtLogRatio(int n, int z, const DetectorCalibration& cal);

// Sequential test over up to min(available, max_models) models;
// disagrees(i) reports whether model i's label differs from the original's.
Verdict SprtDecide(const std::function<bool(int)>& disagrees, int available,
                   const DetectorCalibration& cal);
Verdict SprtFromLabels(int original_label, std::span<const int> model_labels,
                       const DetectorCalibration& cal);
// Runs pruned models lazily, in stream order, until the test stops.
Verdict SprtDetect(const MaskedModel& original, std::span<const MaskedModel> stream,
                   std::span<const float> x, const DetectorCalibration& cal);

// Predicted labels of the original and of every ensemble model (columns in
// SPRT order) for a list of samples.
struct LabelMatrix {
  std::vector<int64_t> sample_ids;
  std::vector<int> y_true;
  std::vector<int> original_label;
  size_t model_count = 0;
  std::vector<int> labels;  // row-major [sample][model]

  size_t rows() const { return sample_ids.size(); }
  std::span<const int> Row(size_t r) const {
    return {labels.data() + r * model_count, model_count};
  }
  double RowLcr(size_t r) const { return LcrFromLabels(original_label[r], Row(r)); }
};

LabelMatrix ComputeLabelMatrix(const MaskedModel& original, std::span<const MaskedModel> ensemble,
                               const std::vector<LabeledSample>& samples, int threads = 0);

// CSV: sample_id,y_true,original_label,model_0,...
void SaveLabelMatrixCsv(const LabelMatrix& m, const std::filesystem::path& path);
LabelMatrix LoadLabelMatrixCsv(const std::filesystem::path& path);

struct DetectionSummary {
  SampleKind kind = SampleKind::kNormal;
  size_t count = 0;
  // Adversarial kinds: fraction flagged adversarial; normal: fraction passed.
  double accuracy = 0.0;
  double flagged_adversarial_rate = 0.0;
  double mean_models_used = 0.0;
  double mean_lcr = 0.0;
  std::vector<double> lcrs;
};

// One summary per kind present, in the order normal, WL, FGSM. `kinds[r]` is
// the kind of matrix row r.
std::vector<DetectionSummary> EvaluateDetection(const LabelMatrix& matrix,
                                                std::span<const SampleKind> kinds,
                                                const DetectorCalibration& cal);
std::vector<DetectionSummary> EvaluateDetection(const MaskedModel& original,
                                                std::span<const MaskedModel> ensemble,
                                                const std::vector<LabeledSample>& corpus,
                                                const DetectorCalibration& cal);

}  // namespace ggt

#endif  // GGT_DETECTOR_H_
