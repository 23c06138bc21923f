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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "test_util.h"

namespace ggt {
namespace {

using testing::ScratchDir;

constexpr Shape3 kShape{1, 8, 8};

// Oracle: nearest class mean computed from the training split.
double NearestCentroidAccuracy(const DatasetSplits& d, int classes) {
  const size_t dim = d.train.shape.size();
  std::vector<std::vector<double>> mean(classes, std::vector<double>(dim, 0.0));
  std::vector<int> count(classes, 0);
  for (size_t i = 0; i < d.train.size(); ++i) {
    const auto x = d.train.Input(i);
    ++count[d.train.labels[i]];
    for (size_t k = 0; k < dim; ++k) mean[d.train.labels[i]][k] += x[k];
  }
  for (int c = 0; c < classes; ++c)
    for (double& v : mean[c]) v /= count[c];
  int correct = 0;
  for (size_t i = 0; i < d.test.size(); ++i) {
    const auto x = d.test.Input(i);
    int best = 0;
    double best_d = INFINITY;
    for (int c = 0; c < classes; ++c) {
      double s = 0;
      for (size_t k = 0; k < dim; ++k) s += (x[k] - mean[c][k]) * (x[k] - mean[c][k]);
      if (s < best_d) best_d = s, best = c;
    }
    correct += best == d.test.labels[i];
  }
  return static_cast<double>(correct) / d.test.size();
}

TEST(DatasetTest, DeterministicSplitAndRange) {
  const auto a = MakeDataset(3, 40, kShape, 5);
  const auto b = MakeDataset(3, 40, kShape, 5);
  EXPECT_EQ(a.train.inputs, b.train.inputs);
  EXPECT_EQ(a.test.labels, b.test.labels);
  EXPECT_EQ(a.train.size(), 84u);
  EXPECT_EQ(a.validation.size(), 18u);
  EXPECT_EQ(a.test.size(), 18u);
  for (const auto* s : {&a.train, &a.validation, &a.test})
    for (float v : s->inputs) ASSERT_TRUE(v >= 0.0f && v <= 1.0f);
  const auto c = MakeDataset(3, 40, kShape, 6);
  EXPECT_NE(a.train.inputs, c.train.inputs);
}

TEST(DatasetTest, HighSeparationIsEasyForNearestCentroid) {
  DatasetOptions opt;
  opt.separation = 1.0;
  opt.noise = 0.05;
  opt.max_blend = 0.1;
  EXPECT_GE(NearestCentroidAccuracy(MakeDataset(4, 100, kShape, 3, opt), 4), 0.95);
}

TEST(DatasetTest, RejectsTinyClasses) {
  EXPECT_GGT_ERROR(MakeDataset(4, 5, kShape, 1), ErrorKind::kInvalidArgument);
  EXPECT_GGT_ERROR(MakeDataset(1, 50, kShape, 1), ErrorKind::kInvalidArgument);
}

TEST(DatasetTest, CsvLoader) {
  const auto dir = ScratchDir("csv_set");
  std::ofstream(dir / "s.csv") << "1,0.1,0.2\n0,0.3,0.4\n";
  const LabeledSet s = LoadCsvSet(dir / "s.csv", {1, 1, 2});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.labels, (std::vector<int>{1, 0}));
  EXPECT_FLOAT_EQ(s.Input(1)[1], 0.4f);
  std::ofstream(dir / "bad.csv") << "1,0.1\n";
  EXPECT_GGT_ERROR(LoadCsvSet(dir / "bad.csv", {1, 1, 2}), ErrorKind::kShapeMismatch);
  std::ofstream(dir / "nan.csv") << "1,x,0.1\n";
  EXPECT_GGT_ERROR(LoadCsvSet(dir / "nan.csv", {1, 1, 2}), ErrorKind::kFormat);
}

class AttackTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new DatasetSplits(MakeDataset(4, 60, kShape, 11));
    TrainHyper hyper;
    hyper.epochs = 8;
    hyper.seed = 2;
    model_ = new MaskedModel(
        Train(MaskedModel::Create(DefaultModelSpec(kShape, 4, 8), 1), data_->train, nullptr, hyper));
  }
  static void TearDownTestSuite() {
    delete data_;
    delete model_;
  }
  static DatasetSplits* data_;
  static MaskedModel* model_;
};
DatasetSplits* AttackTest::data_ = nullptr;
MaskedModel* AttackTest::model_ = nullptr;

TEST_F(AttackTest, NormalsAndWrongLabelsPartitionTheSet) {
  const auto normals = HarvestNormals(*model_, data_->test);
  const auto wl = HarvestWrongLabels(*model_, data_->test);
  EXPECT_EQ(normals.size() + wl.size(), data_->test.size());
  for (const auto& s : normals) EXPECT_EQ(model_->PredictLabel(s.x), s.y_true);
  for (const auto& s : wl) {
    EXPECT_NE(model_->PredictLabel(s.x), s.y_true);
    EXPECT_EQ(s.kind, SampleKind::kWrongLabel);
  }
}

TEST_F(AttackTest, ZeroEpsilonNeverFools) {
  for (const auto& s : HarvestNormals(*model_, data_->test))
    EXPECT_FALSE(Fgsm(*model_, s, 0.0).has_value());
}

TEST_F(AttackTest, PerturbationIsBoundedAndFools) {
  const double eps = 0.1;
  const auto normals = HarvestNormals(*model_, data_->test);
  const auto adv = GenerateFgsm(*model_, data_->test, eps, 2);
  ASSERT_FALSE(adv.empty());
  for (const auto& a : adv) {
    const auto src = data_->test.Input(a.source_index);
    for (size_t k = 0; k < a.x.size(); ++k) {
      EXPECT_LE(std::abs(a.x[k] - src[k]), eps + 1e-6);
      EXPECT_TRUE(a.x[k] >= 0.0f && a.x[k] <= 1.0f);
    }
    const auto probs = model_->Forward(a.x);
    EXPECT_NE(ArgMax(probs), a.y_true);
    EXPECT_FLOAT_EQ(a.confidence, probs[ArgMax(probs)]);
    EXPECT_EQ(a.kind, SampleKind::kFgsm);
  }
  // Single-threaded gives the same corpus.
  const auto again = GenerateFgsm(*model_, data_->test, eps, 1);
  ASSERT_EQ(again.size(), adv.size());
  for (size_t i = 0; i < adv.size(); ++i) EXPECT_EQ(again[i].x, adv[i].x);
}

TEST_F(AttackTest, RequiresCorrectlyClassifiedSource) {
  const auto wl = HarvestWrongLabels(*model_, data_->train);
  if (wl.empty()) GTEST_SKIP() << "model fits the training split perfectly";
  EXPECT_GGT_ERROR(Fgsm(*model_, wl[0], 0.1), ErrorKind::kInvalidArgument);
}

std::vector<LabeledSample> WithConfidences(std::vector<float> c) {
  std::vector<LabeledSample> out;
  for (size_t i = 0; i < c.size(); ++i) {
    LabeledSample s;
    s.confidence = c[i];
    s.source_index = static_cast<int64_t>(i);
    out.push_back(s);
  }
  return out;
}

TEST(HighConfidenceTest, StrictThresholdAndTruncation) {
  const auto s = WithConfidences({0.95f, 0.9f, 0.99f, 0.5f, 0.91f});
  auto r = HighConfidenceSubset(s, 0.9, 2);
  ASSERT_EQ(r.samples.size(), 2u);
  EXPECT_EQ(r.samples[0].source_index, 0);
  EXPECT_EQ(r.samples[1].source_index, 2);
  EXPECT_FALSE(r.insufficient);
  r = HighConfidenceSubset(s, 0.9, 10);
  EXPECT_EQ(r.samples.size(), 3u);
  EXPECT_TRUE(r.insufficient);
  EXPECT_EQ(HighConfidenceSubset(s, 0.0, 10).samples.size(), 5u);
  EXPECT_TRUE(HighConfidenceSubset(s, 1.0, 1).samples.empty());
  EXPECT_GGT_ERROR(HighConfidenceSubset(s, 1.5, 1), ErrorKind::kInvalidArgument);
}

TEST(CorpusTest, RoundTrip) {
  const auto dir = ScratchDir("corpus");
  Corpus c{{1, 2, 2}, {}};
  Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    LabeledSample s;
    for (int k = 0; k < 4; ++k) s.x.push_back(static_cast<float>(rng.Uniform01()));
    s.y_true = i % 3;
    s.kind = static_cast<SampleKind>(i % 3);
    s.confidence = static_cast<float>(rng.Uniform01());
    s.source_index = 10 + i;
    c.samples.push_back(s);
  }
  SaveCorpus(c, dir / "c.ggts");
  const Corpus d = LoadCorpus(dir / "c.ggts");
  EXPECT_EQ(d.shape, c.shape);
  ASSERT_EQ(d.samples.size(), c.samples.size());
  for (size_t i = 0; i < c.samples.size(); ++i) {
    EXPECT_EQ(d.samples[i].x, c.samples[i].x);
    EXPECT_EQ(d.samples[i].y_true, c.samples[i].y_true);
    EXPECT_EQ(d.samples[i].kind, c.samples[i].kind);
    EXPECT_EQ(d.samples[i].confidence, c.samples[i].confidence);
    EXPECT_EQ(d.samples[i].source_index, c.samples[i].source_index);
  }
  std::ofstream(dir / "bad.ggts") << "GGTM";
  EXPECT_GGT_ERROR(LoadCorpus(dir / "bad.ggts"), ErrorKind::kFormat);
  EXPECT_EQ(SampleKindFromName(SampleKindName(SampleKind::kWrongLabel)), SampleKind::kWrongLabel);
  EXPECT_GGT_ERROR(SampleKindFromName("CW"), ErrorKind::kFormat);
}

}  // namespace
}  // namespace ggt
