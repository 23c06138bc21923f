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

#include "ggt/masked_net.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "test_util.h"

namespace ggt {
namespace {

using testing::ScratchDir;

ModelSpec SmallSpec() {
  ModelSpec s;
  s.input = {1, 4, 4};
  s.class_count = 2;
  s.layers = {LayerSpec::Conv(8, 3), LayerSpec::Relu(), LayerSpec::Dense(8, true),
              LayerSpec::Relu(), LayerSpec::Dense(2)};
  return s;
}

// Two well-separated Gaussian blobs in 16 dimensions.
LabeledSet Blobs(int per_class, uint64_t seed) {
  LabeledSet set;
  set.shape = {1, 4, 4};
  Rng rng(seed);
  std::vector<float> x(16);
  for (int i = 0; i < 2 * per_class; ++i) {
    const int label = i % 2;
    for (int k = 0; k < 16; ++k) {
      const double center = (k % 2 == label) ? 0.8 : 0.2;
      x[k] = static_cast<float>(center + 0.08 * rng.Normal());
    }
    set.Append(x, label);
  }
  return set;
}

// Independent oracle: plain logistic regression by full-batch gradient descent.
double LogisticRegressionAccuracy(const LabeledSet& train, const LabeledSet& test) {
  const size_t d = train.shape.size();
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  for (int it = 0; it < 300; ++it) {
    std::vector<double> gw(d, 0.0);
    double gb = 0.0;
    for (size_t i = 0; i < train.size(); ++i) {
      const auto x = train.Input(i);
      double z = b;
      for (size_t k = 0; k < d; ++k) z += w[k] * x[k];
      const double err = 1.0 / (1.0 + std::exp(-z)) - train.labels[i];
      for (size_t k = 0; k < d; ++k) gw[k] += err * x[k];
      gb += err;
    }
    for (size_t k = 0; k < d; ++k) w[k] -= 0.5 * gw[k] / train.size();
    b -= 0.5 * gb / train.size();
  }
  int correct = 0;
  for (size_t i = 0; i < test.size(); ++i) {
    const auto x = test.Input(i);
    double z = b;
    for (size_t k = 0; k < d; ++k) z += w[k] * x[k];
    correct += (z > 0) == (test.labels[i] == 1);
  }
  return static_cast<double>(correct) / test.size();
}

MaskPlan CyclePlan(const ModelSpec& spec) { return PlanForModel(spec, testing::Cycle(4)); }

TEST(TrainTest, LearnsSeparableBlobs) {
  const LabeledSet train = Blobs(200, 1), test = Blobs(100, 2);
  ASSERT_GE(LogisticRegressionAccuracy(train, test), 0.99);
  TrainHyper hyper;
  hyper.epochs = 20;
  hyper.seed = 3;
  const MaskedModel m = Train(MaskedModel::Create(SmallSpec(), 4), train, &test, hyper);
  EXPECT_GE(Accuracy(m, test), 0.99);
  EXPECT_EQ(m.meta().epochs, 20);
  EXPECT_DOUBLE_EQ(m.meta().validation_accuracy, Accuracy(m, test));
}

TEST(TrainTest, ZeroEpochsLeavesWeightsUnchanged) {
  const MaskedModel start = MaskedModel::Create(SmallSpec(), 4);
  TrainHyper hyper;
  hyper.epochs = 0;
  const MaskedModel after = Train(start, Blobs(20, 1), nullptr, hyper);
  for (size_t i = 0; i < start.network().params().size(); ++i) {
    EXPECT_EQ(start.network().params()[i].weights, after.network().params()[i].weights);
    EXPECT_EQ(start.network().params()[i].bias, after.network().params()[i].bias);
  }
}

TEST(TrainTest, MaskedWeightsStayZeroAcrossEpochs) {
  const MaskedModel original = MaskedModel::Create(SmallSpec(), 4);
  const MaskedModel pruned = MaskedModel::Pruned(original, CyclePlan(original.spec()));
  EXPECT_TRUE(pruned.MaskedWeightsAreZero());
  TrainHyper hyper;
  hyper.epochs = 5;
  int calls = 0;
  Train(pruned, Blobs(50, 1), nullptr, hyper, [&](int, const MaskedModel& m) {
    ++calls;
    EXPECT_TRUE(m.MaskedWeightsAreZero());
  });
  EXPECT_EQ(calls, 5);
}

TEST(TrainTest, PrunedCopiesUnmaskedWeights) {
  const MaskedModel original = MaskedModel::Create(SmallSpec(), 4);
  const MaskedModel pruned = MaskedModel::Pruned(original, CyclePlan(original.spec()));
  const auto& a = original.network().params()[2];
  const auto& b = pruned.network().params()[2];
  for (size_t k = 0; k < a.weights.size(); ++k)
    EXPECT_EQ(b.weights[k], b.mask[k] ? a.weights[k] : 0.0f);
}

TEST(TrainTest, Deterministic) {
  const LabeledSet train = Blobs(50, 1);
  TrainHyper hyper;
  hyper.epochs = 3;
  hyper.seed = 9;
  const MaskedModel a = Train(MaskedModel::Create(SmallSpec(), 4), train, nullptr, hyper);
  const MaskedModel b = Train(MaskedModel::Create(SmallSpec(), 4), train, nullptr, hyper);
  for (size_t i = 0; i < a.network().params().size(); ++i)
    EXPECT_EQ(a.network().params()[i].weights, b.network().params()[i].weights);
}

TEST(TrainTest, DivergenceIsReported) {
  TrainHyper hyper;
  hyper.epochs = 5;
  hyper.learning_rate = 1e30;
  EXPECT_GGT_ERROR(Train(MaskedModel::Create(SmallSpec(), 4), Blobs(50, 1), nullptr, hyper),
                   ErrorKind::kDivergenceDetected);
}

TEST(ArgMaxTest, LowestIndexOnTies) {
  const std::vector<float> v{0.25f, 0.5f, 0.5f, 0.1f};
  EXPECT_EQ(ArgMax(v), 1);
  const std::vector<float> flat(3, 1.0f);
  EXPECT_EQ(ArgMax(flat), 0);
}

class EnsembleTest : public ::testing::Test {
 protected:
  void SetUp() override {
    train_ = Blobs(100, 1);
    validation_ = Blobs(50, 2);
    hyper_.epochs = 5;
    hyper_.seed = 1;
    original_ = Train(MaskedModel::Create(SmallSpec(), 4), train_, &validation_, hyper_);
    graphs_ = {{RelationalGraph::Complete(4), {"complete.json", ""}},
               {testing::Cycle(4), {"cycle.json", ""}}};
  }
  LabeledSet train_, validation_;
  TrainHyper hyper_;
  MaskedModel original_;
  std::vector<GraphEntry> graphs_;
};

TEST_F(EnsembleTest, CompleteGraphIsAlwaysAccepted) {
  EnsembleOptions opt;
  opt.accept_ratio = 1.0;
  const auto r = BuildPrunedEnsemble(original_, {graphs_[0]}, train_, validation_, hyper_, opt);
  ASSERT_EQ(r.accepted.size(), 1u);
  EXPECT_GE(r.validation_accuracy[0], original_.meta().validation_accuracy);
}

TEST_F(EnsembleTest, ImpossibleBarIsTooSmall) {
  EnsembleOptions opt;
  opt.accept_ratio = 1.01;
  EXPECT_GGT_ERROR(BuildPrunedEnsemble(original_, graphs_, train_, validation_, hyper_, opt),
                   ErrorKind::kEnsembleTooSmall);
}

TEST_F(EnsembleTest, IndependentOfThreadsAndStopsAtTarget) {
  std::vector<GraphEntry> many;
  for (int i = 0; i < 6; ++i) many.push_back(graphs_[i % 2]);
  EnsembleOptions opt;
  opt.accept_ratio = 0.5;
  opt.target_size = 3;
  opt.threads = 1;
  const auto a = BuildPrunedEnsemble(original_, many, train_, validation_, hyper_, opt);
  opt.threads = 4;
  const auto b = BuildPrunedEnsemble(original_, many, train_, validation_, hyper_, opt);
  EXPECT_EQ(a.accepted, (std::vector<size_t>{0, 1, 2}));
  EXPECT_EQ(a.accepted, b.accepted);
  for (size_t i = 0; i < a.models.size(); ++i)
    EXPECT_EQ(a.models[i].network().params()[2].weights,
              b.models[i].network().params()[2].weights);
  EXPECT_TRUE(std::isnan(a.validation_accuracy[5]));
}

TEST(RetainedMacsTest, MatchesHandCount) {
  const MaskedModel original = MaskedModel::Create(SmallSpec(), 4);
  // conv 8x1x9 weights at 2x2 positions, dense 8x32, dense 2x8.
  EXPECT_EQ(RetainedMacs(original), 8u * 9 * 4 + 8u * 32 + 2u * 8);
  const MaskedModel pruned = MaskedModel::Pruned(original, CyclePlan(original.spec()));
  const auto* lm = pruned.plan()->ForLayer(2);
  ASSERT_NE(lm, nullptr);
  const uint64_t kept = std::count(lm->mask.begin(), lm->mask.end(), 1);
  EXPECT_EQ(RetainedMacs(pruned), 8u * 9 * 4 + kept + 2u * 8);
  // C4 keeps 3 of 4 blocks per row.
  EXPECT_EQ(kept, 8u * 32 * 3 / 4);
}

TEST(ModelIoTest, RoundTripAndHashCheck) {
  const auto dir = ScratchDir("model_io");
  const MaskedModel original = MaskedModel::Create(SmallSpec(), 4);
  SaveModel(original, dir / "o.ggtm");
  const MaskedModel o2 = LoadModel(dir / "o.ggtm");
  EXPECT_FALSE(o2.plan().has_value());
  EXPECT_EQ(o2.network().params()[0].weights, original.network().params()[0].weights);

  const MaskedModel pruned = MaskedModel::Pruned(original, CyclePlan(original.spec()));
  SaveMaskPlan(*pruned.plan(), dir / "p.plan.json");
  SaveModel(pruned, dir / "p.ggtm", "p.plan.json");
  const MaskedModel p2 = LoadModel(dir / "p.ggtm");
  ASSERT_TRUE(p2.plan().has_value());
  EXPECT_EQ(p2.network().params()[2].weights, pruned.network().params()[2].weights);
  EXPECT_EQ(p2.network().params()[2].mask, pruned.network().params()[2].mask);

  // A different plan under the same name must be refused.
  MaskPlan other = PlanForModel(original.spec(), RelationalGraph::Complete(4));
  SaveMaskPlan(other, dir / "p.plan.json");
  EXPECT_GGT_ERROR(LoadModel(dir / "p.ggtm"), ErrorKind::kFormat);

  EXPECT_GGT_ERROR(LoadModel(dir / "missing.ggtm"), ErrorKind::kIo);
  std::ofstream(dir / "junk.ggtm") << "NOPE";
  EXPECT_GGT_ERROR(LoadModel(dir / "junk.ggtm"), ErrorKind::kFormat);
}

}  // namespace
}  // namespace ggt
