//
// Copyright 2026 The Unlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "oracle.h"
#include "unlearn/error.h"
#include "unlearn/metrics.h"

namespace unlearn {
namespace {

TEST(FrmScore, PaperRows) {
  EXPECT_NEAR(FrmScore({67.23, 86.68, 32.92}, {68.22, 89.67, 33.92}), 0.925,
              0.005);
  EXPECT_NEAR(FrmScore({81.22, 81.75, 18.93}, {80.46, 91.47, 19.62}), 0.855,
              0.010);
}

TEST(FrmScore, ClosedForms) {
  EXPECT_EQ(FrmScore({10, 20, 30}, {10, 20, 30}), 1.0);
  EXPECT_NEAR(FrmScore({50, 70, 30}, {100, 70, 30}), std::exp(-0.5), 1e-15);
  EXPECT_NE(FrmScore({50, 70, 30}, {100, 70, 30}),
            FrmScore({100, 70, 30}, {50, 70, 30}));
  EXPECT_THROW(FrmScore({1, 1, 1}, {0, 1, 1}), Error);
  EXPECT_THROW(FrmScore({1, 1, 1}, {1, 1, -2}), Error);
}

TEST(FrmScore, OracleAndMonotonicity) {
  std::mt19937_64 rng(70);
  std::uniform_real_distribution<> u(0.5, 100.0);
  for (int rep = 0; rep < 50; ++rep) {
    const MetricTriple a{u(rng), u(rng), u(rng)}, r{u(rng), u(rng), u(rng)};
    const double f = FrmScore(a, r);
    EXPECT_NEAR(f, oracle::Frm(a.fa, r.fa, a.ra, r.ra, a.mia, r.mia), 1e-12 * f);
    EXPECT_GT(f, 0.0);
    EXPECT_LE(f, 1.0);
    MetricTriple further = a;
    further.mia = a.mia >= r.mia ? a.mia + 1.0 : a.mia - 0.25 * (r.mia - a.mia) - 0.1;
    EXPECT_LT(FrmScore(further, r), f);
  }
}

TEST(FitMiaThreshold, SeparablePools) {
  const double mem[] = {0.99, 0.99, 0.99}, non[] = {0.10, 0.10};
  const MiaPredictor p = FitMiaThreshold(mem, non, MiaFeature::kTrueClassProb);
  EXPECT_EQ(p.threshold, 0.99);
  EXPECT_EQ(p.balanced_accuracy, 1.0);
  EXPECT_FALSE(p.degenerate);
}

TEST(FitMiaThreshold, IndistinguishablePoolsAreDegenerate) {
  const double pool[] = {0.2, 0.5, 0.7, 0.9};
  const MiaPredictor p = FitMiaThreshold(pool, pool, MiaFeature::kTrueClassProb);
  EXPECT_EQ(p.balanced_accuracy, 0.5);
  EXPECT_TRUE(p.degenerate);
}

TEST(FitMiaThreshold, FiveCandidateBruteForce) {
  const std::vector<double> mem = {0.9, 0.8}, non = {0.3, 0.7};
  const MiaPredictor p = FitMiaThreshold(mem, non, MiaFeature::kTrueClassProb);
  const oracle::Threshold o = oracle::BestThreshold(mem, non);
  EXPECT_EQ(p.threshold, o.threshold);
  EXPECT_EQ(p.threshold, 0.8);
  EXPECT_EQ(p.balanced_accuracy, 1.0);
  EXPECT_THROW(FitMiaThreshold({}, non, MiaFeature::kTrueClassProb), Error);
}

TEST(FitMiaThreshold, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(71);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> mem(1 + rng() % 30), non(1 + rng() % 30);
    // Coarse grid values force many ties.
    for (double& v : mem) v = static_cast<double>(rng() % 11) / 10.0;
    for (double& v : non) v = static_cast<double>(rng() % 8) / 10.0;
    const MiaPredictor p = FitMiaThreshold(mem, non, MiaFeature::kMaxSoftmax);
    const oracle::Threshold o = oracle::BestThreshold(mem, non);
    EXPECT_EQ(p.threshold, o.threshold);
    EXPECT_NEAR(p.balanced_accuracy, o.balanced_accuracy, 1e-12);
  }
}

TEST(MiaEfficacy, CountingAndExtremes) {
  const std::vector<double> conf = {0.1, 0.2, 0.3, 0.35, 0.4, 0.45, 0.5,
                                    0.9, 0.95, 0.99};
  MiaPredictor p;
  p.threshold = 0.6;
  EXPECT_DOUBLE_EQ(EfficacyFromConfidences(p, conf), 0.7);
  p.threshold = 1.0;  // everything non-member
  EXPECT_EQ(EfficacyFromConfidences(p, conf), 1.0);
  p.threshold = 0.0;  // everything member
  EXPECT_EQ(EfficacyFromConfidences(p, conf), 0.0);
  EXPECT_THROW(EfficacyFromConfidences(p, {}), Error);
}

TEST(MiaEfficacy, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(72);
  std::uniform_real_distribution<> u(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> conf(25);
    for (double& c : conf) c = u(rng);
    MiaPredictor p;
    p.threshold = u(rng);
    std::vector<double> moved = conf;
    for (double& c : moved) c = std::exp(3.0 * c) - 2.0;
    MiaPredictor q = p;
    q.threshold = std::exp(3.0 * p.threshold) - 2.0;
    EXPECT_EQ(EfficacyFromConfidences(p, conf), EfficacyFromConfidences(q, moved));
  }
}

struct Fixture {
  LabeledDataset data, test;
  ForgetSplit split;
  ClassifierState model;
};

Fixture Make(ForgetMode mode) {
  Fixture f;
  f.data = GenerateSynthetic({240, 3, 3, 3.0, 5});
  f.test = GenerateSynthetic({90, 3, 3, 3.0, 6});
  f.split = mode == ForgetMode::kRandom ? SplitRandomForget(f.data, 0.2, 1)
                                        : SplitClasswiseForget(f.data, 2, 0.5, 1);
  ArchitectureSpec arch;
  arch.layer_widths = {3, 8, 3};
  f.model = Train(InitModel(arch, 1), f.data, {10, 0.05, 16, 2});
  return f;
}

TEST(Evaluate, SelfReferenceAndRateBounds) {
  for (ForgetMode mode : {ForgetMode::kRandom, ForgetMode::kClassWise}) {
    const Fixture f = Make(mode);
    const MiaPredictor pred = TrainMia(f.model, f.split.retain, f.test);
    const MetricTriple ref = MeasureTriple(f.model, f.split, pred);
    const MetricsReport r = Evaluate(f.model, f.split, f.test, ref, pred, {1.5, 42});
    EXPECT_EQ(r.frm, 1.0);
    for (double v : {r.ta, r.fa, r.ra, r.mia}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(r.rte_seconds, 1.5);
    EXPECT_EQ(r.work_units, 42u);
    EXPECT_EQ(r.Triple(), ref);
    const MetricsReport again = Evaluate(f.model, f.split, f.test, ref, pred, {1.5, 42});
    EXPECT_EQ(MetricsToJson(again), MetricsToJson(r));
  }
}

TEST(Evaluate, ClasswiseExcludesTargetClassFromTest) {
  const Fixture f = Make(ForgetMode::kClassWise);
  const LabeledDataset t = TestSetFor(f.split, f.test);
  EXPECT_EQ(t.size(), f.test.size() - f.test.CountLabel(2));
  EXPECT_EQ(t.CountLabel(2), 0u);
  const MiaPredictor pred = TrainMia(f.model, f.split.retain, f.test);
  const MetricsReport r = Evaluate(f.model, f.split, f.test,
                                   MeasureTriple(f.model, f.split, pred), pred, {});
  EXPECT_EQ(r.ta_samples, t.size());
  EXPECT_DOUBLE_EQ(r.ta, Accuracy(f.model, t));
  EXPECT_EQ(TestSetFor(Make(ForgetMode::kRandom).split, f.test), f.test);
}

TEST(MetricsToJson, PercentKeys) {
  MetricsReport r;
  r.ta = 0.5;
  r.fa = 0.25;
  r.ra = 1.0;
  r.mia = 0.125;
  r.work_units = 7;
  const auto j = MetricsToJson(r);
  EXPECT_EQ(j.size(), 7u);
  EXPECT_EQ(j.at("ta"), 50.0);
  EXPECT_EQ(j.at("fa"), 25.0);
  EXPECT_EQ(j.at("mia"), 12.5);
  EXPECT_EQ(j.at("work_units"), 7);
}

TEST(MiaFeature, Names) {
  EXPECT_EQ(ParseMiaFeature(MiaFeatureName(MiaFeature::kMaxSoftmax)),
            MiaFeature::kMaxSoftmax);
  EXPECT_THROW(ParseMiaFeature("entropy"), Error);
}

}  // namespace
}  // namespace unlearn
