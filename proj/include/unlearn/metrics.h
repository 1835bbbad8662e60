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
// Evaluation of an unlearned model against the retrained reference:
// test/forget/retain accuracy, confidence-threshold membership inference,
// and the combined Forget-Retain-MIA (FRM) score.
//
// In-memory rates are fractions in [0, 1]. Everything that crosses the
// interface (FRM inputs, JSON) is in percent.

#ifndef UNLEARN_METRICS_H_
#define UNLEARN_METRICS_H_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "unlearn/dataset.h"
#include "unlearn/model.h"

namespace unlearn {

enum class MiaFeature { kMaxSoftmax, kTrueClassProb };

const char* MiaFeatureName(MiaFeature feature);
MiaFeature ParseMiaFeature(const std::string& name);

// One-dimensional membership predictor: a sample is called a member when its
// confidence feature is >= threshold, a non-member otherwise.
struct MiaPredictor {
  MiaFeature feature = MiaFeature::kTrueClassProb;
  double threshold = 0.0;
  // Balanced accuracy reached on the pool the threshold was fit on.
  double balanced_accuracy = 0.5;
  // No threshold beats chance on the fitting pool.
  bool degenerate = true;
};

std::vector<double> ConfidenceFeature(const ClassifierState& model,
                                      const LabeledDataset& data,
                                      MiaFeature feature);

// Threshold maximizing balanced accuracy over the candidate cut points: every
// distinct pooled confidence, plus 1.0 when all confidences are below 1.
// Ties go to the lower threshold.
MiaPredictor FitMiaThreshold(std::span<const double> member_conf,
                             std::span<const double> nonmember_conf,
                             MiaFeature feature);

// Members = retain samples, non-members = test samples, both scored by
// `model`.
MiaPredictor TrainMia(const ClassifierState& model,
                      const LabeledDataset& retain, const LabeledDataset& test,
                      MiaFeature feature = MiaFeature::kTrueClassProb);

// TN / |forget|: share of forget samples called non-members.
double MiaEfficacy(const MiaPredictor& predictor, const ClassifierState& model,
                   const LabeledDataset& forget);
double EfficacyFromConfidences(const MiaPredictor& predictor,
                               std::span<const double> forget_conf);

// FA, RA and MIA-efficacy in percent.
struct MetricTriple {
  double fa = 0.0;
  double ra = 0.0;
  double mia = 0.0;

  friend bool operator==(const MetricTriple&, const MetricTriple&) = default;
};

// exp(-(|FA_u-FA_r|/FA_r + |RA_u-RA_r|/RA_r + |MIA_u-MIA_r|/MIA_r)).
// Argument order matters. Throws when a retrained value is <= 0.
double FrmScore(const MetricTriple& unlearned, const MetricTriple& retrained);

struct RunTiming {
  double rte_seconds = 0.0;
  size_t work_units = 0;
};

struct MetricsReport {
  double ta = 0.0;
  double fa = 0.0;
  double ra = 0.0;
  double mia = 0.0;
  double rte_seconds = 0.0;
  size_t work_units = 0;
  double frm = 1.0;
  size_t ta_samples = 0;
  MetricTriple reference;
  MiaPredictor predictor;

  MetricTriple Triple() const { return {100.0 * fa, 100.0 * ra, 100.0 * mia}; }
};

// The test set TA is measured on: all of `test`, minus the target class under
// class-wise forgetting.
LabeledDataset TestSetFor(const ForgetSplit& split, const LabeledDataset& test);

// FA, RA, MIA of `model` in percent.
MetricTriple MeasureTriple(const ClassifierState& model,
                           const ForgetSplit& split,
                           const MiaPredictor& predictor);

MetricsReport Evaluate(const ClassifierState& model, const ForgetSplit& split,
                       const LabeledDataset& test,
                       const MetricTriple& reference,
                       const MiaPredictor& predictor, const RunTiming& timing);

// {ta, fa, ra, mia, rte_seconds, work_units, frm}, rates in percent.
nlohmann::json MetricsToJson(const MetricsReport& report);

}  // namespace unlearn

#endif  // UNLEARN_METRICS_H_
