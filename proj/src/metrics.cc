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
#include "unlearn/metrics.h"

#include <algorithm>
#include <cmath>

#include "unlearn/error.h"

namespace unlearn {
namespace {

constexpr double kChanceSlack = 1e-12;

}  // namespace

const char* MiaFeatureName(MiaFeature feature) {
  return feature == MiaFeature::kMaxSoftmax ? "max_softmax" : "true_class_prob";
}

MiaFeature ParseMiaFeature(const std::string& name) {
  if (name == "max_softmax") return MiaFeature::kMaxSoftmax;
  if (name == "true_class_prob") return MiaFeature::kTrueClassProb;
  throw Error("unknown MIA feature '" + name +
              "' (expected max_softmax or true_class_prob)");
}

std::vector<double> ConfidenceFeature(const ClassifierState& model,
                                      const LabeledDataset& data,
                                      MiaFeature feature) {
  const Matrix probs = ForwardProbs(model, data);
  std::vector<double> conf(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    const auto row = probs.row(i);
    conf[i] = feature == MiaFeature::kMaxSoftmax
                  ? *std::max_element(row.begin(), row.end())
                  : row[static_cast<size_t>(data.label(i))];
  }
  return conf;
}

MiaPredictor FitMiaThreshold(std::span<const double> member_conf,
                             std::span<const double> nonmember_conf,
                             MiaFeature feature) {
  if (member_conf.empty() || nonmember_conf.empty()) {
    throw Error("MIA predictor needs non-empty member and non-member pools");
  }
  std::vector<double> members(member_conf.begin(), member_conf.end());
  std::vector<double> nonmembers(nonmember_conf.begin(), nonmember_conf.end());
  std::sort(members.begin(), members.end());
  std::sort(nonmembers.begin(), nonmembers.end());

  std::vector<double> candidates = members;
  candidates.insert(candidates.end(), nonmembers.begin(), nonmembers.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  if (candidates.back() < 1.0) candidates.push_back(1.0);

  const double p = static_cast<double>(members.size());
  const double n = static_cast<double>(nonmembers.size());
  MiaPredictor best;
  best.feature = feature;
  best.balanced_accuracy = -1.0;
  for (double t : candidates) {
    // member iff conf >= t
    const auto tp = members.end() -
                    std::lower_bound(members.begin(), members.end(), t);
    const auto tn = std::lower_bound(nonmembers.begin(), nonmembers.end(), t) -
                    nonmembers.begin();
    const double ba =
        0.5 * (static_cast<double>(tp) / p + static_cast<double>(tn) / n);
    if (ba > best.balanced_accuracy) {
      best.balanced_accuracy = ba;
      best.threshold = t;
    }
  }
  best.degenerate = best.balanced_accuracy <= 0.5 + kChanceSlack;
  return best;
}

MiaPredictor TrainMia(const ClassifierState& model,
                      const LabeledDataset& retain, const LabeledDataset& test,
                      MiaFeature feature) {
  if (retain.empty() || test.empty()) {
    throw Error("MIA predictor needs non-empty retain and test sets");
  }
  return FitMiaThreshold(ConfidenceFeature(model, retain, feature),
                         ConfidenceFeature(model, test, feature), feature);
}

double EfficacyFromConfidences(const MiaPredictor& predictor,
                               std::span<const double> forget_conf) {
  if (forget_conf.empty()) throw Error("MIA efficacy of an empty forget set");
  const auto tn = std::count_if(
      forget_conf.begin(), forget_conf.end(),
      [&](double c) { return c < predictor.threshold; });
  return static_cast<double>(tn) / static_cast<double>(forget_conf.size());
}

double MiaEfficacy(const MiaPredictor& predictor, const ClassifierState& model,
                   const LabeledDataset& forget) {
  if (forget.empty()) throw Error("MIA efficacy of an empty forget set");
  return EfficacyFromConfidences(
      predictor, ConfidenceFeature(model, forget, predictor.feature));
}

double FrmScore(const MetricTriple& unlearned, const MetricTriple& retrained) {
  if (!(retrained.fa > 0.0) || !(retrained.ra > 0.0) ||
      !(retrained.mia > 0.0)) {
    throw Error("FRM is undefined: a retrained-model metric is zero "
                "(FA_r=" + std::to_string(retrained.fa) +
                ", RA_r=" + std::to_string(retrained.ra) +
                ", MIA_r=" + std::to_string(retrained.mia) + ")");
  }
  const double gap = std::fabs(unlearned.fa - retrained.fa) / retrained.fa +
                     std::fabs(unlearned.ra - retrained.ra) / retrained.ra +
                     std::fabs(unlearned.mia - retrained.mia) / retrained.mia;
  return std::exp(-gap);
}

LabeledDataset TestSetFor(const ForgetSplit& split,
                          const LabeledDataset& test) {
  if (split.mode != ForgetMode::kClassWise || !split.target_class) return test;
  std::vector<size_t> keep;
  for (size_t i = 0; i < test.size(); ++i) {
    if (test.label(i) != *split.target_class) keep.push_back(i);
  }
  return test.Subset(keep);
}

MetricTriple MeasureTriple(const ClassifierState& model,
                           const ForgetSplit& split,
                           const MiaPredictor& predictor) {
  MetricTriple t;
  t.fa = 100.0 * Accuracy(model, split.forget);
  t.ra = 100.0 * Accuracy(model, split.retain);
  t.mia = 100.0 * MiaEfficacy(predictor, model, split.forget);
  return t;
}

MetricsReport Evaluate(const ClassifierState& model, const ForgetSplit& split,
                       const LabeledDataset& test,
                       const MetricTriple& reference,
                       const MiaPredictor& predictor, const RunTiming& timing) {
  MetricsReport report;
  const LabeledDataset ta_set = TestSetFor(split, test);
  report.ta = Accuracy(model, ta_set);
  report.ta_samples = ta_set.size();
  report.fa = Accuracy(model, split.forget);
  report.ra = Accuracy(model, split.retain);
  report.mia = MiaEfficacy(predictor, model, split.forget);
  report.rte_seconds = timing.rte_seconds;
  report.work_units = timing.work_units;
  report.reference = reference;
  report.predictor = predictor;
  report.frm = FrmScore(report.Triple(), reference);
  return report;
}

nlohmann::json MetricsToJson(const MetricsReport& report) {
  const MetricTriple t = report.Triple();
  return nlohmann::json{{"ta", 100.0 * report.ta},
                        {"fa", t.fa},
                        {"ra", t.ra},
                        {"mia", t.mia},
                        {"rte_seconds", report.rte_seconds},
                        {"work_units", report.work_units},
                        {"frm", report.frm}};
}

}  // namespace unlearn
