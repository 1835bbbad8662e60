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
#include "unlearn/selection.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "unlearn/error.h"

namespace unlearn {
namespace {

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

Moments PopulationMoments(std::span<const double> values) {
  Moments m;
  if (values.empty()) return m;
  const double n = static_cast<double>(values.size());
  for (double v : values) m.mean += v;
  m.mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - m.mean) * (v - m.mean);
  m.stddev = std::sqrt(var / n);
  return m;
}

size_t CountInBand(std::span<const double> scores, double lower,
                   double upper) {
  return static_cast<size_t>(std::count_if(
      scores.begin(), scores.end(),
      [&](double s) { return s >= lower && s <= upper; }));
}

}  // namespace

void SelectionBound::Validate() const {
  if (!std::isfinite(z_lower) || !std::isfinite(z_upper) || z_lower < 0.0 ||
      z_upper < 0.0) {
    throw Error("selection bounds must be finite and nonnegative");
  }
}

std::vector<double> El2nScores(const ClassifierState& model,
                               const LabeledDataset& data) {
  const Matrix probs = ForwardProbs(model, data);
  std::vector<double> scores(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    double sq = 0.0;
    const auto row = probs.row(i);
    for (size_t k = 0; k < row.size(); ++k) {
      const double target = static_cast<int>(k) == data.label(i) ? 1.0 : 0.0;
      sq += (row[k] - target) * (row[k] - target);
    }
    scores[i] = std::sqrt(sq);
  }
  return scores;
}

SelectionResult SelectBounded(const ClassifierState& model,
                              const LabeledDataset& data,
                              const SelectionBound& bound) {
  if (data.empty()) throw Error("cannot select from an empty dataset");
  return SelectByScores(data, El2nScores(model, data), bound);
}

SelectionResult SelectByScores(const LabeledDataset& data,
                               std::vector<double> scores,
                               const SelectionBound& bound) {
  bound.Validate();
  if (scores.size() != data.size()) {
    throw Error("score count does not match dataset size");
  }
  SelectionResult result;
  const Moments m = PopulationMoments(scores);
  result.mu = m.mean;
  result.sigma = m.stddev;
  result.lower = m.mean - bound.z_lower * m.stddev;
  result.upper = m.mean + bound.z_upper * m.stddev;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= result.lower && scores[i] <= result.upper) {
      result.kept_positions.push_back(i);
      result.kept_ids.push_back(data.id(i));
    }
  }
  result.kept = data.Subset(result.kept_positions);
  result.scores = std::move(scores);
  return result;
}

double SymmetricZForFraction(std::span<const double> scores, double fraction) {
  if (scores.empty()) throw Error("no scores to calibrate a band on");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error("keep fraction must lie in (0, 1]");
  }
  const Moments m = PopulationMoments(scores);
  if (m.stddev == 0.0) return 0.0;
  std::vector<double> deviations;
  deviations.reserve(scores.size());
  for (double s : scores) deviations.push_back(std::fabs(s - m.mean) / m.stddev);
  std::sort(deviations.begin(), deviations.end());
  const size_t n = scores.size();
  const size_t need = std::clamp<size_t>(
      static_cast<size_t>(
          std::ceil(fraction * static_cast<double>(n) - 1e-9)),
      1, n);
  double z = deviations[need - 1];
  // Rounding in mu -/+ z * sigma can exclude the boundary sample; widen until
  // the band really holds it.
  while (CountInBand(scores, m.mean - z * m.stddev, m.mean + z * m.stddev) <
         need) {
    z = z > 0.0 ? std::nextafter(z * (1.0 + 1e-15), 2.0 * z + 1.0) : 1e-300;
  }
  return z;
}

void WriteSelectionCsv(const LabeledDataset& data,
                       const SelectionResult& result, const std::string& path) {
  if (result.scores.size() != data.size()) {
    throw Error("selection result does not belong to this dataset");
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write selection CSV '" + path + "'");
  out.precision(17);
  out << "sample_id,score,kept\n";
  size_t k = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    const bool kept = k < result.kept_positions.size() &&
                      result.kept_positions[k] == i;
    if (kept) ++k;
    out << data.id(i) << ',' << result.scores[i] << ',' << (kept ? 1 : 0)
        << '\n';
  }
}

}  // namespace unlearn
