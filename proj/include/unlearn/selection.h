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
// Important-data selection: per-sample normed-loss (EL2N-style) scores and a
// mean/std band filter on them.

#ifndef UNLEARN_SELECTION_H_
#define UNLEARN_SELECTION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "unlearn/dataset.h"
#include "unlearn/model.h"

namespace unlearn {

// Band [mu - z_lower * sigma, mu + z_upper * sigma], both ends inclusive.
struct SelectionBound {
  double z_lower = 0.0;
  double z_upper = 0.0;

  void Validate() const;
};

struct SelectionResult {
  LabeledDataset kept;
  std::vector<double> scores;  // aligned with the input dataset
  double mu = 0.0;
  double sigma = 0.0;  // population standard deviation
  double lower = 0.0;
  double upper = 0.0;
  std::vector<size_t> kept_positions;
  std::vector<int64_t> kept_ids;
};

// ||softmax(f(x)) - onehot(y)||_2 per sample; each score lies in [0, sqrt(2)].
std::vector<double> El2nScores(const ClassifierState& model,
                               const LabeledDataset& data);

// Scores `data` with `model`, then keeps the samples inside the band built
// from this dataset's own mean and population std. Source order is preserved.
// An empty result is legal.
SelectionResult SelectBounded(const ClassifierState& model,
                              const LabeledDataset& data,
                              const SelectionBound& bound);

// The band filter on precomputed scores.
SelectionResult SelectByScores(const LabeledDataset& data,
                               std::vector<double> scores,
                               const SelectionBound& bound);

// Smallest symmetric z such that the band [mu - z sigma, mu + z sigma] keeps
// at least ceil(fraction * n) of `scores`.
double SymmetricZForFraction(std::span<const double> scores, double fraction);

// Audit export: sample_id,score,kept.
void WriteSelectionCsv(const LabeledDataset& data,
                       const SelectionResult& result, const std::string& path);

}  // namespace unlearn

#endif  // UNLEARN_SELECTION_H_
