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
#ifndef UNLEARN_NOISE_H_
#define UNLEARN_NOISE_H_

#include <cstdint>

#include "unlearn/dataset.h"

namespace unlearn {

// Perturbation alpha * N with N ~ Normal(noise_mean, noise_std^2), one fresh
// draw per feature entry. The perturbation is therefore distributed as
// Normal(alpha * mean, alpha^2 * std^2).
struct NoiseConfig {
  double alpha = 3.0;
  double noise_mean = 0.0;
  double noise_std = 1.0;
  uint64_t seed = 0;

  void Validate() const;
};

// Returns the dataset with features + alpha * N. Labels, ids and shape are
// unchanged; no clipping. alpha == 0 returns the input exactly.
LabeledDataset ApplyNoise(const LabeledDataset& selected_forget,
                          const NoiseConfig& cfg);

}  // namespace unlearn

#endif  // UNLEARN_NOISE_H_
