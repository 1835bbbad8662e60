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
#include "unlearn/noise.h"

#include <cmath>
#include <random>

#include "unlearn/error.h"

namespace unlearn {

void NoiseConfig::Validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error("noise alpha must be finite and nonnegative");
  }
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw Error("noise std must be finite and nonnegative");
  }
  if (!std::isfinite(noise_mean)) throw Error("noise mean must be finite");
}

LabeledDataset ApplyNoise(const LabeledDataset& selected_forget,
                          const NoiseConfig& cfg) {
  cfg.Validate();
  if (cfg.alpha == 0.0) return selected_forget;
  std::vector<double> features = selected_forget.features();
  if (cfg.noise_std == 0.0) {
    const double shift = cfg.alpha * cfg.noise_mean;
    for (double& v : features) v += shift;
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> draw(cfg.noise_mean, cfg.noise_std);
    for (double& v : features) v += cfg.alpha * draw(rng);
  }
  return selected_forget.WithFeatures(std::move(features));
}

}  // namespace unlearn
