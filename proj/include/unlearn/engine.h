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
// The controllable unlearning loop and the baseline unlearners.
//
// The controllable method runs, in order:
//   1. optional one-shot magnitude pruning of the original model;
//   2. band selection on the forget set and on the retain set, scored by the
//      pruned original model, each with its own statistics;
//   3. Gaussian perturbation of the selected forget samples;
//   4. proxy training on the full retain set;
//   5. fine-tuning of the pruned original on the union of (3) and the
//      selected retain samples, minimizing CE + gamma * KL(proxy || model).

#ifndef UNLEARN_ENGINE_H_
#define UNLEARN_ENGINE_H_

#include <optional>
#include <string>

#include "json.hpp"
#include "unlearn/dataset.h"
#include "unlearn/model.h"
#include "unlearn/noise.h"
#include "unlearn/proxy.h"
#include "unlearn/selection.h"

namespace unlearn {

struct ControlKnobs {
  SelectionBound forget_bound{0.85, 1.0};
  SelectionBound retain_bound{0.17, 0.3};
  NoiseConfig noise;
  ProxyConfig proxy;
  double gamma = 0.5;
  TrainConfig finetune;
  double prune_sparsity = 0.0;

  void Validate() const;

  // Recommended defaults for the two forget modes. Class-wise uses heavier
  // noise and wider bands.
  static ControlKnobs Defaults(ForgetMode mode);
};

nlohmann::json KnobsToJson(const ControlKnobs& knobs);
// Missing fields keep the values already in `base`.
ControlKnobs KnobsFromJson(const nlohmann::json& j, ControlKnobs base);

nlohmann::json TrainConfigToJson(const TrainConfig& cfg);
TrainConfig TrainConfigFromJson(const nlohmann::json& j, TrainConfig base);

// Everything steps 1-3 produce, exposed for auditing.
struct PreparedUnlearningSet {
  SelectionResult forget_selection;
  SelectionResult retain_selection;
  LabeledDataset noised_forget;
  // Union of noised_forget and the selected retain samples, ordered by id.
  LabeledDataset d_new;
};

// Steps 2-3, scoring with `scoring_model` (the pruned original).
PreparedUnlearningSet PrepareUnlearningSet(const ClassifierState& scoring_model,
                                           const ForgetSplit& split,
                                           const ControlKnobs& knobs);

struct UnlearnRun {
  ClassifierState unlearned;
  size_t d_new_size = 0;
  size_t selected_forget_size = 0;
  size_t selected_retain_size = 0;
  // Wall-clock seconds for steps 2-5.
  double wall_time_seconds = 0.0;
  // Sample visits in proxy training plus fine-tuning.
  size_t work_units = 0;
  ControlKnobs knob_snapshot;
  // Set when the forget band kept nothing; the run proceeds on retain only.
  bool empty_forget_selection = false;
};

nlohmann::json UnlearnRunToJson(
    const UnlearnRun& run,
    const std::optional<std::string>& snapshot_path = std::nullopt);

// Throws if both selections come back empty.
UnlearnRun ConmuUnlearn(const ClassifierState& original,
                        const ForgetSplit& split, const ControlKnobs& knobs);

// Fresh model trained on the retain set only: the exact-unlearning reference.
ClassifierState RetrainBaseline(const ArchitectureSpec& arch,
                                const LabeledDataset& retain,
                                const TrainConfig& cfg,
                                TrainLog* log = nullptr);

// Continues SGD from the original model on the retain set.
ClassifierState FinetuneBaseline(const ClassifierState& original,
                                 const LabeledDataset& retain,
                                 const TrainConfig& cfg,
                                 TrainLog* log = nullptr);

// Sign-flipped SGD on the forget set: theta <- theta + lr * grad CE.
ClassifierState GradientAscentBaseline(const ClassifierState& original,
                                       const LabeledDataset& forget,
                                       const TrainConfig& cfg,
                                       TrainLog* log = nullptr);

}  // namespace unlearn

#endif  // UNLEARN_ENGINE_H_
