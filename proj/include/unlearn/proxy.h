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
// The unlearning proxy: a fresh same-architecture model trained briefly on
// the retain set only, and the KL loss used to distill it into the model
// being unlearned.

#ifndef UNLEARN_PROXY_H_
#define UNLEARN_PROXY_H_

#include <cstdint>

#include "unlearn/dataset.h"
#include "unlearn/model.h"

namespace unlearn {

struct ProxyConfig {
  int delta_epochs = 1;
  double learning_rate = 1e-2;
  size_t batch_size = 128;
  uint64_t seed = 0;

  void Validate() const;
  TrainConfig AsTrainConfig() const;
};

// Fresh model from (arch, cfg.seed), trained on `retain` for exactly
// cfg.delta_epochs epochs.
ClassifierState TrainProxy(const ArchitectureSpec& arch,
                           const LabeledDataset& retain,
                           const ProxyConfig& cfg, TrainLog* log = nullptr);

// Mean over the batch of KL(teacher(x) || student(x)) in nats. The teacher is
// the left argument.
double KlLoss(const ClassifierState& teacher, const ClassifierState& student,
              const LabeledDataset& batch);

}  // namespace unlearn

#endif  // UNLEARN_PROXY_H_
