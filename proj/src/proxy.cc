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
#include "unlearn/proxy.h"

#include "unlearn/error.h"

namespace unlearn {

void ProxyConfig::Validate() const {
  if (delta_epochs < 0) throw Error("proxy delta_epochs must be nonnegative");
  AsTrainConfig().Validate();
}

TrainConfig ProxyConfig::AsTrainConfig() const {
  TrainConfig cfg;
  cfg.epochs = delta_epochs;
  cfg.learning_rate = learning_rate;
  cfg.batch_size = batch_size;
  cfg.seed = seed;
  return cfg;
}

ClassifierState TrainProxy(const ArchitectureSpec& arch,
                           const LabeledDataset& retain,
                           const ProxyConfig& cfg, TrainLog* log) {
  cfg.Validate();
  if (retain.empty()) throw Error("cannot train a proxy on an empty retain set");
  return Train(InitModel(arch, cfg.seed), retain, cfg.AsTrainConfig(), log);
}

double KlLoss(const ClassifierState& teacher, const ClassifierState& student,
              const LabeledDataset& batch) {
  if (batch.empty()) throw Error("KL loss of an empty batch");
  if (teacher.arch.input_width() != student.arch.input_width() ||
      teacher.arch.output_width() != student.arch.output_width()) {
    throw Error("teacher and student disagree on input/output dimensions");
  }
  const Matrix p = ForwardProbs(teacher, batch);
  const Matrix q = ForwardProbs(student, batch);
  double total = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    total += KlDivergence(p.row(i), q.row(i));
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace unlearn
