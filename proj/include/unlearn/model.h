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
// A small fully connected classifier with hand-written backpropagation.
//
// Every model role in an unlearning run (original, unlearned, retrained,
// proxy) is a ClassifierState value. Operations never mutate their inputs;
// they return new states. All arithmetic is double precision and a single
// training call is single-threaded, so results are bitwise reproducible for a
// given build.

#ifndef UNLEARN_MODEL_H_
#define UNLEARN_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "unlearn/dataset.h"

namespace unlearn {

enum class Activation { kRelu, kTanh };

const char* ActivationName(Activation activation);
Activation ParseActivation(const std::string& name);

struct ArchitectureSpec {
  // Only "mlp" exists today.
  std::string kind = "mlp";
  // input width, hidden widths..., n_classes. At least one hidden layer.
  std::vector<size_t> layer_widths;
  Activation activation = Activation::kRelu;

  size_t input_width() const { return layer_widths.front(); }
  size_t output_width() const { return layer_widths.back(); }

  // Throws Error on an unusable spec.
  void Validate() const;

  friend bool operator==(const ArchitectureSpec&,
                         const ArchitectureSpec&) = default;
};

// Where one dense layer lives inside the flat parameter vector. Weights are
// row-major fan_out x fan_in, followed by fan_out biases.
struct LayerLayout {
  size_t fan_in = 0;
  size_t fan_out = 0;
  size_t weight_offset = 0;
  size_t bias_offset = 0;
};

std::vector<LayerLayout> ComputeLayout(const ArchitectureSpec& arch);
size_t ParameterCount(const ArchitectureSpec& arch);

// True for every flat index that holds a weight (as opposed to a bias).
std::vector<bool> WeightPositions(const ArchitectureSpec& arch);

struct ClassifierState {
  ArchitectureSpec arch;
  std::vector<double> params;
  // 1 = active, 0 = pruned. Pruned parameters are exactly 0.0 forever.
  std::vector<uint8_t> prune_mask;
  uint64_t rng_seed = 0;
  int trained_epochs = 0;

  friend bool operator==(const ClassifierState&,
                         const ClassifierState&) = default;
};

struct TrainConfig {
  int epochs = 5;
  double learning_rate = 1e-2;
  size_t batch_size = 128;
  uint64_t seed = 0;

  void Validate() const;
};

// Row-major dense matrix, used for per-sample class probabilities.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> values;

  double at(size_t r, size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(size_t r) const {
    return {values.data() + r * cols, cols};
  }
};

// Fresh model: weights ~ U[-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases,
// all parameters active.
ClassifierState InitModel(const ArchitectureSpec& arch, uint64_t seed);

// Softmax class probabilities for every row of `data`.
Matrix ForwardProbs(const ClassifierState& model, const LabeledDataset& data);

// Probabilities for a single feature row.
std::vector<double> PredictProbs(const ClassifierState& model,
                                 std::span<const double> features);

// Mean cross-entropy of the model on `data`.
double MeanCrossEntropy(const ClassifierState& model,
                        const LabeledDataset& data);

// Fraction of samples whose argmax class (lowest index on ties) equals the
// label. Throws on empty data.
double Accuracy(const ClassifierState& model, const LabeledDataset& data);

// sum_i p_i ln(p_i / q_i) in nats, with both distributions clamped to
// [1e-12, 1] and renormalized first.
double KlDivergence(std::span<const double> p, std::span<const double> q);

// What a training step minimizes:
//   mean CE(batch) + kl_weight * mean KL(teacher(batch) || model(batch)).
// With ascend set the step goes uphill instead (gradient ascent unlearning).
struct Objective {
  double kl_weight = 0.0;
  const ClassifierState* teacher = nullptr;
  bool ascend = false;
};

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // aligned with params; zero where pruned
};

// Loss of `objective` over all of `batch` and its analytic gradient with
// respect to the model parameters. `ascend` does not change the sign here.
LossGradient ComputeLossGradient(const ClassifierState& model,
                                 const LabeledDataset& batch,
                                 const Objective& objective);

// Bookkeeping from one training call.
struct TrainLog {
  // Sample visits across all epochs (samples x epochs).
  size_t work_units = 0;
  size_t effective_batch_size = 0;
  bool batch_size_clipped = false;
  size_t steps = 0;
  // Mean objective loss over the data at the end of each epoch.
  std::vector<double> epoch_losses;
  // Sorted ids of every sample that fed a gradient step.
  std::vector<int64_t> visited_ids;
};

// Minibatch SGD on mean cross-entropy for cfg.epochs passes, reshuffling each
// epoch from cfg.seed. Batch size is clipped to the dataset size.
ClassifierState Train(const ClassifierState& model, const LabeledDataset& data,
                      const TrainConfig& cfg, TrainLog* log = nullptr);

// Train() with a general objective. Pruned coordinates are re-zeroed after
// every step.
ClassifierState TrainWithObjective(const ClassifierState& model,
                                   const LabeledDataset& data,
                                   const TrainConfig& cfg,
                                   const Objective& objective,
                                   TrainLog* log = nullptr);

// One-shot global magnitude pruning over the weight pool (biases exempt).
// Exactly floor(sparsity * n_weights) weights with the smallest magnitude are
// zeroed and masked; ties go to the lower flat index.
ClassifierState OmpPrune(const ClassifierState& model, double sparsity);

}  // namespace unlearn

#endif  // UNLEARN_MODEL_H_
