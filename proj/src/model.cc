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

#include "unlearn/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "unlearn/error.h"

namespace unlearn {
namespace {

constexpr double kProbabilityFloor = 1e-12;

double Activate(Activation a, double z) {
  return a == Activation::kRelu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// Derivative expressed through the pre-activation z and output y = f(z).
double ActivateGrad(Activation a, double z, double y) {
  return a == Activation::kRelu ? (z > 0.0 ? 1.0 : 0.0) : 1.0 - y * y;
}

void Softmax(std::span<const double> logits, std::span<double> probs) {
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (size_t k = 0; k < logits.size(); ++k) {
    probs[k] = std::exp(logits[k] - max);
    sum += probs[k];
  }
  for (double& p : probs) p /= sum;
}

double LogSumExp(std::span<const double> logits) {
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - max);
  return max + std::log(sum);
}

// Clamp to [floor, 1] and renormalize.
void Smooth(std::span<const double> in, std::vector<double>* out) {
  out->resize(in.size());
  double sum = 0.0;
  for (size_t k = 0; k < in.size(); ++k) {
    (*out)[k] = std::clamp(in[k], kProbabilityFloor, 1.0);
    sum += (*out)[k];
  }
  for (double& v : *out) v /= sum;
}

// Per-layer buffers for one forward/backward pass.
class Network {
 public:
  explicit Network(const ClassifierState& model)
      : model_(model), layout_(ComputeLayout(model.arch)) {
    const auto& widths = model.arch.layer_widths;
    pre_.resize(widths.size());
    post_.resize(widths.size());
    for (size_t l = 0; l < widths.size(); ++l) {
      pre_[l].assign(widths[l], 0.0);
      post_[l].assign(widths[l], 0.0);
    }
    delta_.assign(*std::max_element(widths.begin(), widths.end()), 0.0);
    next_delta_ = delta_;
  }

  // Leaves logits in pre_.back() and probabilities in post_.back().
  void Forward(std::span<const double> x) {
    std::copy(x.begin(), x.end(), post_[0].begin());
    const Activation act = model_.arch.activation;
    const double* p = model_.params.data();
    for (size_t l = 0; l < layout_.size(); ++l) {
      const LayerLayout& L = layout_[l];
      const auto& in = post_[l];
      auto& z = pre_[l + 1];
      for (size_t o = 0; o < L.fan_out; ++o) {
        const double* w = p + L.weight_offset + o * L.fan_in;
        double acc = p[L.bias_offset + o];
        for (size_t i = 0; i < L.fan_in; ++i) acc += w[i] * in[i];
        z[o] = acc;
      }
      if (l + 1 < layout_.size()) {
        for (size_t o = 0; o < L.fan_out; ++o) {
          post_[l + 1][o] = Activate(act, z[o]);
        }
      } else {
        Softmax(z, post_[l + 1]);
      }
    }
  }

  std::span<const double> logits() const { return pre_.back(); }
  std::span<const double> probs() const { return post_.back(); }

  // Accumulates scale * d(loss)/d(params) into grad, given d(loss)/d(logits).
  void Backward(std::span<const double> logit_grad, double scale,
                std::vector<double>* grad) {
    const Activation act = model_.arch.activation;
    const double* p = model_.params.data();
    double* g = grad->data();
    std::copy(logit_grad.begin(), logit_grad.end(), delta_.begin());
    for (size_t l = layout_.size(); l-- > 0;) {
      const LayerLayout& L = layout_[l];
      const auto& in = post_[l];
      for (size_t o = 0; o < L.fan_out; ++o) {
        const double d = scale * delta_[o];
        double* gw = g + L.weight_offset + o * L.fan_in;
        for (size_t i = 0; i < L.fan_in; ++i) gw[i] += d * in[i];
        g[L.bias_offset + o] += d;
      }
      if (l == 0) break;
      for (size_t i = 0; i < L.fan_in; ++i) {
        double acc = 0.0;
        for (size_t o = 0; o < L.fan_out; ++o) {
          acc += p[L.weight_offset + o * L.fan_in + i] * delta_[o];
        }
        next_delta_[i] = acc * ActivateGrad(act, pre_[l][i], post_[l][i]);
      }
      std::swap(delta_, next_delta_);
    }
  }

 private:
  const ClassifierState& model_;
  std::vector<LayerLayout> layout_;
  std::vector<std::vector<double>> pre_;
  std::vector<std::vector<double>> post_;
  std::vector<double> delta_;
  std::vector<double> next_delta_;
};

void CheckInput(const ClassifierState& model, const LabeledDataset& data) {
  if (data.n_features() != model.arch.input_width()) {
    throw Error("dataset has " + std::to_string(data.n_features()) +
                " features but the model expects " +
                std::to_string(model.arch.input_width()));
  }
  if (static_cast<size_t>(data.n_classes()) != model.arch.output_width()) {
    throw Error("dataset has " + std::to_string(data.n_classes()) +
                " classes but the model outputs " +
                std::to_string(model.arch.output_width()));
  }
}

void CheckTeacher(const ClassifierState& student,
                  const ClassifierState& teacher) {
  if (teacher.arch.input_width() != student.arch.input_width() ||
      teacher.arch.output_width() != student.arch.output_width()) {
    throw Error("teacher and student disagree on input/output dimensions");
  }
}

// Mean objective loss over data[positions]; if grad is non-null it receives
// the mean gradient (overwritten).
double BatchLossGradient(const ClassifierState& model,
                         const LabeledDataset& data,
                         std::span<const size_t> positions,
                         const Objective& objective,
                         std::vector<double>* grad) {
  Network net(model);
  std::optional<Network> teacher_net;
  const bool use_kl = objective.kl_weight != 0.0;
  if (use_kl) {
    if (objective.teacher == nullptr) {
      throw Error("objective has a KL weight but no teacher model");
    }
    CheckTeacher(model, *objective.teacher);
    teacher_net.emplace(*objective.teacher);
  }
  if (grad != nullptr) grad->assign(model.params.size(), 0.0);

  const size_t classes = model.arch.output_width();
  const double scale = 1.0 / static_cast<double>(positions.size());
  std::vector<double> logit_grad(classes);
  std::vector<double> teacher_probs;
  double total = 0.0;
  for (size_t pos : positions) {
    const auto x = data.row(pos);
    const int y = data.label(pos);
    net.Forward(x);
    const auto probs = net.probs();
    double loss = LogSumExp(net.logits()) - net.logits()[y];
    for (size_t k = 0; k < classes; ++k) {
      logit_grad[k] = probs[k] - (static_cast<int>(k) == y ? 1.0 : 0.0);
    }
    if (use_kl) {
      teacher_net->Forward(x);
      Smooth(teacher_net->probs(), &teacher_probs);
      loss += objective.kl_weight * KlDivergence(teacher_probs, probs);
      // d/dz KL(t || softmax(z)) = softmax(z) - t.
      for (size_t k = 0; k < classes; ++k) {
        logit_grad[k] += objective.kl_weight * (probs[k] - teacher_probs[k]);
      }
    }
    total += loss;
    if (grad != nullptr) net.Backward(logit_grad, scale, grad);
  }
  if (grad != nullptr) {
    for (size_t i = 0; i < grad->size(); ++i) {
      if (!model.prune_mask[i]) (*grad)[i] = 0.0;
    }
  }
  return total * scale;
}

std::vector<size_t> AllPositions(size_t n) {
  std::vector<size_t> positions(n);
  std::iota(positions.begin(), positions.end(), size_t{0});
  return positions;
}

}  // namespace

const char* ActivationName(Activation activation) {
  return activation == Activation::kRelu ? "relu" : "tanh";
}

Activation ParseActivation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw Error("unknown activation '" + name + "' (expected relu or tanh)");
}

void ArchitectureSpec::Validate() const {
  if (kind != "mlp") throw Error("unsupported architecture kind '" + kind + "'");
  if (layer_widths.size() < 3) {
    throw Error("architecture needs an input width, at least one hidden "
                "width and an output width");
  }
  for (size_t w : layer_widths) {
    if (w == 0) throw Error("layer widths must be positive");
  }
  if (layer_widths.back() < 2) throw Error("output width must be at least 2");
}

std::vector<LayerLayout> ComputeLayout(const ArchitectureSpec& arch) {
  std::vector<LayerLayout> layout;
  size_t offset = 0;
  for (size_t l = 0; l + 1 < arch.layer_widths.size(); ++l) {
    LayerLayout L;
    L.fan_in = arch.layer_widths[l];
    L.fan_out = arch.layer_widths[l + 1];
    L.weight_offset = offset;
    offset += L.fan_in * L.fan_out;
    L.bias_offset = offset;
    offset += L.fan_out;
    layout.push_back(L);
  }
  return layout;
}

size_t ParameterCount(const ArchitectureSpec& arch) {
  size_t n = 0;
  for (const auto& L : ComputeLayout(arch)) n += L.fan_out * (L.fan_in + 1);
  return n;
}

std::vector<bool> WeightPositions(const ArchitectureSpec& arch) {
  std::vector<bool> is_weight(ParameterCount(arch), false);
  for (const auto& L : ComputeLayout(arch)) {
    std::fill_n(is_weight.begin() + static_cast<ptrdiff_t>(L.weight_offset),
                L.fan_in * L.fan_out, true);
  }
  return is_weight;
}

void TrainConfig::Validate() const {
  if (epochs < 0) throw Error("epochs must be nonnegative");
  if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (batch_size == 0) throw Error("batch_size must be positive");
}

ClassifierState InitModel(const ArchitectureSpec& arch, uint64_t seed) {
  arch.Validate();
  ClassifierState model;
  model.arch = arch;
  model.rng_seed = seed;
  model.params.assign(ParameterCount(arch), 0.0);
  model.prune_mask.assign(model.params.size(), 1);
  std::mt19937_64 rng(seed);
  for (const auto& L : ComputeLayout(arch)) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(L.fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (size_t i = 0; i < L.fan_in * L.fan_out; ++i) {
      model.params[L.weight_offset + i] = dist(rng);
    }
  }
  return model;
}

Matrix ForwardProbs(const ClassifierState& model, const LabeledDataset& data) {
  CheckInput(model, data);
  Network net(model);
  Matrix out;
  out.rows = data.size();
  out.cols = model.arch.output_width();
  out.values.resize(out.rows * out.cols);
  for (size_t i = 0; i < data.size(); ++i) {
    net.Forward(data.row(i));
    std::copy(net.probs().begin(), net.probs().end(),
              out.values.begin() + static_cast<ptrdiff_t>(i * out.cols));
  }
  return out;
}

std::vector<double> PredictProbs(const ClassifierState& model,
                                 std::span<const double> features) {
  if (features.size() != model.arch.input_width()) {
    throw Error("feature row has " + std::to_string(features.size()) +
                " entries but the model expects " +
                std::to_string(model.arch.input_width()));
  }
  Network net(model);
  net.Forward(features);
  return {net.probs().begin(), net.probs().end()};
}

double MeanCrossEntropy(const ClassifierState& model,
                        const LabeledDataset& data) {
  CheckInput(model, data);
  if (data.empty()) throw Error("cross-entropy of an empty dataset");
  const auto positions = AllPositions(data.size());
  return BatchLossGradient(model, data, positions, Objective{}, nullptr);
}

double Accuracy(const ClassifierState& model, const LabeledDataset& data) {
  if (data.empty()) throw Error("accuracy of an empty dataset");
  const Matrix probs = ForwardProbs(model, data);
  size_t correct = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    const auto r = probs.row(i);
    const auto best = std::max_element(r.begin(), r.end()) - r.begin();
    if (best == data.label(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double KlDivergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) {
    throw Error("KL divergence needs two distributions of equal length");
  }
  std::vector<double> ps, qs;
  Smooth(p, &ps);
  Smooth(q, &qs);
  double kl = 0.0;
  for (size_t k = 0; k < ps.size(); ++k) kl += ps[k] * std::log(ps[k] / qs[k]);
  return kl;
}

LossGradient ComputeLossGradient(const ClassifierState& model,
                                 const LabeledDataset& batch,
                                 const Objective& objective) {
  CheckInput(model, batch);
  if (batch.empty()) throw Error("loss of an empty batch");
  LossGradient out;
  const auto positions = AllPositions(batch.size());
  out.loss =
      BatchLossGradient(model, batch, positions, objective, &out.gradient);
  return out;
}

ClassifierState Train(const ClassifierState& model, const LabeledDataset& data,
                      const TrainConfig& cfg, TrainLog* log) {
  return TrainWithObjective(model, data, cfg, Objective{}, log);
}

ClassifierState TrainWithObjective(const ClassifierState& model,
                                   const LabeledDataset& data,
                                   const TrainConfig& cfg,
                                   const Objective& objective, TrainLog* log) {
  cfg.Validate();
  if (data.empty()) throw Error("cannot train on an empty dataset");
  CheckInput(model, data);

  ClassifierState state = model;
  const size_t n = data.size();
  const size_t batch = std::min(cfg.batch_size, n);
  TrainLog local;
  local.effective_batch_size = batch;
  local.batch_size_clipped = batch < cfg.batch_size;

  std::mt19937_64 rng(cfg.seed);
  std::vector<size_t> order = AllPositions(n);
  std::vector<double> grad;
  const double step = objective.ascend ? cfg.learning_rate : -cfg.learning_rate;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < n; start += batch) {
      const size_t len = std::min(batch, n - start);
      std::span<const size_t> positions(order.data() + start, len);
      BatchLossGradient(state, data, positions, objective, &grad);
      for (size_t i = 0; i < state.params.size(); ++i) {
        state.params[i] =
            state.prune_mask[i] ? state.params[i] + step * grad[i] : 0.0;
      }
      ++local.steps;
    }
    local.work_units += n;
    if (log != nullptr) {
      local.epoch_losses.push_back(
          BatchLossGradient(state, data, AllPositions(n), objective, nullptr));
    }
  }
  state.trained_epochs += cfg.epochs;
  if (log != nullptr) {
    if (cfg.epochs > 0) {
      local.visited_ids = data.sample_ids();
      std::sort(local.visited_ids.begin(), local.visited_ids.end());
    }
    *log = std::move(local);
  }
  return state;
}

ClassifierState OmpPrune(const ClassifierState& model, double sparsity) {
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw Error("sparsity must lie in [0, 1)");
  }
  const std::vector<bool> is_weight = WeightPositions(model.arch);
  std::vector<size_t> weights;
  for (size_t i = 0; i < is_weight.size(); ++i) {
    if (is_weight[i]) weights.push_back(i);
  }
  const size_t k = static_cast<size_t>(
      std::floor(sparsity * static_cast<double>(weights.size()) + 1e-9));
  ClassifierState pruned = model;
  if (k == 0) return pruned;
  std::stable_sort(weights.begin(), weights.end(), [&](size_t a, size_t b) {
    return std::fabs(model.params[a]) < std::fabs(model.params[b]);
  });
  for (size_t j = 0; j < k; ++j) {
    pruned.params[weights[j]] = 0.0;
    pruned.prune_mask[weights[j]] = 0;
  }
  return pruned;
}

}  // namespace unlearn
