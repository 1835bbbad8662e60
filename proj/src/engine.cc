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
#include "unlearn/engine.h"

#include <chrono>
#include <cmath>

#include "unlearn/error.h"

namespace unlearn {

using nlohmann::json;

namespace {

template <typename T>
void ReadField(const json& j, const char* key, T* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

json BoundToJson(const SelectionBound& b) {
  return json{{"z_lower", b.z_lower}, {"z_upper", b.z_upper}};
}

SelectionBound BoundFromJson(const json& j, SelectionBound b) {
  ReadField(j, "z_lower", &b.z_lower);
  ReadField(j, "z_upper", &b.z_upper);
  return b;
}

}  // namespace

void ControlKnobs::Validate() const {
  forget_bound.Validate();
  retain_bound.Validate();
  noise.Validate();
  proxy.Validate();
  finetune.Validate();
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw Error("gamma must be finite and nonnegative");
  }
  if (!(prune_sparsity >= 0.0 && prune_sparsity < 1.0)) {
    throw Error("prune_sparsity must lie in [0, 1)");
  }
}

ControlKnobs ControlKnobs::Defaults(ForgetMode mode) {
  ControlKnobs knobs;
  if (mode == ForgetMode::kClassWise) {
    knobs.forget_bound = {0.8, 1.0};
    knobs.retain_bound = {0.2, 0.3};
    knobs.noise.alpha = 12.0;
  }
  return knobs;
}

json TrainConfigToJson(const TrainConfig& cfg) {
  return json{{"epochs", cfg.epochs},
              {"learning_rate", cfg.learning_rate},
              {"batch_size", cfg.batch_size},
              {"seed", cfg.seed}};
}

TrainConfig TrainConfigFromJson(const json& j, TrainConfig base) {
  ReadField(j, "epochs", &base.epochs);
  ReadField(j, "learning_rate", &base.learning_rate);
  ReadField(j, "batch_size", &base.batch_size);
  ReadField(j, "seed", &base.seed);
  return base;
}

json KnobsToJson(const ControlKnobs& k) {
  return json{
      {"forget_bound", BoundToJson(k.forget_bound)},
      {"retain_bound", BoundToJson(k.retain_bound)},
      {"noise",
       {{"alpha", k.noise.alpha},
        {"mean", k.noise.noise_mean},
        {"std", k.noise.noise_std},
        {"seed", k.noise.seed}}},
      {"proxy",
       {{"delta_epochs", k.proxy.delta_epochs},
        {"learning_rate", k.proxy.learning_rate},
        {"batch_size", k.proxy.batch_size},
        {"seed", k.proxy.seed}}},
      {"gamma", k.gamma},
      {"finetune", TrainConfigToJson(k.finetune)},
      {"prune_sparsity", k.prune_sparsity}};
}

ControlKnobs KnobsFromJson(const json& j, ControlKnobs k) {
  if (!j.is_object()) throw Error("knobs must be a JSON object");
  if (j.contains("forget_bound")) {
    k.forget_bound = BoundFromJson(j.at("forget_bound"), k.forget_bound);
  }
  if (j.contains("retain_bound")) {
    k.retain_bound = BoundFromJson(j.at("retain_bound"), k.retain_bound);
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    ReadField(n, "alpha", &k.noise.alpha);
    ReadField(n, "mean", &k.noise.noise_mean);
    ReadField(n, "std", &k.noise.noise_std);
    ReadField(n, "seed", &k.noise.seed);
  }
  if (j.contains("proxy")) {
    const json& p = j.at("proxy");
    ReadField(p, "delta_epochs", &k.proxy.delta_epochs);
    ReadField(p, "learning_rate", &k.proxy.learning_rate);
    ReadField(p, "batch_size", &k.proxy.batch_size);
    ReadField(p, "seed", &k.proxy.seed);
  }
  ReadField(j, "gamma", &k.gamma);
  if (j.contains("finetune")) {
    k.finetune = TrainConfigFromJson(j.at("finetune"), k.finetune);
  }
  ReadField(j, "prune_sparsity", &k.prune_sparsity);
  return k;
}

PreparedUnlearningSet PrepareUnlearningSet(const ClassifierState& scoring_model,
                                           const ForgetSplit& split,
                                           const ControlKnobs& knobs) {
  PreparedUnlearningSet prepared;
  if (!split.forget.empty()) {
    prepared.forget_selection =
        SelectBounded(scoring_model, split.forget, knobs.forget_bound);
  }
  if (!split.retain.empty()) {
    prepared.retain_selection =
        SelectBounded(scoring_model, split.retain, knobs.retain_bound);
  }
  prepared.noised_forget =
      ApplyNoise(prepared.forget_selection.kept, knobs.noise);
  prepared.d_new =
      MergeById(prepared.noised_forget, prepared.retain_selection.kept);
  return prepared;
}

json UnlearnRunToJson(const UnlearnRun& run,
                      const std::optional<std::string>& snapshot_path) {
  json j{{"d_new_size", run.d_new_size},
         {"selected_forget_size", run.selected_forget_size},
         {"selected_retain_size", run.selected_retain_size},
         {"wall_time_seconds", run.wall_time_seconds},
         {"work_units", run.work_units},
         {"empty_forget_selection", run.empty_forget_selection},
         {"knobs", KnobsToJson(run.knob_snapshot)}};
  j["snapshot"] = snapshot_path ? json(*snapshot_path) : json(nullptr);
  return j;
}

UnlearnRun ConmuUnlearn(const ClassifierState& original,
                        const ForgetSplit& split, const ControlKnobs& knobs) {
  knobs.Validate();
  const ClassifierState pruned = OmpPrune(original, knobs.prune_sparsity);

  const auto start = std::chrono::steady_clock::now();
  PreparedUnlearningSet prepared = PrepareUnlearningSet(pruned, split, knobs);
  if (prepared.d_new.empty()) {
    throw Error("both selections are empty: nothing to fine-tune on "
                "(widen forget_bound or retain_bound)");
  }
  TrainLog proxy_log;
  const ClassifierState proxy =
      TrainProxy(original.arch, split.retain, knobs.proxy, &proxy_log);

  Objective objective;
  objective.kl_weight = knobs.gamma;
  objective.teacher = &proxy;
  TrainLog finetune_log;
  UnlearnRun run;
  run.unlearned = TrainWithObjective(pruned, prepared.d_new, knobs.finetune,
                                     objective, &finetune_log);
  const auto stop = std::chrono::steady_clock::now();

  run.wall_time_seconds = std::chrono::duration<double>(stop - start).count();
  run.selected_forget_size = prepared.noised_forget.size();
  run.selected_retain_size = prepared.retain_selection.kept.size();
  run.d_new_size = prepared.d_new.size();
  run.work_units = proxy_log.work_units + finetune_log.work_units;
  run.knob_snapshot = knobs;
  run.empty_forget_selection = prepared.noised_forget.empty();
  return run;
}

ClassifierState RetrainBaseline(const ArchitectureSpec& arch,
                                const LabeledDataset& retain,
                                const TrainConfig& cfg, TrainLog* log) {
  if (retain.empty()) throw Error("cannot retrain on an empty retain set");
  return Train(InitModel(arch, cfg.seed), retain, cfg, log);
}

ClassifierState FinetuneBaseline(const ClassifierState& original,
                                 const LabeledDataset& retain,
                                 const TrainConfig& cfg, TrainLog* log) {
  if (retain.empty()) throw Error("cannot fine-tune on an empty retain set");
  return Train(original, retain, cfg, log);
}

ClassifierState GradientAscentBaseline(const ClassifierState& original,
                                       const LabeledDataset& forget,
                                       const TrainConfig& cfg, TrainLog* log) {
  if (forget.empty()) {
    throw Error("cannot run gradient ascent on an empty forget set");
  }
  Objective objective;
  objective.ascend = true;
  return TrainWithObjective(original, forget, cfg, objective, log);
}

}  // namespace unlearn
