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
#include "unlearn/snapshot.h"

#include <fstream>

#include "unlearn/error.h"

namespace unlearn {

using nlohmann::json;

json ArchitectureToJson(const ArchitectureSpec& arch) {
  return json{{"kind", arch.kind},
              {"layer_widths", arch.layer_widths},
              {"activation", ActivationName(arch.activation)}};
}

ArchitectureSpec ArchitectureFromJson(const json& j) {
  ArchitectureSpec arch;
  try {
    arch.kind = j.value("kind", std::string("mlp"));
    arch.layer_widths = j.at("layer_widths").get<std::vector<size_t>>();
    arch.activation = ParseActivation(j.value("activation", std::string("relu")));
  } catch (const json::exception& e) {
    throw Error(std::string("arch: ") + e.what());
  }
  arch.Validate();
  return arch;
}

json SnapshotToJson(const ClassifierState& model) {
  return json{{"format", kSnapshotFormat},
              {"version", kSnapshotVersion},
              {"arch", ArchitectureToJson(model.arch)},
              {"params", model.params},
              {"prune_mask", model.prune_mask},
              {"rng_seed", model.rng_seed},
              {"trained_epochs", model.trained_epochs}};
}

ClassifierState SnapshotFromJson(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kSnapshotFormat) {
      throw Error("not a classifier snapshot");
    }
    const int version = j.at("version").get<int>();
    if (version != kSnapshotVersion) {
      throw Error("unsupported snapshot version " + std::to_string(version));
    }
    ClassifierState model;
    model.arch = ArchitectureFromJson(j.at("arch"));
    model.params = j.at("params").get<std::vector<double>>();
    model.prune_mask = j.at("prune_mask").get<std::vector<uint8_t>>();
    model.rng_seed = j.at("rng_seed").get<uint64_t>();
    model.trained_epochs = j.at("trained_epochs").get<int>();
    if (model.params.size() != ParameterCount(model.arch) ||
        model.prune_mask.size() != model.params.size()) {
      throw Error("snapshot parameter count does not match its architecture");
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed snapshot: ") + e.what());
  }
}

void SaveSnapshot(const ClassifierState& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write snapshot '" + path + "'");
  out << SnapshotToJson(model).dump() << '\n';
  if (!out) throw Error("failed while writing snapshot '" + path + "'");
}

ClassifierState LoadSnapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open snapshot '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("snapshot '" + path + "' is not valid JSON: " + e.what());
  }
  return SnapshotFromJson(j);
}

}  // namespace unlearn
