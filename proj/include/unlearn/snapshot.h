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
// Model snapshot files: a versioned JSON record of architecture, parameters,
// prune mask and metadata. Doubles are written in shortest round-trip form,
// so save followed by load reproduces every parameter bit for bit.

#ifndef UNLEARN_SNAPSHOT_H_
#define UNLEARN_SNAPSHOT_H_

#include <string>

#include "json.hpp"
#include "unlearn/model.h"

namespace unlearn {

inline constexpr const char* kSnapshotFormat = "unlearn-classifier-snapshot";
inline constexpr int kSnapshotVersion = 1;

nlohmann::json ArchitectureToJson(const ArchitectureSpec& arch);
ArchitectureSpec ArchitectureFromJson(const nlohmann::json& j);

nlohmann::json SnapshotToJson(const ClassifierState& model);
ClassifierState SnapshotFromJson(const nlohmann::json& j);

void SaveSnapshot(const ClassifierState& model, const std::string& path);
ClassifierState LoadSnapshot(const std::string& path);

}  // namespace unlearn

#endif  // UNLEARN_SNAPSHOT_H_
