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
// Config-driven experiment harness: one comparison run over several trials,
// knob sweeps over a single axis, and Table-style reports of the results.
//
// Every random stream is derived from (master_seed, trial, stream name), so a
// config file fixes every emitted number regardless of method order or
// thread count. Wall-clock runtime is the one exception and is only recorded
// when the config asks for it.

#ifndef UNLEARN_EXPERIMENT_H_
#define UNLEARN_EXPERIMENT_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "unlearn/dataset.h"
#include "unlearn/engine.h"
#include "unlearn/metrics.h"
#include "unlearn/model.h"

namespace unlearn {

inline constexpr const char* kResultsFormat = "unlearn-results";
inline constexpr int kResultsVersion = 1;

// Canonical method names, in report order. "retrain" is always run because
// it is the FRM reference; "original" evaluates the untouched model.
inline const std::vector<std::string>& KnownMethods() {
  static const std::vector<std::string> kMethods = {
      "retrain", "original", "conmu", "finetune", "gradient_ascent"};
  return kMethods;
}

struct DatasetSource {
  // Exactly one of synthetic / csv_path is used.
  std::optional<SyntheticSpec> synthetic;
  std::string csv_path;
  std::string label_column = "label";
  int n_classes = 2;
  // Test data: a CSV with the same schema, or a held-out share of the source.
  std::string test_csv_path;
  double held_out_fraction = 0.2;
  bool standardize = false;
};

struct ExperimentConfig {
  DatasetSource dataset;
  ForgetMode forget_mode = ForgetMode::kRandom;
  double forget_fraction = 0.2;
  std::optional<int> target_class;
  ArchitectureSpec arch;
  TrainConfig original_training{30, 5e-2, 32, 0};
  ControlKnobs knobs;
  TrainConfig finetune_baseline;
  TrainConfig gradient_ascent_baseline;
  std::vector<std::string> methods = {"conmu", "finetune", "gradient_ascent"};
  uint64_t master_seed = 0;
  int trials = 5;
  MiaFeature mia_feature = MiaFeature::kTrueClassProb;
  // When set, both selection bands are replaced per trial by the narrowest
  // symmetric band keeping at least this share of each set.
  std::optional<double> keep_fraction;
  int threads = 1;
  bool record_wall_clock = false;

  void Validate() const;
};

// Parses a config object. Errors name the offending field, e.g.
// "config.forget.fraction: must lie in (0, 1)". Relative CSV paths are
// resolved against base_dir.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j,
                                          const std::string& base_dir = "");
nlohmann::json ExperimentConfigToJson(const ExperimentConfig& cfg);
ExperimentConfig LoadExperimentConfig(const std::string& path);

// Training and test data after loading/generation and optional scaling.
struct PreparedData {
  LabeledDataset train;
  LabeledDataset test;
};
PreparedData PrepareData(const DatasetSource& source, uint64_t master_seed);

struct RunRecord {
  std::string method;
  int trial = 0;
  MetricsReport metrics;
  nlohmann::json details;  // method-specific bookkeeping
};

struct MethodSummary {
  std::string method;
  nlohmann::json mean;
  nlohmann::json stddev;
  nlohmann::json median;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunRecord> runs;  // ordered by (trial, canonical method)
  std::vector<MethodSummary> summary;

  nlohmann::json ToJson() const;
};

struct ExperimentOptions {
  // Directory for unlearned-model snapshots; empty disables them.
  std::string snapshot_dir;
};

ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               const ExperimentOptions& options = {});

enum class SweepAxis { kSelectionFraction, kAlpha, kDelta };

const char* SweepAxisName(SweepAxis axis);
SweepAxis ParseSweepAxis(const std::string& name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kAlpha;
  std::vector<double> values;  // non-empty, strictly increasing
  ExperimentConfig base;
  // Which method's rows feed the table.
  std::string method = "conmu";

  void Validate() const;
};

SweepSpec SweepSpecFromJson(const nlohmann::json& j,
                            const std::string& base_dir = "");
SweepSpec LoadSweepSpec(const std::string& path);

// Column statistics of one method across trials.
struct SweepRow {
  double axis_value = 0.0;
  MetricsReport mean;
  MetricsReport median;
  double mean_selected = 0.0;  // mean |D_f'| + |D_r'|
};

struct SweepTable {
  SweepAxis axis = SweepAxis::kAlpha;
  std::string method;
  std::vector<SweepRow> rows;

  std::string ToCsv() const;
};

SweepTable RunSweep(const SweepSpec& spec);

// Rendered comparison of one results document.
struct RenderedReport {
  std::string table;  // human-readable, 2-decimal percentages
  std::string csv;    // one row per (method, trial)
};

RenderedReport RenderReport(const nlohmann::json& results);
RenderedReport RenderReportFile(const std::string& results_path);

}  // namespace unlearn

#endif  // UNLEARN_EXPERIMENT_H_
