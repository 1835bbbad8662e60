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
#include "unlearn/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include "unlearn/error.h"
#include "unlearn/rng.h"
#include "unlearn/snapshot.h"

namespace unlearn {

using nlohmann::json;

namespace {

// Field-scoped parsing: every failure is reported as "config.<path>: <why>".
class FieldReader {
 public:
  FieldReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) Fail("must be a JSON object");
  }

  bool has(const char* key) const {
    return j_.contains(key) && !j_.at(key).is_null();
  }

  template <typename T>
  T get(const char* key, T fallback) const {
    if (!has(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(path_ + "." + key + ": " + e.what());
    }
  }

  FieldReader child(const char* key) const {
    return FieldReader(j_.at(key), path_ + "." + key);
  }
  const json& raw(const char* key) const { return j_.at(key); }
  const std::string& path() const { return path_; }

  [[noreturn]] void Fail(const std::string& why) const {
    throw Error(path_ + ": " + why);
  }
  [[noreturn]] void Fail(const char* key, const std::string& why) const {
    throw Error(path_ + "." + key + ": " + why);
  }

 private:
  const json& j_;
  std::string path_;
};

std::string ResolvePath(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string DirectoryOf(const std::string& path) {
  return std::filesystem::path(path).parent_path().string();
}

// Layer widths of 0 at either end mean "take from the data".
ArchitectureSpec ResolveArchitecture(ArchitectureSpec arch,
                                     const LabeledDataset& data) {
  if (arch.layer_widths.front() == 0) {
    arch.layer_widths.front() = data.n_features();
  }
  if (arch.layer_widths.back() == 0) {
    arch.layer_widths.back() = static_cast<size_t>(data.n_classes());
  }
  arch.Validate();
  if (arch.input_width() != data.n_features()) {
    throw Error("config.arch: input width " +
                std::to_string(arch.input_width()) + " does not match the " +
                std::to_string(data.n_features()) + " dataset features");
  }
  if (arch.output_width() != static_cast<size_t>(data.n_classes())) {
    throw Error("config.arch: output width " +
                std::to_string(arch.output_width()) + " does not match the " +
                std::to_string(data.n_classes()) + " dataset classes");
  }
  return arch;
}

size_t MethodRank(const std::string& method) {
  const auto& known = KnownMethods();
  return static_cast<size_t>(std::find(known.begin(), known.end(), method) -
                             known.begin());
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sample standard deviation; zero for a single trial.
double StdDev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

const std::vector<const char*>& MetricKeys() {
  static const std::vector<const char*> kKeys = {
      "ta", "fa", "ra", "mia", "rte_seconds", "work_units", "frm"};
  return kKeys;
}

json PredictorToJson(const MiaPredictor& p) {
  return json{{"feature", MiaFeatureName(p.feature)},
              {"threshold", p.threshold},
              {"balanced_accuracy", p.balanced_accuracy},
              {"degenerate", p.degenerate}};
}

json TripleToJson(const MetricTriple& t) {
  return json{{"fa", t.fa}, {"ra", t.ra}, {"mia", t.mia}};
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Everything a trial needs before any unlearning method runs. None of it
// depends on the unlearning knobs, so sweeps compute it once per trial.
struct TrialBase {
  ForgetSplit split;
  ClassifierState original;
  ClassifierState retrained;
  double retrain_seconds = 0.0;
  size_t retrain_work = 0;
  MetricTriple reference;
  MetricsReport retrain_report;
};

TrialBase PrepareTrial(const ExperimentConfig& cfg, const ArchitectureSpec& arch,
                       const PreparedData& data, int trial) {
  const auto seed = [&](const char* stream) {
    return DeriveSeed(cfg.master_seed, static_cast<uint64_t>(trial), stream);
  };
  TrialBase base;
  base.split =
      cfg.forget_mode == ForgetMode::kRandom
          ? SplitRandomForget(data.train, cfg.forget_fraction, seed("split"))
          : SplitClasswiseForget(data.train, *cfg.target_class,
                                 cfg.forget_fraction, seed("split"));

  TrainConfig original_cfg = cfg.original_training;
  original_cfg.seed = seed("original.shuffle");
  base.original = Train(InitModel(arch, seed("original.init")), data.train,
                        original_cfg);

  TrainConfig retrain_cfg = cfg.original_training;
  retrain_cfg.seed = seed("retrain");
  TrainLog retrain_log;
  Stopwatch clock;
  base.retrained =
      RetrainBaseline(arch, base.split.retain, retrain_cfg, &retrain_log);
  base.retrain_seconds = clock.Seconds();
  base.retrain_work = retrain_log.work_units;

  const MiaPredictor predictor =
      TrainMia(base.retrained, base.split.retain, data.test, cfg.mia_feature);
  base.reference = MeasureTriple(base.retrained, base.split, predictor);
  base.retrain_report = Evaluate(
      base.retrained, base.split, data.test, base.reference, predictor,
      RunTiming{cfg.record_wall_clock ? base.retrain_seconds : 0.0,
                base.retrain_work});
  return base;
}

// Runs every requested method of one trial against its prepared base.
std::vector<RunRecord> RunTrial(const ExperimentConfig& cfg,
                                const PreparedData& data, int trial,
                                const TrialBase& base,
                                const ExperimentOptions& options) {
  const uint64_t master = cfg.master_seed;
  const uint64_t t = static_cast<uint64_t>(trial);
  const auto seed = [&](const char* stream) {
    return DeriveSeed(master, t, stream);
  };
  const auto timing = [&](double seconds, size_t work) {
    return RunTiming{cfg.record_wall_clock ? seconds : 0.0, work};
  };
  const ForgetSplit& split = base.split;
  const ClassifierState& original = base.original;
  const MetricTriple& reference = base.reference;

  const auto evaluate = [&](const ClassifierState& model,
                            const RunTiming& run_timing) {
    const MiaPredictor predictor =
        TrainMia(model, split.retain, data.test, cfg.mia_feature);
    return Evaluate(model, split, data.test, reference, predictor, run_timing);
  };
  const auto snapshot = [&](const std::string& method,
                            const ClassifierState& model) -> json {
    if (options.snapshot_dir.empty()) return nullptr;
    std::filesystem::create_directories(options.snapshot_dir);
    const std::string path =
        (std::filesystem::path(options.snapshot_dir) /
         (method + "_trial" + std::to_string(trial) + ".json"))
            .string();
    SaveSnapshot(model, path);
    return path;
  };
  const auto base_details = [&]() {
    return json{{"forget_size", split.forget.size()},
                {"retain_size", split.retain.size()},
                {"reference", TripleToJson(reference)}};
  };

  std::vector<RunRecord> records;
  {
    RunRecord r{"retrain", trial, base.retrain_report, base_details()};
    r.details["snapshot"] = snapshot("retrain", base.retrained);
    records.push_back(std::move(r));
  }

  const ClassifierState pruned =
      OmpPrune(original, cfg.knobs.prune_sparsity);
  for (const std::string& method : cfg.methods) {
    if (method == "retrain") continue;
    RunRecord r{method, trial, {}, base_details()};
    if (method == "original") {
      r.metrics = evaluate(original, timing(0.0, 0));
      r.details["snapshot"] = snapshot(method, original);
    } else if (method == "conmu") {
      ControlKnobs knobs = cfg.knobs;
      knobs.noise.seed = seed("conmu.noise");
      knobs.proxy.seed = seed("conmu.proxy");
      knobs.finetune.seed = seed("conmu.finetune");
      if (cfg.keep_fraction) {
        const double zf = SymmetricZForFraction(
            El2nScores(pruned, split.forget), *cfg.keep_fraction);
        const double zr = SymmetricZForFraction(
            El2nScores(pruned, split.retain), *cfg.keep_fraction);
        knobs.forget_bound = {zf, zf};
        knobs.retain_bound = {zr, zr};
      }
      UnlearnRun run = ConmuUnlearn(original, split, knobs);
      if (!cfg.record_wall_clock) run.wall_time_seconds = 0.0;
      r.metrics =
          evaluate(run.unlearned, timing(run.wall_time_seconds, run.work_units));
      const json snap = snapshot(method, run.unlearned);
      r.details["unlearn"] = UnlearnRunToJson(
          run, snap.is_null() ? std::nullopt
                              : std::optional<std::string>(snap.get<std::string>()));
      r.details["snapshot"] = snap;
    } else if (method == "finetune" || method == "gradient_ascent") {
      const bool ft = method == "finetune";
      TrainConfig tc = ft ? cfg.finetune_baseline : cfg.gradient_ascent_baseline;
      tc.seed = seed(ft ? "finetune" : "gradient_ascent");
      TrainLog log;
      Stopwatch clock;
      const ClassifierState model =
          ft ? FinetuneBaseline(pruned, split.retain, tc, &log)
             : GradientAscentBaseline(pruned, split.forget, tc, &log);
      r.metrics = evaluate(model, timing(clock.Seconds(), log.work_units));
      r.details["snapshot"] = snapshot(method, model);
    } else {
      throw Error("config.methods: unknown method '" + method + "'");
    }
    records.push_back(std::move(r));
  }
  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) {
              return MethodRank(a.method) < MethodRank(b.method);
            });
  return records;
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (trials < 1) throw Error("config.trials: must be at least 1");
  if (threads < 1) throw Error("config.threads: must be at least 1");
  if (!dataset.synthetic && dataset.csv_path.empty()) {
    throw Error("config.dataset.source: needs a synthetic spec or a csv path");
  }
  if (forget_mode == ForgetMode::kRandom) {
    if (!(forget_fraction > 0.0 && forget_fraction < 1.0)) {
      throw Error("config.forget.fraction: must lie in (0, 1)");
    }
    if (target_class) {
      throw Error("config.forget.target_class: only valid for class_wise");
    }
  } else {
    if (!(forget_fraction > 0.0 && forget_fraction <= 1.0)) {
      throw Error("config.forget.fraction: must lie in (0, 1]");
    }
    if (!target_class) {
      throw Error("config.forget.target_class: required for class_wise");
    }
  }
  if (keep_fraction && !(*keep_fraction > 0.0 && *keep_fraction <= 1.0)) {
    throw Error("config.keep_fraction: must lie in (0, 1]");
  }
  for (const auto& m : methods) {
    if (MethodRank(m) == KnownMethods().size()) {
      throw Error("config.methods: unknown method '" + m + "'");
    }
  }
  try {
    original_training.Validate();
  } catch (const Error& e) {
    throw Error(std::string("config.original_training: ") + e.what());
  }
  try {
    knobs.Validate();
  } catch (const Error& e) {
    throw Error(std::string("config.knobs: ") + e.what());
  }
  try {
    finetune_baseline.Validate();
    gradient_ascent_baseline.Validate();
  } catch (const Error& e) {
    throw Error(std::string("config.baselines: ") + e.what());
  }
}

ExperimentConfig ExperimentConfigFromJson(const json& j,
                                          const std::string& base_dir) {
  FieldReader root(j, "config");
  ExperimentConfig cfg;

  if (!root.has("dataset")) root.Fail("dataset", "missing");
  {
    FieldReader ds = root.child("dataset");
    if (!ds.has("source")) ds.Fail("source", "missing");
    FieldReader src = ds.child("source");
    if (src.has("synthetic")) {
      FieldReader syn = src.child("synthetic");
      SyntheticSpec spec;
      spec.n_samples = syn.get<size_t>("n_samples", 0);
      spec.n_features = syn.get<size_t>("n_features", 0);
      spec.n_classes = syn.get<int>("n_classes", 2);
      spec.class_separation = syn.get<double>("class_separation", 1.0);
      spec.seed = syn.get<uint64_t>("seed", 0);
      if (spec.n_samples == 0) syn.Fail("n_samples", "must be positive");
      if (spec.n_features == 0) syn.Fail("n_features", "must be positive");
      if (spec.n_classes < 2) syn.Fail("n_classes", "must be at least 2");
      if (!(spec.class_separation > 0.0)) {
        syn.Fail("class_separation", "must be positive");
      }
      cfg.dataset.synthetic = spec;
      cfg.dataset.n_classes = spec.n_classes;
    } else if (src.has("csv")) {
      cfg.dataset.csv_path =
          ResolvePath(src.get<std::string>("csv", ""), base_dir);
      cfg.dataset.label_column = src.get<std::string>("label_column", "label");
      cfg.dataset.n_classes = src.get<int>("n_classes", 2);
      if (cfg.dataset.n_classes < 2) src.Fail("n_classes", "must be at least 2");
    } else {
      src.Fail("needs either 'synthetic' or 'csv'");
    }
    if (ds.has("test")) {
      FieldReader test = ds.child("test");
      if (test.has("csv")) {
        cfg.dataset.test_csv_path =
            ResolvePath(test.get<std::string>("csv", ""), base_dir);
      } else {
        cfg.dataset.held_out_fraction =
            test.get<double>("held_out_fraction", 0.2);
        if (!(cfg.dataset.held_out_fraction > 0.0 &&
              cfg.dataset.held_out_fraction < 1.0)) {
          test.Fail("held_out_fraction", "must lie in (0, 1)");
        }
      }
    }
    cfg.dataset.standardize = ds.get<bool>("standardize", false);
  }

  if (root.has("forget")) {
    FieldReader f = root.child("forget");
    try {
      cfg.forget_mode = ParseForgetMode(f.get<std::string>("mode", "random"));
    } catch (const Error& e) {
      f.Fail("mode", e.what());
    }
    cfg.forget_fraction = f.get<double>(
        "fraction", cfg.forget_mode == ForgetMode::kRandom ? 0.2 : 0.5);
    if (f.has("target_class")) cfg.target_class = f.get<int>("target_class", 0);
  }
  cfg.knobs = ControlKnobs::Defaults(cfg.forget_mode);

  if (!root.has("arch")) root.Fail("arch", "missing");
  {
    FieldReader a = root.child("arch");
    cfg.arch.kind = a.get<std::string>("kind", "mlp");
    if (a.has("layer_widths")) {
      cfg.arch.layer_widths = a.get<std::vector<size_t>>("layer_widths", {});
    } else if (a.has("hidden_widths")) {
      cfg.arch.layer_widths = {0};
      for (size_t w : a.get<std::vector<size_t>>("hidden_widths", {})) {
        cfg.arch.layer_widths.push_back(w);
      }
      cfg.arch.layer_widths.push_back(0);
    } else {
      a.Fail("needs layer_widths or hidden_widths");
    }
    if (cfg.arch.layer_widths.size() < 3) {
      a.Fail("needs at least one hidden layer");
    }
    try {
      cfg.arch.activation =
          ParseActivation(a.get<std::string>("activation", "relu"));
    } catch (const Error& e) {
      a.Fail("activation", e.what());
    }
  }

  try {
    if (root.has("original_training")) {
      cfg.original_training = TrainConfigFromJson(
          root.raw("original_training"), cfg.original_training);
    }
  } catch (const json::exception& e) {
    throw Error(std::string("config.original_training: ") + e.what());
  }
  try {
    if (root.has("knobs")) {
      cfg.knobs = KnobsFromJson(root.raw("knobs"), cfg.knobs);
    }
  } catch (const json::exception& e) {
    throw Error(std::string("config.knobs: ") + e.what());
  }
  cfg.finetune_baseline = cfg.knobs.finetune;
  cfg.gradient_ascent_baseline = cfg.knobs.finetune;
  if (root.has("baselines")) {
    FieldReader b = root.child("baselines");
    try {
      if (b.has("finetune")) {
        cfg.finetune_baseline =
            TrainConfigFromJson(b.raw("finetune"), cfg.finetune_baseline);
      }
      if (b.has("gradient_ascent")) {
        cfg.gradient_ascent_baseline = TrainConfigFromJson(
            b.raw("gradient_ascent"), cfg.gradient_ascent_baseline);
      }
    } catch (const json::exception& e) {
      throw Error(std::string("config.baselines: ") + e.what());
    }
  }

  cfg.methods = root.get<std::vector<std::string>>("methods", cfg.methods);
  cfg.master_seed = root.get<uint64_t>("master_seed", 0);
  cfg.trials = root.get<int>("trials", 5);
  try {
    cfg.mia_feature =
        ParseMiaFeature(root.get<std::string>("mia_feature", "true_class_prob"));
  } catch (const Error& e) {
    root.Fail("mia_feature", e.what());
  }
  if (root.has("keep_fraction")) {
    cfg.keep_fraction = root.get<double>("keep_fraction", 1.0);
  }
  cfg.threads = root.get<int>("threads", 1);
  cfg.record_wall_clock = root.get<bool>("record_wall_clock", false);
  cfg.Validate();
  return cfg;
}

json ExperimentConfigToJson(const ExperimentConfig& cfg) {
  json source;
  if (cfg.dataset.synthetic) {
    const SyntheticSpec& s = *cfg.dataset.synthetic;
    source["synthetic"] = {{"n_samples", s.n_samples},
                           {"n_features", s.n_features},
                           {"n_classes", s.n_classes},
                           {"class_separation", s.class_separation},
                           {"seed", s.seed}};
  } else {
    source = {{"csv", cfg.dataset.csv_path},
              {"label_column", cfg.dataset.label_column},
              {"n_classes", cfg.dataset.n_classes}};
  }
  json test = cfg.dataset.test_csv_path.empty()
                  ? json{{"held_out_fraction", cfg.dataset.held_out_fraction}}
                  : json{{"csv", cfg.dataset.test_csv_path}};
  json forget{{"mode", ForgetModeName(cfg.forget_mode)},
              {"fraction", cfg.forget_fraction}};
  forget["target_class"] =
      cfg.target_class ? json(*cfg.target_class) : json(nullptr);
  json j{{"dataset",
          {{"source", source},
           {"test", test},
           {"standardize", cfg.dataset.standardize}}},
         {"forget", forget},
         {"arch", ArchitectureToJson(cfg.arch)},
         {"original_training", TrainConfigToJson(cfg.original_training)},
         {"knobs", KnobsToJson(cfg.knobs)},
         {"baselines",
          {{"finetune", TrainConfigToJson(cfg.finetune_baseline)},
           {"gradient_ascent", TrainConfigToJson(cfg.gradient_ascent_baseline)}}},
         {"methods", cfg.methods},
         {"master_seed", cfg.master_seed},
         {"trials", cfg.trials},
         {"mia_feature", MiaFeatureName(cfg.mia_feature)},
         {"record_wall_clock", cfg.record_wall_clock}};
  j["keep_fraction"] =
      cfg.keep_fraction ? json(*cfg.keep_fraction) : json(nullptr);
  return j;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  return ExperimentConfigFromJson(ReadJsonFile(path), DirectoryOf(path));
}

PreparedData PrepareData(const DatasetSource& source, uint64_t master_seed) {
  PreparedData data;
  LabeledDataset pool;
  if (source.synthetic) {
    pool = GenerateSynthetic(*source.synthetic);
  } else {
    pool = LoadCsv(source.csv_path, source.label_column, source.n_classes);
  }
  if (!source.test_csv_path.empty()) {
    data.train = std::move(pool);
    LabeledDataset test =
        LoadCsv(source.test_csv_path, source.label_column, source.n_classes);
    // Keep test ids disjoint from training ids.
    std::vector<int64_t> ids = test.sample_ids();
    const int64_t offset = static_cast<int64_t>(data.train.size());
    for (auto& id : ids) id += offset;
    data.test = LabeledDataset(test.features(), test.n_features(),
                               test.labels(), test.n_classes(), std::move(ids));
  } else {
    auto [train, test] =
        HoldOut(pool, source.held_out_fraction, DeriveSeed(master_seed, 0, "holdout"));
    data.train = std::move(train);
    data.test = std::move(test);
  }
  if (data.train.n_features() != data.test.n_features()) {
    throw Error("config.dataset.test: feature count differs from training data");
  }
  if (source.standardize) {
    const ColumnScaler scaler = ColumnScaler::Fit(data.train);
    data.train = scaler.Apply(data.train);
    data.test = scaler.Apply(data.test);
  }
  return data;
}

json ExperimentResult::ToJson() const {
  json runs_json = json::array();
  for (const RunRecord& r : runs) {
    json rec{{"method", r.method},
             {"trial", r.trial},
             {"metrics", MetricsToJson(r.metrics)},
             {"mia_predictor", PredictorToJson(r.metrics.predictor)},
             {"ta_samples", r.metrics.ta_samples}};
    for (auto it = r.details.begin(); it != r.details.end(); ++it) {
      rec[it.key()] = it.value();
    }
    runs_json.push_back(std::move(rec));
  }
  json summary_json = json::array();
  for (const MethodSummary& s : summary) {
    summary_json.push_back({{"method", s.method},
                            {"mean", s.mean},
                            {"std", s.stddev},
                            {"median", s.median}});
  }
  return json{{"format", kResultsFormat},
              {"version", kResultsVersion},
              {"reference_method", "retrain"},
              {"units", {{"rates", "percent"},
                         {"mia", "efficacy = TN / |D_f|"},
                         {"work_units", "training sample visits"}}},
              {"config", ExperimentConfigToJson(config)},
              {"runs", runs_json},
              {"summary", summary_json}};
}

namespace {

// Shared by RunExperiment and RunSweep. When `bases` is non-null it caches the
// per-trial bases; entries already present are reused.
ExperimentResult RunWithBases(const ExperimentConfig& cfg,
                              const ExperimentOptions& options,
                              std::vector<std::optional<TrialBase>>* bases) {
  cfg.Validate();
  const PreparedData data = PrepareData(cfg.dataset, cfg.master_seed);
  ExperimentResult result;
  result.config = cfg;
  result.config.arch = ResolveArchitecture(cfg.arch, data.train);
  const ArchitectureSpec arch = result.config.arch;
  if (cfg.target_class &&
      (*cfg.target_class < 0 || *cfg.target_class >= data.train.n_classes())) {
    throw Error("config.forget.target_class: outside [0, " +
                std::to_string(data.train.n_classes()) + ")");
  }

  std::vector<std::optional<TrialBase>> local;
  if (bases == nullptr) bases = &local;
  bases->resize(static_cast<size_t>(cfg.trials));
  std::vector<std::vector<RunRecord>> per_trial(static_cast<size_t>(cfg.trials));
  const auto run_one = [&](int t) {
    auto& base = (*bases)[static_cast<size_t>(t)];
    if (!base) base = PrepareTrial(cfg, arch, data, t);
    per_trial[static_cast<size_t>(t)] = RunTrial(cfg, data, t, *base, options);
  };
  if (cfg.threads <= 1 || cfg.trials == 1) {
    for (int t = 0; t < cfg.trials; ++t) run_one(t);
  } else {
    // Trials are independent; results land in fixed slots so the output does
    // not depend on scheduling.
    std::atomic<int> next{0};
    std::vector<std::future<void>> workers;
    const int n_workers = std::min(cfg.threads, cfg.trials);
    for (int w = 0; w < n_workers; ++w) {
      workers.push_back(std::async(std::launch::async, [&] {
        for (int t = next++; t < cfg.trials; t = next++) run_one(t);
      }));
    }
    for (auto& w : workers) w.get();
  }
  for (auto& trial_runs : per_trial) {
    for (auto& r : trial_runs) result.runs.push_back(std::move(r));
  }

  std::map<size_t, std::vector<const RunRecord*>> by_method;
  for (const RunRecord& r : result.runs) {
    by_method[MethodRank(r.method)].push_back(&r);
  }
  for (const auto& [rank, records] : by_method) {
    MethodSummary s;
    s.method = KnownMethods()[rank];
    for (const char* key : MetricKeys()) {
      std::vector<double> values;
      for (const RunRecord* r : records) {
        values.push_back(MetricsToJson(r->metrics).at(key).get<double>());
      }
      s.mean[key] = Mean(values);
      s.stddev[key] = StdDev(values);
      s.median[key] = Median(values);
    }
    result.summary.push_back(std::move(s));
  }
  return result;
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               const ExperimentOptions& options) {
  return RunWithBases(cfg, options, nullptr);
}

const char* SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kSelectionFraction:
      return "selection_fraction";
    case SweepAxis::kAlpha:
      return "alpha";
    case SweepAxis::kDelta:
      return "delta";
  }
  return "?";
}

SweepAxis ParseSweepAxis(const std::string& name) {
  if (name == "selection_fraction") return SweepAxis::kSelectionFraction;
  if (name == "alpha") return SweepAxis::kAlpha;
  if (name == "delta") return SweepAxis::kDelta;
  throw Error("unknown sweep axis '" + name +
              "' (expected selection_fraction, alpha or delta)");
}

void SweepSpec::Validate() const {
  if (values.empty()) throw Error("sweep.values: must not be empty");
  for (size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw Error("sweep.values: must be strictly increasing");
    }
  }
  for (double v : values) {
    switch (axis) {
      case SweepAxis::kSelectionFraction:
        if (!(v > 0.0 && v <= 1.0)) {
          throw Error("sweep.values: selection fractions must lie in (0, 1]");
        }
        break;
      case SweepAxis::kAlpha:
        if (!(v >= 0.0)) throw Error("sweep.values: alpha must be >= 0");
        break;
      case SweepAxis::kDelta:
        if (!(v >= 0.0) || v != std::floor(v)) {
          throw Error("sweep.values: delta must be a nonnegative integer");
        }
        break;
    }
  }
  if (std::find(base.methods.begin(), base.methods.end(), method) ==
          base.methods.end() &&
      method != "retrain") {
    throw Error("sweep.method: '" + method + "' is not run by the base config");
  }
  base.Validate();
}

SweepSpec SweepSpecFromJson(const json& j, const std::string& base_dir) {
  FieldReader root(j, "sweep");
  SweepSpec spec;
  try {
    spec.axis = ParseSweepAxis(root.get<std::string>("axis", ""));
  } catch (const Error& e) {
    root.Fail("axis", e.what());
  }
  spec.values = root.get<std::vector<double>>("values", {});
  spec.method = root.get<std::string>("method", "conmu");
  if (root.has("base")) {
    if (root.raw("base").is_string()) {
      const std::string path =
          ResolvePath(root.get<std::string>("base", ""), base_dir);
      spec.base = LoadExperimentConfig(path);
    } else {
      spec.base = ExperimentConfigFromJson(root.raw("base"), base_dir);
    }
  } else {
    root.Fail("base", "missing");
  }
  spec.Validate();
  return spec;
}

SweepSpec LoadSweepSpec(const std::string& path) {
  return SweepSpecFromJson(ReadJsonFile(path), DirectoryOf(path));
}

SweepTable RunSweep(const SweepSpec& spec) {
  spec.Validate();
  // The swept knobs never touch the split, the original or the reference.
  std::vector<std::optional<TrialBase>> bases;
  SweepTable table;
  table.axis = spec.axis;
  table.method = spec.method;
  for (double value : spec.values) {
    ExperimentConfig cfg = spec.base;
    switch (spec.axis) {
      case SweepAxis::kSelectionFraction:
        cfg.keep_fraction = value;
        break;
      case SweepAxis::kAlpha:
        cfg.knobs.noise.alpha = value;
        break;
      case SweepAxis::kDelta:
        cfg.knobs.proxy.delta_epochs = static_cast<int>(value);
        break;
    }
    const ExperimentResult result = RunWithBases(cfg, {}, &bases);
    std::vector<const RunRecord*> rows;
    for (const RunRecord& r : result.runs) {
      if (r.method == spec.method) rows.push_back(&r);
    }
    const auto column = [&](auto field) {
      std::vector<double> v;
      for (const RunRecord* r : rows) v.push_back(field(r->metrics));
      return v;
    };
    SweepRow row;
    row.axis_value = value;
    const auto fill = [&](MetricsReport* out, auto reduce) {
      out->ta = reduce(column([](const MetricsReport& m) { return m.ta; }));
      out->fa = reduce(column([](const MetricsReport& m) { return m.fa; }));
      out->ra = reduce(column([](const MetricsReport& m) { return m.ra; }));
      out->mia = reduce(column([](const MetricsReport& m) { return m.mia; }));
      out->frm = reduce(column([](const MetricsReport& m) { return m.frm; }));
      out->rte_seconds =
          reduce(column([](const MetricsReport& m) { return m.rte_seconds; }));
      out->work_units = static_cast<size_t>(std::llround(reduce(column(
          [](const MetricsReport& m) {
            return static_cast<double>(m.work_units);
          }))));
    };
    fill(&row.mean, Mean);
    fill(&row.median, Median);
    std::vector<double> selected;
    for (const RunRecord* r : rows) {
      if (r->details.contains("unlearn")) {
        const json& u = r->details.at("unlearn");
        selected.push_back(u.at("d_new_size").get<double>());
      }
    }
    row.mean_selected = selected.empty() ? 0.0 : Mean(selected);
    table.rows.push_back(row);
  }
  return table;
}

std::string SweepTable::ToCsv() const {
  std::ostringstream out;
  out.precision(17);
  if (axis == SweepAxis::kSelectionFraction) {
    out << "# selection_fraction: per trial, forget and retain bands are "
           "each widened symmetrically (z_lower = z_upper) to the narrowest "
           "band keeping at least this share of the set\n";
  }
  out << "# method: " << method << "; rates in percent; "
      << "mean_* and median_* over trials\n";
  out << SweepAxisName(axis)
      << ",mean_ta,mean_fa,mean_ra,mean_mia,mean_frm,mean_work_units,"
         "median_ta,median_fa,median_ra,median_mia,median_frm,"
         "median_work_units,mean_selected\n";
  for (const SweepRow& r : rows) {
    out << r.axis_value << ',' << 100.0 * r.mean.ta << ',' << 100.0 * r.mean.fa
        << ',' << 100.0 * r.mean.ra << ',' << 100.0 * r.mean.mia << ','
        << r.mean.frm << ',' << r.mean.work_units << ','
        << 100.0 * r.median.ta << ',' << 100.0 * r.median.fa << ','
        << 100.0 * r.median.ra << ',' << 100.0 * r.median.mia << ','
        << r.median.frm << ',' << r.median.work_units << ','
        << r.mean_selected << '\n';
  }
  return out.str();
}

}  // namespace unlearn
