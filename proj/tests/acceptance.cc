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
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.
//
//   acceptance <path to unlearn_bench> <configs dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.h"
#include "unlearn/engine.h"
#include "unlearn/experiment.h"
#include "unlearn/metrics.h"
#include "unlearn/noise.h"
#include "unlearn/proxy.h"
#include "unlearn/selection.h"

namespace {

using namespace unlearn;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kFrmClasswiseTarget = 0.925, kFrmClasswiseTol = 0.005;
constexpr double kFrmRandomTarget = 0.855, kFrmRandomTol = 0.010;
constexpr double kOracleRelTol = 1e-9;
constexpr double kGradRelTol = 1e-4;
constexpr double kFdStep = 1e-5;
constexpr int kMaxInversions = 1;

std::string g_bench;
std::filesystem::path g_configs;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

double RelErr(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return a == b ? 0.0 : std::fabs(a - b) / scale;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

ArchitectureSpec Mlp(std::vector<size_t> widths, Activation act) {
  ArchitectureSpec a;
  a.layer_widths = std::move(widths);
  a.activation = act;
  return a;
}

int Inversions(const std::vector<double>& v, bool increasing) {
  int n = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    n += increasing ? v[i] < v[i - 1] : v[i] > v[i - 1];
  }
  return n;
}

std::string Join(const std::vector<double>& v) {
  std::ostringstream out;
  out.precision(4);
  for (size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return "[" + out.str() + "]";
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1. FRM arithmetic on the two reported rows.
void FrmPaperRows(Outcome& o) {
  const auto t0 = Clock::now();
  const double cw = FrmScore({67.23, 86.68, 32.92}, {68.22, 89.67, 33.92});
  const double rnd = FrmScore({81.22, 81.75, 18.93}, {80.46, 91.47, 19.62});
  const double elapsed = Seconds(t0);
  o.detail << "class-wise " << cw << ", random " << rnd << ", " << elapsed * 1e3
           << " ms";
  o.Require(std::fabs(cw - kFrmClasswiseTarget) <= kFrmClasswiseTol,
            "class-wise row");
  o.Require(std::fabs(rnd - kFrmRandomTarget) <= kFrmRandomTol, "random row");
  o.Require(elapsed < 1e-3, "runtime");
}

// 2. FRM(retrained, retrained) == 1 and the ConMU -> fine-tune reduction.
void ExactFixedPoint(Outcome& o) {
  const auto t0 = Clock::now();
  const LabeledDataset all = GenerateSynthetic({625, 5, 2, 2.0, 17});
  const auto [data, test] = HoldOut(all, 0.2, 3);
  const ForgetSplit split = SplitRandomForget(data, 0.2, 5);
  const ArchitectureSpec arch = Mlp({5, 16, 2}, Activation::kRelu);
  const ClassifierState retrained =
      RetrainBaseline(arch, split.retain, {10, 5e-2, 16, 1});
  const MiaPredictor pred = TrainMia(retrained, split.retain, test);
  const MetricTriple ref = MeasureTriple(retrained, split, pred);
  const MetricsReport self = Evaluate(retrained, split, test, ref, pred, {});
  o.Require(self.frm == 1.0, "self FRM");

  const ClassifierState original =
      Train(InitModel(arch, 2), data, {10, 5e-2, 16, 3});
  ControlKnobs k;
  k.forget_bound = {1e9, 1e9};
  k.retain_bound = {1e9, 1e9};
  k.noise.alpha = 0.0;
  k.gamma = 0.0;
  k.prune_sparsity = 0.0;
  k.finetune.seed = 99;
  const UnlearnRun run = ConmuUnlearn(original, split, k);
  const ClassifierState ft = Train(original, data, k.finetune);
  const bool bitwise = run.unlearned.params == ft.params;
  const double elapsed = Seconds(t0);
  o.detail << "self FRM " << self.frm << ", reduction "
           << (bitwise ? "bitwise identical" : "DIFFERS") << " over "
           << ft.params.size() << " params, n=" << data.size() << ", "
           << elapsed << " s";
  o.Require(bitwise, "reduction identity");
  o.Require(elapsed < 10.0, "runtime");
}

// 3. Library vs brute-force oracles on 50 random small instances.
void OracleEquivalence(Outcome& o) {
  std::mt19937_64 rng(2024);
  double worst_el2n = 0, worst_kl = 0, worst_frm = 0, worst_mia = 0;
  int band_mismatch = 0, threshold_mismatch = 0;
  std::uniform_real_distribution<> u(0.0, 1.0);
  for (int inst = 0; inst < 50; ++inst) {
    const int classes = 2 + static_cast<int>(rng() % 3);
    const size_t d = 1 + rng() % 5, n = 3 + rng() % 40;
    const auto act = inst % 2 ? Activation::kTanh : Activation::kRelu;
    const ArchitectureSpec arch =
        Mlp({d, 2 + rng() % 6, static_cast<size_t>(classes)}, act);
    const ClassifierState m = InitModel(arch, rng());
    const ClassifierState t = InitModel(arch, rng());
    const LabeledDataset data = oracle::RandomData(n, d, classes, rng, 2.0);

    const auto scores = El2nScores(m, data);
    for (size_t i = 0; i < n; ++i) {
      worst_el2n = std::max(
          worst_el2n,
          RelErr(scores[i], oracle::El2n(oracle::Probs(m, oracle::Row(data, i)),
                                         data.label(i))));
    }
    const double zl = 2 * u(rng), zu = 2 * u(rng);
    band_mismatch +=
        SelectByScores(data, scores, {zl, zu}).kept_positions !=
        oracle::Band(scores, zl, zu);

    double kl = 0;
    for (size_t i = 0; i < n; ++i) {
      kl += oracle::Kl(oracle::Probs(t, oracle::Row(data, i)),
                       oracle::Probs(m, oracle::Row(data, i)));
    }
    worst_kl = std::max(worst_kl, RelErr(KlLoss(t, m, data), kl / n));

    const MetricTriple a{100 * u(rng), 100 * u(rng), 100 * u(rng)};
    const MetricTriple r{1 + 99 * u(rng), 1 + 99 * u(rng), 1 + 99 * u(rng)};
    worst_frm = std::max(worst_frm, RelErr(FrmScore(a, r),
                                           oracle::Frm(a.fa, r.fa, a.ra, r.ra,
                                                       a.mia, r.mia)));

    std::vector<double> mem(1 + rng() % 20), non(1 + rng() % 20);
    for (double& v : mem) v = std::round(u(rng) * 20) / 20;
    for (double& v : non) v = std::round(u(rng) * 15) / 20;
    const MiaPredictor p = FitMiaThreshold(mem, non, MiaFeature::kTrueClassProb);
    const oracle::Threshold ot = oracle::BestThreshold(mem, non);
    threshold_mismatch += p.threshold != ot.threshold;
    worst_mia = std::max(worst_mia, RelErr(p.balanced_accuracy, ot.balanced_accuracy));
  }
  o.detail << "max rel err: el2n " << worst_el2n << ", kl " << worst_kl
           << ", frm " << worst_frm << ", mia-ba " << worst_mia
           << "; band mismatches " << band_mismatch << ", threshold mismatches "
           << threshold_mismatch;
  o.Require(worst_el2n <= kOracleRelTol, "el2n");
  o.Require(worst_kl <= kOracleRelTol, "kl");
  o.Require(worst_frm <= kOracleRelTol, "frm");
  o.Require(worst_mia <= kOracleRelTol && threshold_mismatch == 0, "mia");
  o.Require(band_mismatch == 0, "band");
}

// 4. Analytic gradients vs central differences.
void GradientCorrectness(Outcome& o) {
  std::mt19937_64 rng(4242);
  double worst_ce = 0, worst_kl = 0;
  for (int probe = 0; probe < 100; ++probe) {
    const bool with_kl = probe % 2 == 1;
    const auto act = (probe / 2) % 2 ? Activation::kTanh : Activation::kRelu;
    const size_t d = 2 + rng() % 4;
    const size_t c = 2 + rng() % 3;
    const ArchitectureSpec arch = Mlp({d, 3 + rng() % 5, c}, act);
    const ClassifierState m = InitModel(arch, rng());
    const ClassifierState teacher = InitModel(arch, rng());
    const LabeledDataset batch =
        oracle::RandomData(2 + rng() % 6, d, static_cast<int>(c), rng);
    const Objective obj{with_kl ? 0.5 : 0.0, with_kl ? &teacher : nullptr, false};
    const LossGradient lg = ComputeLossGradient(m, batch, obj);
    const size_t i = rng() % m.params.size();
    ClassifierState plus = m, minus = m;
    plus.params[i] += kFdStep;
    minus.params[i] -= kFdStep;
    const double fd =
        (oracle::Objective(plus, batch, obj.kl_weight, obj.teacher) -
         oracle::Objective(minus, batch, obj.kl_weight, obj.teacher)) /
        (2 * kFdStep);
    // Absolute floor for coordinates whose true derivative is ~0.
    const double err = std::fabs(fd - lg.gradient[i]) /
                       std::max({std::fabs(fd), std::fabs(lg.gradient[i]), 1e-7});
    (with_kl ? worst_kl : worst_ce) = std::max(with_kl ? worst_kl : worst_ce, err);
  }
  o.detail << "100 probes, max rel err CE " << worst_ce << ", CE+0.5*KL "
           << worst_kl;
  o.Require(worst_ce <= kGradRelTol, "CE gradient");
  o.Require(worst_kl <= kGradRelTol, "KL gradient");
}

// 5. Nested bands give nested kept sets; wider bands never cost less work.
void SelectionMonotonicity(Outcome& o) {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<> u(0.0, 1.5);
  int violations = 0, work_violations = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const size_t d = 2 + rng() % 4;
    const LabeledDataset data = oracle::RandomData(30 + rng() % 100, d, 2, rng, 2.0);
    const ClassifierState m =
        InitModel(Mlp({d, 6, 2}, Activation::kTanh), rng());
    const SelectionBound narrow{u(rng), u(rng)};
    const SelectionBound wide{narrow.z_lower + u(rng), narrow.z_upper + u(rng)};
    const auto kn = SelectBounded(m, data, narrow).kept_ids;
    const auto kw = SelectBounded(m, data, wide).kept_ids;
    violations += !std::includes(kw.begin(), kw.end(), kn.begin(), kn.end());
  }
  const LabeledDataset data = GenerateSynthetic({300, 4, 2, 2.0, 5});
  const ForgetSplit split = SplitRandomForget(data, 0.2, 6);
  const ClassifierState original = Train(
      InitModel(Mlp({4, 12, 2}, Activation::kRelu), 1), data, {10, 5e-2, 16, 2});
  ControlKnobs k = ControlKnobs::Defaults(ForgetMode::kRandom);
  size_t previous = 0;
  for (double z : {0.1, 0.3, 0.6, 1.0, 2.0, 1e9}) {
    k.forget_bound = {z, z};
    k.retain_bound = {z, z};
    const size_t work = ConmuUnlearn(original, split, k).work_units;
    work_violations += work < previous;
    previous = work;
  }
  o.detail << "20 datasets, inclusion violations " << violations
           << "; engine work violations " << work_violations;
  o.Require(violations == 0, "nested kept sets");
  o.Require(work_violations == 0, "work monotone");
}

// 6. Noise moments and the alpha = 0 identity.
void NoiseMoments(Outcome& o) {
  const size_t n = 100000;
  std::vector<int64_t> ids(n);
  for (size_t i = 0; i < n; ++i) ids[i] = static_cast<int64_t>(i);
  const LabeledDataset zeros(std::vector<double>(n, 0.0), 1,
                             std::vector<int>(n, 0), 2, ids);
  const LabeledDataset noised = ApplyNoise(zeros, {3.0, 0.0, 1.0, 6});
  double mean = 0;
  for (double v : noised.features()) mean += v;
  mean /= n;
  double var = 0;
  for (double v : noised.features()) var += (v - mean) * (v - mean);
  var /= n;
  const bool identity = ApplyNoise(noised, {0.0, 0.0, 1.0, 6}) == noised;
  o.detail << "mean " << mean << " (bound " << 3 * 1.0 / std::sqrt(double(n))
           << "), variance " << var << " (target 9 +/- 5%), alpha=0 "
           << (identity ? "identity" : "CHANGED");
  o.Require(std::fabs(mean) <= 3.0 * 1.0 / std::sqrt(double(n)), "mean");
  o.Require(std::fabs(var - 9.0) <= 0.05 * 9.0, "variance");
  o.Require(identity, "alpha=0");
}

std::vector<double> Column(const SweepTable& t,
                           double (*get)(const SweepRow&)) {
  std::vector<double> v;
  for (const SweepRow& r : t.rows) v.push_back(get(r));
  return v;
}

// 7. Desk-scale trends of the three ablation axes (medians over 5 seeds).
void KnobTrends(Outcome& o) {
  const auto t0 = Clock::now();
  const SweepTable a = RunSweep(LoadSweepSpec((g_configs / "sweep_alpha.json").string()));
  const SweepTable d = RunSweep(LoadSweepSpec((g_configs / "sweep_delta.json").string()));
  const SweepTable b = RunSweep(
      LoadSweepSpec((g_configs / "sweep_selection_fraction.json").string()));
  const double elapsed = Seconds(t0);

  const auto a_fa = Column(a, [](const SweepRow& r) { return r.median.fa; });
  const auto a_frm = Column(a, [](const SweepRow& r) { return r.median.frm; });
  const auto d_frm = Column(d, [](const SweepRow& r) { return r.median.frm; });
  const auto d_work = Column(d, [](const SweepRow& r) {
    return static_cast<double>(r.median.work_units);
  });
  const auto b_ta = Column(b, [](const SweepRow& r) { return r.median.ta; });
  o.detail << "alpha: FA " << Join(a_fa) << " FRM " << Join(a_frm)
           << "; delta: FRM " << Join(d_frm) << " work " << Join(d_work)
           << "; band: TA " << Join(b_ta) << "; " << elapsed << " s";
  o.Require(Inversions(a_fa, false) <= kMaxInversions, "(a) FA decreasing");
  o.Require(Inversions(a_frm, true) <= kMaxInversions, "(a) FRM increasing");
  o.Require(Inversions(d_frm, true) <= kMaxInversions, "(b) FRM increasing");
  bool strict = true;
  for (size_t i = 1; i < d_work.size(); ++i) strict &= d_work[i] > d_work[i - 1];
  o.Require(strict, "(b) work strictly increasing");
  o.Require(Inversions(b_ta, true) <= kMaxInversions, "(c) TA increasing");
  o.Require(elapsed < 180.0, "runtime");
}

// 8. Baseline sanity and ConMU beating the do-nothing original.
void BaselineBehavior(Outcome& o) {
  const LabeledDataset data = GenerateSynthetic({400, 4, 2, 2.0, 8});
  const ForgetSplit split = SplitRandomForget(data, 0.2, 9);
  const ClassifierState original = Train(
      InitModel(Mlp({4, 16, 2}, Activation::kRelu), 1), data, {20, 5e-2, 16, 2});
  const double ce_before = MeanCrossEntropy(original, split.forget);
  const double ce_after = MeanCrossEntropy(
      GradientAscentBaseline(original, split.forget, {1, 1e-3, 128, 3}),
      split.forget);
  const bool ft_identity =
      FinetuneBaseline(original, split.retain, {0, 1e-2, 128, 3}) == original;

  const ExperimentResult r = RunExperiment(
      LoadExperimentConfig((g_configs / "desk_random.json").string()));
  std::vector<double> frm_u, frm_o;
  for (const RunRecord& run : r.runs) {
    if (run.method == "conmu") frm_u.push_back(run.metrics.frm);
    if (run.method == "original") frm_o.push_back(run.metrics.frm);
  }
  const double mu = Median(frm_u), mo = Median(frm_o);
  o.detail << "GA CE on D_f " << ce_before << " -> " << ce_after
           << "; FT(0 epochs) " << (ft_identity ? "identity" : "CHANGED")
           << "; median FRM conmu " << mu << " vs original " << mo << " over "
           << frm_u.size() << " seeds";
  o.Require(ce_after > ce_before, "GA raises CE");
  o.Require(ft_identity, "FT identity");
  o.Require(frm_u.size() == 5 && frm_o.size() == 5, "5 seeds");
  o.Require(mu > mo, "conmu beats original");
}

// 9. MIA predictor corner cases.
void MiaDegenerate(Outcome& o) {
  const std::vector<double> conf = {0.05, 0.3, 0.5, 0.7, 0.99};
  MiaPredictor all_non;
  all_non.threshold = 1.0;
  MiaPredictor all_mem;
  all_mem.threshold = 0.0;
  const double e1 = EfficacyFromConfidences(all_non, conf);
  const double e0 = EfficacyFromConfidences(all_mem, conf);
  const std::vector<double> pool = {0.1, 0.4, 0.4, 0.8, 0.95};
  const MiaPredictor same = FitMiaThreshold(pool, pool, MiaFeature::kTrueClassProb);
  o.detail << "all-non-member " << e1 << ", all-member " << e0
           << ", identical pools BA " << same.balanced_accuracy
           << (same.degenerate ? " (flagged)" : " (NOT flagged)");
  o.Require(e1 == 1.0, "all non-member");
  o.Require(e0 == 0.0, "all member");
  o.Require(same.balanced_accuracy == 0.5 && same.degenerate, "indistinguishable");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 10. Two CLI runs, serial and parallel, produce identical bytes.
void EndToEndDeterminism(Outcome& o) {
  const auto dir = std::filesystem::temp_directory_path() / "unlearn_acceptance";
  std::filesystem::create_directories(dir);
  const std::string cfg = (g_configs / "desk_random.json").string();
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "1", "4", "4"}) {
    const std::string out =
        (dir / ("run" + std::to_string(outputs.size()) + ".json")).string();
    const std::string cmd = "\"" + g_bench + "\" run \"" + cfg + "\" --threads " +
                            threads + " --out \"" + out + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      o.Require(false, "command failed: " + cmd);
      return;
    }
    outputs.push_back(ReadFile(out));
  }
  const bool same = !outputs[0].empty() &&
                    std::all_of(outputs.begin(), outputs.end(),
                                [&](const std::string& s) { return s == outputs[0]; });
  o.detail << outputs.size() << " runs (threads 1,1,4,4), " << outputs[0].size()
           << " bytes each, " << (same ? "byte-identical" : "DIFFERENT");
  o.Require(same, "byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <unlearn_bench> <configs dir>\n";
    return 2;
  }
  g_bench = argv[1];
  g_configs = argv[2];
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> all = {
      {"FRM arithmetic on reported rows", FrmPaperRows},
      {"exact-unlearning fixed point", ExactFixedPoint},
      {"oracle equivalence", OracleEquivalence},
      {"gradient correctness", GradientCorrectness},
      {"selection monotonicity", SelectionMonotonicity},
      {"noise mechanism moments", NoiseMoments},
      {"knob sweep trends", KnobTrends},
      {"baseline behavior", BaselineBehavior},
      {"MIA degenerate cases", MiaDegenerate},
      {"end-to-end determinism", EndToEndDeterminism},
  };
  int failures = 0;
  for (size_t i = 0; i < all.size(); ++i) {
    Outcome o;
    try {
      all[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": "
              << all[i].first << " -- " << o.detail.str() << std::endl;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << "(" << all.size() - failures
            << "/" << all.size() << ")" << std::endl;
  return failures ? 1 : 0;
}
