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
// Labeled tabular datasets, CSV ingestion, synthetic Gaussian-cluster
// generation and forget/retain split construction.

#ifndef UNLEARN_DATASET_H_
#define UNLEARN_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace unlearn {

// Dense row-major feature matrix with integer class labels and a stable
// integer id per sample. Ids are assigned at ingestion and carried through
// every subset, so any derived dataset can be traced back to its source rows.
//
// Immutable after construction. An empty dataset (zero rows) is legal; most
// operations that need data reject it explicitly.
class LabeledDataset {
 public:
  // Empty two-class dataset with no feature columns.
  LabeledDataset() = default;

  // Validates shape, label range, n_classes >= 2 and id uniqueness.
  LabeledDataset(std::vector<double> features, size_t n_features,
                 std::vector<int> labels, int n_classes,
                 std::vector<int64_t> sample_ids);

  size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  size_t n_features() const { return n_features_; }
  int n_classes() const { return n_classes_; }

  std::span<const double> row(size_t i) const {
    return {features_.data() + i * n_features_, n_features_};
  }
  int label(size_t i) const { return labels_[i]; }
  int64_t id(size_t i) const { return sample_ids_[i]; }

  const std::vector<double>& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int64_t>& sample_ids() const { return sample_ids_; }

  // Rows at the given positions, in the given order.
  LabeledDataset Subset(std::span<const size_t> positions) const;

  // Same labels and ids with a replacement feature matrix of equal shape.
  LabeledDataset WithFeatures(std::vector<double> features) const;

  // Number of samples carrying `label`.
  size_t CountLabel(int label) const;

  friend bool operator==(const LabeledDataset&,
                         const LabeledDataset&) = default;

 private:
  std::vector<double> features_;
  size_t n_features_ = 0;
  std::vector<int> labels_;
  int n_classes_ = 2;
  std::vector<int64_t> sample_ids_;
};

// Union of two id-disjoint datasets with matching schema, ordered by ascending
// sample id. Throws if the ids overlap.
LabeledDataset MergeById(const LabeledDataset& a, const LabeledDataset& b);

enum class ForgetMode { kRandom, kClassWise };

const char* ForgetModeName(ForgetMode mode);
ForgetMode ParseForgetMode(const std::string& name);

// Exact partition of a source dataset into forget (D_f) and retain (D_r).
struct ForgetSplit {
  LabeledDataset forget;
  LabeledDataset retain;
  ForgetMode mode = ForgetMode::kRandom;
  double forget_fraction = 0.0;
  std::optional<int> target_class;  // present iff mode == kClassWise
};

// Reads a headered CSV. Every column except `label_column` must parse as a
// real number; the label column must hold integers in [0, n_classes).
// Sample ids are 0..n-1 in file order.
LabeledDataset LoadCsv(const std::string& path, const std::string& label_column,
                       int n_classes);

// Writes features as f0..f{d-1} followed by `label_column`, with enough
// digits to round-trip every double.
void WriteCsv(const LabeledDataset& data, const std::string& path,
              const std::string& label_column = "label");

struct SyntheticSpec {
  size_t n_samples = 0;
  size_t n_features = 0;
  int n_classes = 2;
  double class_separation = 1.0;
  uint64_t seed = 0;
};

// n_classes isotropic unit-variance Gaussian clusters whose centers are
// pairwise at least class_separation apart. Labels are balanced to within one
// sample per class and shuffled; sample ids are 0..n-1.
LabeledDataset GenerateSynthetic(const SyntheticSpec& spec);

// Splits `data` into two disjoint parts: a uniformly random `fraction` of the
// rows (floored) and the rest. Both keep source order. Used to carve a test
// set off a generated pool.
std::pair<LabeledDataset, LabeledDataset> HoldOut(const LabeledDataset& data,
                                                  double fraction,
                                                  uint64_t seed);

// Forgets exactly floor(fraction * n) uniformly chosen samples.
ForgetSplit SplitRandomForget(const LabeledDataset& data, double fraction,
                              uint64_t seed);

// Forgets floor(fraction * count(target_class)) uniformly chosen samples of
// one class; everything else, including the rest of that class, is retained.
ForgetSplit SplitClasswiseForget(const LabeledDataset& data, int target_class,
                                 double fraction, uint64_t seed);

// Per-column standardization. Fit on training data, apply everywhere.
// Columns with zero spread are centered only.
class ColumnScaler {
 public:
  static ColumnScaler Fit(const LabeledDataset& data);
  LabeledDataset Apply(const LabeledDataset& data) const;

  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& stddevs() const { return stddevs_; }

 private:
  std::vector<double> means_;
  std::vector<double> stddevs_;
};

}  // namespace unlearn

#endif  // UNLEARN_DATASET_H_
