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

#include "unlearn/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <unordered_set>

#include "unlearn/error.h"

namespace unlearn {
namespace {

// floor(fraction * n), tolerant of products like 0.29 * 100 = 28.999999...
size_t FlooredCount(double fraction, size_t n) {
  return static_cast<size_t>(
      std::floor(fraction * static_cast<double>(n) + 1e-9));
}

// Positions [0, n) in a seeded uniformly random order.
std::vector<size_t> ShuffledPositions(size_t n, uint64_t seed) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

// Splits [0, n) into (chosen, rest), both ascending.
std::pair<std::vector<size_t>, std::vector<size_t>> PartitionPositions(
    size_t n, const std::vector<size_t>& chosen_unsorted) {
  std::vector<size_t> chosen = chosen_unsorted;
  std::sort(chosen.begin(), chosen.end());
  std::vector<size_t> rest;
  rest.reserve(n - chosen.size());
  size_t c = 0;
  for (size_t i = 0; i < n; ++i) {
    if (c < chosen.size() && chosen[c] == i) {
      ++c;
    } else {
      rest.push_back(i);
    }
  }
  return {std::move(chosen), std::move(rest)};
}

// Splits one CSV record into fields. Supports RFC-4180 quoting ("" escapes a
// quote inside a quoted field); records may not span lines.
std::vector<std::string> SplitCsvRecord(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw Error("unterminated quoted field in CSV record");
  fields.push_back(std::move(field));
  return fields;
}

std::string Trim(const std::string& s) {
  const char* ws = " \t\r\n";
  size_t begin = s.find_first_not_of(ws);
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

bool ParseDouble(const std::string& text, double* out) {
  std::string t = Trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), *out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

bool ParseInt(const std::string& text, long long* out) {
  std::string t = Trim(text);
  if (t.empty()) return false;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), *out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

}  // namespace

LabeledDataset::LabeledDataset(std::vector<double> features, size_t n_features,
                               std::vector<int> labels, int n_classes,
                               std::vector<int64_t> sample_ids)
    : features_(std::move(features)),
      n_features_(n_features),
      labels_(std::move(labels)),
      n_classes_(n_classes),
      sample_ids_(std::move(sample_ids)) {
  if (n_classes_ < 2) throw Error("n_classes must be at least 2");
  if (sample_ids_.size() != labels_.size()) {
    throw Error("sample_ids length does not match labels length");
  }
  if (features_.size() != labels_.size() * n_features_) {
    throw Error("feature matrix has " + std::to_string(features_.size()) +
                " entries, expected " +
                std::to_string(labels_.size() * n_features_));
  }
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= n_classes_) {
      throw Error("label " + std::to_string(labels_[i]) + " at row " +
                  std::to_string(i) + " is outside [0, " +
                  std::to_string(n_classes_) + ")");
    }
  }
  std::unordered_set<int64_t> seen(sample_ids_.begin(), sample_ids_.end());
  if (seen.size() != sample_ids_.size()) {
    throw Error("sample_ids are not unique");
  }
}

LabeledDataset LabeledDataset::Subset(std::span<const size_t> positions) const {
  std::vector<double> features;
  features.reserve(positions.size() * n_features_);
  std::vector<int> labels;
  labels.reserve(positions.size());
  std::vector<int64_t> ids;
  ids.reserve(positions.size());
  for (size_t p : positions) {
    if (p >= size()) throw Error("subset position out of range");
    auto r = row(p);
    features.insert(features.end(), r.begin(), r.end());
    labels.push_back(labels_[p]);
    ids.push_back(sample_ids_[p]);
  }
  return LabeledDataset(std::move(features), n_features_, std::move(labels),
                        n_classes_, std::move(ids));
}

LabeledDataset LabeledDataset::WithFeatures(std::vector<double> features) const {
  return LabeledDataset(std::move(features), n_features_, labels_, n_classes_,
                        sample_ids_);
}

size_t LabeledDataset::CountLabel(int label) const {
  return static_cast<size_t>(std::count(labels_.begin(), labels_.end(), label));
}

LabeledDataset MergeById(const LabeledDataset& a, const LabeledDataset& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.n_features() != b.n_features() || a.n_classes() != b.n_classes()) {
    throw Error("cannot merge datasets with different schemas");
  }
  struct Ref {
    int64_t id;
    const LabeledDataset* source;
    size_t position;
  };
  std::vector<Ref> refs;
  refs.reserve(a.size() + b.size());
  for (size_t i = 0; i < a.size(); ++i) refs.push_back({a.id(i), &a, i});
  for (size_t i = 0; i < b.size(); ++i) refs.push_back({b.id(i), &b, i});
  std::sort(refs.begin(), refs.end(),
            [](const Ref& x, const Ref& y) { return x.id < y.id; });
  std::vector<double> features;
  features.reserve(refs.size() * a.n_features());
  std::vector<int> labels;
  std::vector<int64_t> ids;
  for (size_t i = 0; i < refs.size(); ++i) {
    if (i > 0 && refs[i].id == refs[i - 1].id) {
      throw Error("cannot merge datasets sharing sample id " +
                  std::to_string(refs[i].id));
    }
    auto r = refs[i].source->row(refs[i].position);
    features.insert(features.end(), r.begin(), r.end());
    labels.push_back(refs[i].source->label(refs[i].position));
    ids.push_back(refs[i].id);
  }
  return LabeledDataset(std::move(features), a.n_features(), std::move(labels),
                        a.n_classes(), std::move(ids));
}

const char* ForgetModeName(ForgetMode mode) {
  return mode == ForgetMode::kRandom ? "random" : "class_wise";
}

ForgetMode ParseForgetMode(const std::string& name) {
  if (name == "random") return ForgetMode::kRandom;
  if (name == "class_wise" || name == "classwise") return ForgetMode::kClassWise;
  throw Error("unknown forget mode '" + name +
              "' (expected random or class_wise)");
}

LabeledDataset LoadCsv(const std::string& path, const std::string& label_column,
                       int n_classes) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open CSV file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error("CSV file '" + path + "' is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  std::vector<std::string> header = SplitCsvRecord(line);
  for (auto& h : header) h = Trim(h);
  auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw Error("CSV header has no column named '" + label_column + "'");
  }
  const size_t label_index = static_cast<size_t>(label_it - header.begin());
  const size_t n_features = header.size() - 1;

  std::vector<double> features;
  std::vector<int> labels;
  size_t row = 0;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    ++row;
    std::vector<std::string> fields = SplitCsvRecord(line);
    if (fields.size() != header.size()) {
      throw Error("CSV row " + std::to_string(row) + " has " +
                  std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(header.size()));
    }
    for (size_t c = 0; c < fields.size(); ++c) {
      if (c == label_index) {
        long long label = 0;
        if (!ParseInt(fields[c], &label)) {
          throw Error("CSV row " + std::to_string(row) + ", column '" +
                      header[c] + "': label '" + fields[c] +
                      "' is not an integer");
        }
        if (label < 0 || label >= n_classes) {
          throw Error("CSV row " + std::to_string(row) + ": label " +
                      std::to_string(label) + " is outside [0, " +
                      std::to_string(n_classes) + ")");
        }
        labels.push_back(static_cast<int>(label));
      } else {
        double value = 0.0;
        if (!ParseDouble(fields[c], &value)) {
          throw Error("CSV row " + std::to_string(row) + ", column '" +
                      header[c] + "': '" + fields[c] + "' is not a number");
        }
        features.push_back(value);
      }
    }
  }
  if (labels.empty()) throw Error("empty dataset: '" + path + "' has no rows");
  std::vector<int64_t> ids(labels.size());
  std::iota(ids.begin(), ids.end(), int64_t{0});
  return LabeledDataset(std::move(features), n_features, std::move(labels),
                        n_classes, std::move(ids));
}

void WriteCsv(const LabeledDataset& data, const std::string& path,
              const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write CSV file '" + path + "'");
  out.precision(17);
  for (size_t j = 0; j < data.n_features(); ++j) out << 'f' << j << ',';
  out << label_column << '\n';
  for (size_t i = 0; i < data.size(); ++i) {
    for (double v : data.row(i)) out << v << ',';
    out << data.label(i) << '\n';
  }
  if (!out) throw Error("failed while writing CSV file '" + path + "'");
}

LabeledDataset GenerateSynthetic(const SyntheticSpec& spec) {
  if (spec.n_features == 0) throw Error("n_features must be positive");
  if (spec.n_classes < 2) throw Error("n_classes must be at least 2");
  if (spec.n_samples < static_cast<size_t>(spec.n_classes)) {
    throw Error("n_samples (" + std::to_string(spec.n_samples) +
                ") must be at least n_classes (" +
                std::to_string(spec.n_classes) + ")");
  }
  if (!(spec.class_separation > 0.0)) {
    throw Error("class_separation must be positive");
  }
  const size_t d = spec.n_features;
  const size_t classes = static_cast<size_t>(spec.n_classes);

  // Scaled axis vectors are exactly `separation` apart; with more classes
  // than dimensions, fall back to equally spaced points on the first axis.
  std::vector<double> centers(classes * d, 0.0);
  for (size_t k = 0; k < classes; ++k) {
    if (classes <= d) {
      centers[k * d + k] = spec.class_separation / std::sqrt(2.0);
    } else {
      centers[k * d] = spec.class_separation * static_cast<double>(k);
    }
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<int> labels(spec.n_samples);
  for (size_t i = 0; i < spec.n_samples; ++i) {
    labels[i] = static_cast<int>(i % classes);
  }
  std::shuffle(labels.begin(), labels.end(), rng);

  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> features(spec.n_samples * d);
  for (size_t i = 0; i < spec.n_samples; ++i) {
    const double* center = &centers[static_cast<size_t>(labels[i]) * d];
    for (size_t j = 0; j < d; ++j) features[i * d + j] = center[j] + unit(rng);
  }
  std::vector<int64_t> ids(spec.n_samples);
  std::iota(ids.begin(), ids.end(), int64_t{0});
  return LabeledDataset(std::move(features), d, std::move(labels),
                        spec.n_classes, std::move(ids));
}

std::pair<LabeledDataset, LabeledDataset> HoldOut(const LabeledDataset& data,
                                                  double fraction,
                                                  uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error("held-out fraction must lie in (0, 1)");
  }
  const size_t k = FlooredCount(fraction, data.size());
  if (k == 0 || k == data.size()) {
    throw Error("held-out fraction leaves one side empty");
  }
  std::vector<size_t> order = ShuffledPositions(data.size(), seed);
  order.resize(k);
  auto [held, rest] = PartitionPositions(data.size(), order);
  return {data.Subset(rest), data.Subset(held)};
}

ForgetSplit SplitRandomForget(const LabeledDataset& data, double fraction,
                              uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error("random forget fraction must lie in (0, 1)");
  }
  const size_t k = FlooredCount(fraction, data.size());
  if (k == 0) {
    throw Error("forget fraction " + std::to_string(fraction) + " of " +
                std::to_string(data.size()) +
                " samples yields an empty forget set");
  }
  std::vector<size_t> order = ShuffledPositions(data.size(), seed);
  order.resize(k);
  auto [forget, retain] = PartitionPositions(data.size(), order);
  ForgetSplit split;
  split.forget = data.Subset(forget);
  split.retain = data.Subset(retain);
  split.mode = ForgetMode::kRandom;
  split.forget_fraction = fraction;
  return split;
}

ForgetSplit SplitClasswiseForget(const LabeledDataset& data, int target_class,
                                 double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error("class-wise forget fraction must lie in (0, 1]");
  }
  std::vector<size_t> members;
  for (size_t i = 0; i < data.size(); ++i) {
    if (data.label(i) == target_class) members.push_back(i);
  }
  if (members.empty()) {
    throw Error("target class " + std::to_string(target_class) +
                " has no samples");
  }
  const size_t k = FlooredCount(fraction, members.size());
  if (k == 0) {
    throw Error("forget fraction " + std::to_string(fraction) + " of " +
                std::to_string(members.size()) + " samples in class " +
                std::to_string(target_class) + " yields an empty forget set");
  }
  std::vector<size_t> order = ShuffledPositions(members.size(), seed);
  std::vector<size_t> chosen;
  chosen.reserve(k);
  for (size_t i = 0; i < k; ++i) chosen.push_back(members[order[i]]);
  auto [forget, retain] = PartitionPositions(data.size(), chosen);
  ForgetSplit split;
  split.forget = data.Subset(forget);
  split.retain = data.Subset(retain);
  split.mode = ForgetMode::kClassWise;
  split.forget_fraction = fraction;
  split.target_class = target_class;
  return split;
}

ColumnScaler ColumnScaler::Fit(const LabeledDataset& data) {
  if (data.empty()) throw Error("cannot fit a scaler on an empty dataset");
  const size_t d = data.n_features();
  const double n = static_cast<double>(data.size());
  ColumnScaler scaler;
  scaler.means_.assign(d, 0.0);
  scaler.stddevs_.assign(d, 0.0);
  for (size_t i = 0; i < data.size(); ++i) {
    auto r = data.row(i);
    for (size_t j = 0; j < d; ++j) scaler.means_[j] += r[j];
  }
  for (double& m : scaler.means_) m /= n;
  for (size_t i = 0; i < data.size(); ++i) {
    auto r = data.row(i);
    for (size_t j = 0; j < d; ++j) {
      const double diff = r[j] - scaler.means_[j];
      scaler.stddevs_[j] += diff * diff;
    }
  }
  for (double& s : scaler.stddevs_) s = std::sqrt(s / n);
  return scaler;
}

LabeledDataset ColumnScaler::Apply(const LabeledDataset& data) const {
  if (data.n_features() != means_.size()) {
    throw Error("scaler was fit on " + std::to_string(means_.size()) +
                " columns, dataset has " + std::to_string(data.n_features()));
  }
  std::vector<double> out = data.features();
  const size_t d = means_.size();
  for (size_t i = 0; i < data.size(); ++i) {
    for (size_t j = 0; j < d; ++j) {
      double& v = out[i * d + j];
      v -= means_[j];
      if (stddevs_[j] > 0.0) v /= stddevs_[j];
    }
  }
  return data.WithFeatures(std::move(out));
}

}  // namespace unlearn
