/*
 * Copyright 2026 The Conductance Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "conductance/datasets.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "conductance/errors.h"
#include "conductance/format.h"

namespace conductance {
namespace {

constexpr std::string_view kSchema = "conductance-dataset";

// Stratified split: within each class, a seeded shuffle then the first
// round(fraction * n_c) go to train.
void StratifiedSplit(LabeledDataset& ds, double train_fraction, uint64_t seed) {
  if (train_fraction < 0.0 || train_fraction > 1.0) {
    throw ValidationError("train fraction must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed ^ 0x5eed5eed5eedULL);
  ds.train.clear();
  ds.eval.clear();
  for (int c = 0; c < ds.num_classes; ++c) {
    std::vector<int64_t> members;
    for (size_t i = 0; i < ds.examples.size(); ++i) {
      if (ds.examples[i].label == c) members.push_back(static_cast<int64_t>(i));
    }
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_train = static_cast<size_t>(
        std::llround(train_fraction * static_cast<double>(members.size())));
    for (size_t i = 0; i < members.size(); ++i) {
      (i < n_train ? ds.train : ds.eval).push_back(members[i]);
    }
  }
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.eval.begin(), ds.eval.end());
}

int Polarity(int32_t token, const SyntheticSentimentSpec& spec) {
  if (std::find(spec.positive_tokens.begin(), spec.positive_tokens.end(), token) !=
      spec.positive_tokens.end()) {
    return 1;
  }
  if (std::find(spec.negative_tokens.begin(), spec.negative_tokens.end(), token) !=
      spec.negative_tokens.end()) {
    return -1;
  }
  return 0;
}

bool IsNegator(int32_t token, const SyntheticSentimentSpec& spec) {
  return std::find(spec.negators.begin(), spec.negators.end(), token) != spec.negators.end();
}

template <typename T>
T Pick(const std::vector<T>& items, std::mt19937_64& rng) {
  std::uniform_int_distribution<size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

}  // namespace

void LabeledDataset::Validate() const {
  if (num_classes < 1) throw ValidationError("dataset needs at least one class");
  for (const Example& e : examples) {
    if (e.label < 0 || e.label >= num_classes) {
      throw ValidationError("label " + std::to_string(e.label) + " outside [0, " +
                            std::to_string(num_classes) + ")");
    }
  }
  std::vector<int> seen(examples.size(), 0);
  for (const auto* split : {&train, &eval}) {
    for (int64_t i : *split) {
      if (i < 0 || i >= static_cast<int64_t>(examples.size())) {
        throw ValidationError("split index " + std::to_string(i) + " out of range");
      }
      if (++seen[i] > 1) throw ValidationError("splits overlap at " + std::to_string(i));
    }
  }
  for (size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] == 0) throw ValidationError("example " + std::to_string(i) + " in no split");
  }
}

std::vector<int> LabeledDataset::Labels(std::span<const int64_t> indices) const {
  std::vector<int> out;
  out.reserve(indices.size());
  for (int64_t i : indices) out.push_back(examples.at(i).label);
  return out;
}

std::vector<double> BlobMean(const BlobSpec& spec, int label) {
  std::vector<double> mean(spec.dim, 0.0);
  mean.at(label) = spec.separation;
  return mean;
}

LabeledDataset GenBlobs(const BlobSpec& spec) {
  if (spec.num_classes < 1 || spec.dim < spec.num_classes || spec.per_class < 1 ||
      spec.sigma < 0.0) {
    throw ValidationError("blob spec needs classes >= 1, dim >= classes, per_class >= 1, "
                          "sigma >= 0");
  }
  LabeledDataset ds;
  ds.kind = DatasetKind::kVectors;
  ds.num_classes = spec.num_classes;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int c = 0; c < spec.num_classes; ++c) {
    const auto mean = BlobMean(spec, c);
    for (int i = 0; i < spec.per_class; ++i) {
      Example e;
      e.label = c;
      for (int d = 0; d < spec.dim; ++d) {
        const double z = noise(rng);
        e.features.push_back(mean[d] + spec.sigma * z);
      }
      ds.examples.push_back(std::move(e));
    }
  }
  StratifiedSplit(ds, spec.train_fraction, spec.seed);
  return ds;
}

int SentimentLabel(std::span<const int32_t> tokens, const SyntheticSentimentSpec& spec) {
  int score = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (IsNegator(tokens[i], spec) && i + 1 < tokens.size() &&
        Polarity(tokens[i + 1], spec) != 0) {
      score -= Polarity(tokens[i + 1], spec);
      ++i;
    } else {
      score += Polarity(tokens[i], spec);
    }
  }
  if (score > 0) return kPositiveLabel;
  if (score < 0) return kNegativeLabel;
  return -1;
}

LabeledDataset GenSentiment(const SyntheticSentimentSpec& spec) {
  std::vector<int32_t> fillers;
  for (int32_t t = 0; t < spec.vocab_size; ++t) {
    if (Polarity(t, spec) == 0 && !IsNegator(t, spec)) fillers.push_back(t);
  }
  for (const auto* list : {&spec.positive_tokens, &spec.negative_tokens, &spec.negators}) {
    if (list->empty()) throw ValidationError("sentiment inventories must be non-empty");
    for (int32_t t : *list) {
      if (t < 0 || t >= spec.vocab_size) throw ValidationError("inventory token outside vocab");
    }
  }
  if (fillers.empty()) throw ValidationError("vocabulary leaves no filler tokens");
  if (spec.min_phrases < 1 || spec.max_phrases < spec.min_phrases ||
      2 * spec.max_phrases > spec.seq_len) {
    throw ValidationError("phrase counts must satisfy 1 <= min <= max and 2 * max <= seq_len");
  }
  if (spec.num_examples < 1) throw ValidationError("num_examples must be >= 1");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> phrase_count(spec.min_phrases, spec.max_phrases);

  // Exact label balance, shuffled.
  const auto n_pos = static_cast<int>(std::llround(spec.positive_fraction * spec.num_examples));
  std::vector<int> labels(spec.num_examples, kNegativeLabel);
  std::fill(labels.begin(), labels.begin() + n_pos, kPositiveLabel);
  std::shuffle(labels.begin(), labels.end(), rng);

  LabeledDataset ds;
  ds.kind = DatasetKind::kTokens;
  ds.num_classes = 2;
  for (int i = 0; i < spec.num_examples; ++i) {
    const int label = labels[i];
    std::vector<std::vector<int32_t>> items;
    int used = 0;
    const int phrases = phrase_count(rng);
    for (int p = 0; p < phrases; ++p) {
      const bool negated = unit(rng) < spec.negation_rate;
      // A negated phrase carries the opposite word.
      const bool want_positive_word = (label == kPositiveLabel) != negated;
      const int32_t word = Pick(want_positive_word ? spec.positive_tokens : spec.negative_tokens,
                                rng);
      if (negated) {
        items.push_back({Pick(spec.negators, rng), word});
        used += 2;
      } else {
        items.push_back({word});
        used += 1;
      }
    }
    for (int f = used; f < spec.seq_len; ++f) items.push_back({Pick(fillers, rng)});
    std::shuffle(items.begin(), items.end(), rng);
    Example e;
    for (const auto& item : items) e.tokens.insert(e.tokens.end(), item.begin(), item.end());
    e.label = unit(rng) < spec.noise_rate ? 1 - label : label;
    ds.examples.push_back(std::move(e));
  }
  StratifiedSplit(ds, spec.train_fraction, spec.seed);
  return ds;
}

std::string DatasetToJsonl(const LabeledDataset& dataset) {
  std::vector<char> split(dataset.examples.size(), 'e');
  for (int64_t i : dataset.train) split.at(i) = 't';
  std::string out;
  nlohmann::ordered_json header;
  header["schema"] = kSchema;
  header["kind"] = dataset.kind == DatasetKind::kTokens ? "tokens" : "vectors";
  header["num_classes"] = dataset.num_classes;
  out += header.dump() + "\n";
  for (size_t i = 0; i < dataset.examples.size(); ++i) {
    const Example& e = dataset.examples[i];
    nlohmann::ordered_json j;
    j["label"] = e.label;
    j["split"] = split[i] == 't' ? "train" : "eval";
    if (dataset.kind == DatasetKind::kTokens) {
      j["tokens"] = e.tokens;
    } else {
      j["features"] = e.features;
    }
    out += j.dump() + "\n";
  }
  return out;
}

void SaveJsonl(const std::string& path, const LabeledDataset& dataset) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << DatasetToJsonl(dataset);
}

LabeledDataset LoadJsonl(std::istream& in) {
  LabeledDataset ds;
  std::string line;
  int64_t line_no = 0;
  bool header_seen = false;
  int max_label = -1;
  auto fail = [&](const std::string& what) {
    return FormatError("dataset line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw fail("invalid JSON");
    }
    if (!j.is_object()) throw fail("expected an object");
    if (!header_seen) {
      header_seen = true;
      if (j.contains("schema")) {
        if (j["schema"] != kSchema) throw fail("unknown schema");
        if (!j.contains("kind")) throw fail("missing field 'kind'");
        if (!j.contains("num_classes")) throw fail("missing field 'num_classes'");
        const std::string kind = j["kind"].get<std::string>();
        if (kind != "tokens" && kind != "vectors") throw fail("unknown kind '" + kind + "'");
        ds.kind = kind == "tokens" ? DatasetKind::kTokens : DatasetKind::kVectors;
        ds.num_classes = j["num_classes"].get<int>();
        continue;
      }
      ds.kind = j.contains("tokens") ? DatasetKind::kTokens : DatasetKind::kVectors;
    }
    if (!j.contains("label")) throw fail("missing field 'label'");
    const char* payload = ds.kind == DatasetKind::kTokens ? "tokens" : "features";
    if (!j.contains(payload)) throw fail(std::string("missing field '") + payload + "'");
    Example e;
    try {
      e.label = j["label"].get<int>();
      if (ds.kind == DatasetKind::kTokens) {
        e.tokens = j["tokens"].get<std::vector<int32_t>>();
      } else {
        e.features = j["features"].get<std::vector<double>>();
      }
    } catch (const nlohmann::json::exception&) {
      throw fail("field has the wrong type");
    }
    const std::string split = j.value("split", "train");
    if (split != "train" && split != "eval") throw fail("split must be 'train' or 'eval'");
    const auto index = static_cast<int64_t>(ds.examples.size());
    (split == "train" ? ds.train : ds.eval).push_back(index);
    max_label = std::max(max_label, e.label);
    ds.examples.push_back(std::move(e));
  }
  if (ds.num_classes == 0) ds.num_classes = max_label + 1;
  ds.Validate();
  return ds;
}

LabeledDataset LoadJsonlString(std::string_view text) {
  std::istringstream in{std::string(text)};
  return LoadJsonl(in);
}

LabeledDataset LoadJsonlFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return LoadJsonl(in);
}

std::string FeaturesToCsv(const std::vector<std::vector<double>>& rows,
                          const std::vector<std::string>& columns,
                          const std::vector<int>& labels) {
  std::string out;
  for (const auto& c : columns) out += c + ",";
  out += "label\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    for (double v : rows[i]) out += FormatDouble(v) + ",";
    out += std::to_string(i < labels.size() ? labels[i] : -1) + "\n";
  }
  return out;
}

}  // namespace conductance
