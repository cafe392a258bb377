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

#ifndef CONDUCTANCE_DATASETS_H_
#define CONDUCTANCE_DATASETS_H_

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace conductance {

enum class DatasetKind { kVectors, kTokens };

struct Example {
  std::vector<double> features;  // kVectors
  std::vector<int32_t> tokens;   // kTokens
  int label = 0;

  bool operator==(const Example&) const = default;
};

// Labeled examples plus a train/eval split (indices into `examples`).
struct LabeledDataset {
  DatasetKind kind = DatasetKind::kVectors;
  int num_classes = 0;
  std::vector<Example> examples;
  std::vector<int64_t> train;
  std::vector<int64_t> eval;

  // Throws ValidationError unless labels are in [0, num_classes) and the
  // splits are disjoint and cover every example.
  void Validate() const;
  std::vector<int> Labels(std::span<const int64_t> indices) const;

  bool operator==(const LabeledDataset&) const = default;
};

// Gaussian blobs. Class c is centered at separation * e_c, so dim must be at
// least num_classes.
struct BlobSpec {
  int num_classes = 2;
  int dim = 2;
  int per_class = 50;
  double sigma = 0.5;
  double separation = 4.0;
  double train_fraction = 0.6;
  uint64_t seed = 0;
};

std::vector<double> BlobMean(const BlobSpec& spec, int label);
LabeledDataset GenBlobs(const BlobSpec& spec);

// Token sequences whose label follows from planted sentiment words. A
// negator immediately before a sentiment word flips that word's polarity
// ("not good" counts as negative). Every other position holds a filler token.
struct SyntheticSentimentSpec {
  int vocab_size = 32;
  int seq_len = 12;
  int num_examples = 2000;
  double positive_fraction = 0.5;
  double noise_rate = 0.0;  // probability of flipping the planted label
  double train_fraction = 0.7;
  int min_phrases = 1;
  int max_phrases = 2;
  double negation_rate = 0.4;  // share of phrases written as negator + word
  std::vector<int32_t> positive_tokens = {1, 2, 3, 4};
  std::vector<int32_t> negative_tokens = {5, 6, 7, 8};
  std::vector<int32_t> negators = {9};
  uint64_t seed = 0;
};

inline constexpr int kNegativeLabel = 0;
inline constexpr int kPositiveLabel = 1;

// Label implied by the planted words: kPositiveLabel, kNegativeLabel, or -1
// when the polarities cancel or none are present.
int SentimentLabel(std::span<const int32_t> tokens, const SyntheticSentimentSpec& spec);

LabeledDataset GenSentiment(const SyntheticSentimentSpec& spec);

// One JSON object per line. The first line is a header
// {"schema": "conductance-dataset", "kind", "num_classes"}; each following
// line is {"label", "split": "train"|"eval", "features"|"tokens"}.
std::string DatasetToJsonl(const LabeledDataset& dataset);
void SaveJsonl(const std::string& path, const LabeledDataset& dataset);
// Streams line by line. Throws FormatError naming the line and field.
LabeledDataset LoadJsonl(std::istream& in);
LabeledDataset LoadJsonlString(std::string_view text);
LabeledDataset LoadJsonlFile(const std::string& path);

// CSV with a header of column names then "label"; one row per example.
std::string FeaturesToCsv(const std::vector<std::vector<double>>& rows,
                          const std::vector<std::string>& columns,
                          const std::vector<int>& labels);

}  // namespace conductance

#endif  // CONDUCTANCE_DATASETS_H_
