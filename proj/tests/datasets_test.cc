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


#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "conductance/datasets.h"
#include "conductance/errors.h"
#include "conductance/format.h"

namespace conductance {
namespace {

TEST(BlobsTest, DeterministicUnderSeed) {
  BlobSpec spec{.num_classes = 3, .dim = 4, .per_class = 20, .seed = 7};
  EXPECT_EQ(GenBlobs(spec), GenBlobs(spec));
  spec.seed = 8;
  EXPECT_NE(GenBlobs(spec), GenBlobs(BlobSpec{.num_classes = 3, .dim = 4, .per_class = 20,
                                              .seed = 7}));
}

TEST(BlobsTest, ClassMeansWithinThreeStandardErrors) {
  const BlobSpec spec{.num_classes = 3, .dim = 5, .per_class = 400, .sigma = 0.7, .seed = 1};
  const LabeledDataset d = GenBlobs(spec);
  for (int c = 0; c < spec.num_classes; ++c) {
    std::vector<double> sum(spec.dim, 0.0);
    int n = 0;
    for (const Example& e : d.examples) {
      if (e.label != c) continue;
      ++n;
      for (int j = 0; j < spec.dim; ++j) sum[j] += e.features[j];
    }
    ASSERT_EQ(n, spec.per_class);
    const std::vector<double> mean = BlobMean(spec, c);
    for (int j = 0; j < spec.dim; ++j) {
      EXPECT_LE(std::abs(sum[j] / n - mean[j]), 3 * spec.sigma / std::sqrt(n));
    }
  }
}

TEST(BlobsTest, ZeroVarianceGivesIdenticalPoints) {
  const LabeledDataset d = GenBlobs({.num_classes = 2, .dim = 2, .per_class = 5, .sigma = 0.0});
  for (const Example& e : d.examples) {
    EXPECT_EQ(e.features, BlobMean({.num_classes = 2, .dim = 2}, e.label));
  }
}

TEST(BlobsTest, StratifiedDisjointCoveringSplit) {
  const LabeledDataset d = GenBlobs({.num_classes = 4, .dim = 4, .per_class = 10,
                                     .train_fraction = 0.6});
  EXPECT_NO_THROW(d.Validate());
  std::vector<int> train_counts(4, 0);
  for (int64_t i : d.train) ++train_counts[d.examples[i].label];
  for (int c : train_counts) EXPECT_EQ(c, 6);
  EXPECT_EQ(d.train.size() + d.eval.size(), d.examples.size());
}

TEST(BlobsTest, RejectsTooFewDimensions) {
  EXPECT_THROW(GenBlobs({.num_classes = 3, .dim = 2}), ValidationError);
}

TEST(SentimentTest, LabelsFollowPlantedWords) {
  const SyntheticSentimentSpec spec;
  const int32_t f = 20;  // filler
  EXPECT_EQ(SentimentLabel(std::vector<int32_t>{f, 1, f, 2}, spec), kPositiveLabel);
  EXPECT_EQ(SentimentLabel(std::vector<int32_t>{f, 5, f, f}, spec), kNegativeLabel);
  // "not good" is negative, "not bad" is positive.
  EXPECT_EQ(SentimentLabel(std::vector<int32_t>{f, 9, 1, f}, spec), kNegativeLabel);
  EXPECT_EQ(SentimentLabel(std::vector<int32_t>{f, 9, 5, f}, spec), kPositiveLabel);
  EXPECT_EQ(SentimentLabel(std::vector<int32_t>{1, 5, f, f}, spec), -1);
  EXPECT_EQ(SentimentLabel(std::vector<int32_t>{f, f, f, f}, spec), -1);
}

TEST(SentimentTest, GeneratedLabelsAgreeWithRule) {
  const SyntheticSentimentSpec spec{.num_examples = 300, .seed = 4};
  const LabeledDataset d = GenSentiment(spec);
  EXPECT_NO_THROW(d.Validate());
  int positive = 0;
  for (const Example& e : d.examples) {
    EXPECT_EQ(static_cast<int>(e.tokens.size()), spec.seq_len);
    EXPECT_EQ(SentimentLabel(e.tokens, spec), e.label);
    positive += e.label == kPositiveLabel;
  }
  EXPECT_LE(std::abs(positive / 300.0 - spec.positive_fraction), 0.05);
}

TEST(SentimentTest, NegationPatternsOccur) {
  const LabeledDataset d = GenSentiment({.num_examples = 200, .seed = 2});
  int negated = 0;
  for (const Example& e : d.examples) {
    for (size_t t = 0; t + 1 < e.tokens.size(); ++t) negated += e.tokens[t] == 9;
  }
  EXPECT_GT(negated, 20);
}

TEST(SentimentTest, Deterministic) {
  const SyntheticSentimentSpec spec{.num_examples = 50, .seed = 9};
  EXPECT_EQ(GenSentiment(spec), GenSentiment(spec));
}

TEST(JsonlTest, RoundTripIsExact) {
  const LabeledDataset blobs = GenBlobs({.num_classes = 2, .dim = 3, .per_class = 7, .seed = 3});
  EXPECT_EQ(LoadJsonlString(DatasetToJsonl(blobs)), blobs);
  const LabeledDataset tokens = GenSentiment({.num_examples = 40});
  EXPECT_EQ(LoadJsonlString(DatasetToJsonl(tokens)), tokens);
}

TEST(JsonlTest, MissingFieldIsStructuredError) {
  const std::string text =
      "{\"schema\":\"conductance-dataset\",\"kind\":\"vectors\",\"num_classes\":2}\n"
      "{\"label\":0,\"split\":\"train\",\"features\":[1]}\n"
      "{\"split\":\"eval\",\"features\":[2]}\n";
  try {
    LoadJsonlString(text);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("label"), std::string::npos) << e.what();
  }
}

TEST(JsonlTest, RejectsBadHeaderAndLabels) {
  EXPECT_THROW(LoadJsonlString("{\"schema\":\"x\"}\n"), FormatError);
  const std::string bad_label =
      "{\"schema\":\"conductance-dataset\",\"kind\":\"vectors\",\"num_classes\":2}\n"
      "{\"label\":5,\"split\":\"train\",\"features\":[1]}\n";
  EXPECT_ANY_THROW(LoadJsonlString(bad_label));
}

TEST(JsonlTest, StreamingLoadMatchesInMemory) {
  const LabeledDataset big = GenSentiment({.num_examples = 5000, .seed = 12});
  const std::string text = DatasetToJsonl(big);
  std::istringstream stream(text);
  const LabeledDataset streamed = LoadJsonl(stream);
  EXPECT_EQ(Fnv1a64(DatasetToJsonl(streamed)), Fnv1a64(text));
  EXPECT_EQ(streamed, LoadJsonlString(text));
}

TEST(CsvTest, FeatureMatrix) {
  EXPECT_EQ(FeaturesToCsv({{1.0, 0.5}, {-2.0, 0.0}}, {"a", "b"}, {1, 0}),
            "a,b,label\n1,0.5,1\n-2,0,0\n");
}

}  // namespace
}  // namespace conductance
