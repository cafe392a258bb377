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


#include <gtest/gtest.h>

#include "conductance/datasets.h"
#include "conductance/errors.h"
#include "conductance/train.h"
#include "conductance/zoo.h"

namespace conductance {
namespace {

TEST(TrainTest, SeparableBlobsReachHighTrainAccuracy) {
  const LabeledDataset d = GenBlobs({.num_classes = 2, .dim = 4, .per_class = 50,
                                     .sigma = 0.5, .seed = 1});
  const ZooModel m = ToyMlp({.in_dim = 4, .hidden = {8}, .classes = 2, .seed = 1});
  TrainReport report;
  const ZooModel trained = Train(m, d, {.seed = 1, .epochs = 200}, &report);
  EXPECT_GE(report.train_accuracy, 0.99);
  EXPECT_EQ(report.epochs, 200);
  EXPECT_GE(Accuracy(trained, d, d.eval), 0.95);
}

TEST(TrainTest, ZeroLearningRateLeavesWeights) {
  const LabeledDataset d = GenBlobs({.num_classes = 2, .dim = 4, .per_class = 10});
  const ZooModel m = ToyMlp({.in_dim = 4, .hidden = {8}, .classes = 2});
  const ZooModel trained = Train(m, d, {.epochs = 3, .learning_rate = 0.0});
  EXPECT_EQ(trained.graph, m.graph);
}

TEST(TrainTest, SameSeedSameWeights) {
  const LabeledDataset d = GenBlobs({.num_classes = 3, .dim = 3, .per_class = 20});
  const ZooModel m = ToyMlp({.in_dim = 3, .hidden = {6}, .classes = 3});
  const TrainConfig cfg{.seed = 9, .epochs = 5};
  EXPECT_EQ(Train(m, d, cfg).graph, Train(m, d, cfg).graph);
  const TrainConfig other{.seed = 10, .epochs = 5};
  EXPECT_NE(Train(m, d, cfg).graph, Train(m, d, other).graph);
}

TEST(TrainTest, TokenModelUpdatesEmbedding) {
  const LabeledDataset d = GenSentiment({.num_examples = 60, .seed = 1});
  const ZooModel m = ToyTextCnn();
  const ZooModel trained = Train(m, d, {.epochs = 2});
  ASSERT_TRUE(trained.embedding.has_value());
  EXPECT_NE(*trained.embedding, *m.embedding);
}

TEST(TrainTest, TrainingGraphHasLossHead) {
  const ZooModel m = ToyTextCnn();
  const Graph g = MakeTrainingGraph(m);
  EXPECT_EQ(g.node(g.output()).op.type, OpType::kSoftmaxCrossEntropy);
  EXPECT_TRUE(g.FindNode("tokens").has_value());
  EXPECT_TRUE(g.FindNode("target").has_value());
  // The attribution graph itself never carries the head.
  EXPECT_FALSE(m.graph.FindNode("loss").has_value());
}

TEST(TrainTest, DivergenceIsNumericalError) {
  const LabeledDataset d = GenBlobs({.num_classes = 2, .dim = 2, .per_class = 20,
                                     .separation = 1e6});
  const ZooModel m = ToyMlp({.in_dim = 2, .hidden = {4}, .classes = 2});
  EXPECT_THROW(Train(m, d, {.epochs = 50, .learning_rate = 1e300}), NumericalError);
}

TEST(TrainTest, MismatchedDataIsRejected) {
  const LabeledDataset d = GenBlobs({.num_classes = 2, .dim = 3, .per_class = 5});
  const ZooModel m = ToyMlp({.in_dim = 4, .hidden = {4}, .classes = 2});
  EXPECT_ANY_THROW(Train(m, d, {.epochs = 1}));
}

TEST(TrainTest, SentimentCnnLearnsTheTask) {
  const LabeledDataset d = GenSentiment({.seed = 0});
  const ZooModel trained = Train(ToyTextCnn({.seed = 0}), d, {.seed = 0});
  EXPECT_GE(Accuracy(trained, d, d.eval), 0.9);
}

}  // namespace
}  // namespace conductance
