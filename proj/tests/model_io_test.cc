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

#include "conductance/autodiff.h"
#include "conductance/errors.h"
#include "conductance/model_io.h"
#include "conductance/zoo.h"

namespace conductance {
namespace {

TEST(Base64Test, KnownVectors) {
  EXPECT_EQ(Base64Encode(""), "");
  EXPECT_EQ(Base64Encode("f"), "Zg==");
  EXPECT_EQ(Base64Encode("fo"), "Zm8=");
  EXPECT_EQ(Base64Encode("foo"), "Zm9v");
  EXPECT_EQ(Base64Encode("foobar"), "Zm9vYmFy");
  EXPECT_EQ(Base64Decode("Zm9vYg=="), "foob");
  EXPECT_THROW(Base64Decode("Zm9v!"), FormatError);
  EXPECT_THROW(Base64Decode("Zm9"), FormatError);
}

TEST(TensorJsonTest, RoundTripIsBitExact) {
  const Tensor t({2, 2}, {0.1, -1e-300, 3.141592653589793, -0.0});
  const Tensor back = TensorFromJson(TensorToJson(t));
  ASSERT_EQ(back.shape(), t.shape());
  for (int64_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(std::signbit(back[i]), std::signbit(t[i]));
    EXPECT_EQ(back[i], t[i]);
  }
}

TEST(ModelIoTest, GraphRoundTripIsByteStable) {
  for (const std::string& name : ZooNames()) {
    const ZooModel m = BuildZooModel(name);
    const std::string text = SaveGraph(m.graph);
    const LoadedGraph loaded = LoadGraph(text);
    EXPECT_EQ(loaded.graph, m.graph) << name;
    EXPECT_EQ(SaveGraph(loaded.graph), text) << name;
  }
}

TEST(ModelIoTest, AblationSurvivesRoundTrip) {
  const ZooModel m = ToyMlp();
  const Graph g = m.graph.WithAblation(m.graph.NodeByName("h1"), {1, 3});
  EXPECT_EQ(LoadGraph(SaveGraph(g)).graph, g);
}

TEST(ModelIoTest, ZooModelRoundTrip) {
  const ZooModel m = ToyTextCnn();
  const std::string text = SaveModel(m);
  const ZooModel back = LoadModel(text);
  EXPECT_EQ(back.name, m.name);
  EXPECT_EQ(back.graph, m.graph);
  EXPECT_EQ(back.logits, m.logits);
  EXPECT_EQ(back.num_classes, m.num_classes);
  ASSERT_TRUE(back.embedding.has_value());
  EXPECT_EQ(*back.embedding, *m.embedding);
  ASSERT_EQ(back.cuts.size(), m.cuts.size());
  EXPECT_EQ(back.cuts[0].members(), m.cuts[0].members());
  ASSERT_EQ(back.groups.size(), m.groups.size());
  EXPECT_EQ(back.groups[3].members(), m.groups[3].members());
  EXPECT_EQ(SaveModel(back), text);
}

TEST(ModelIoTest, GoldenChecksTravelWithTheModel) {
  const ZooModel back = LoadModel(SaveModel(PolarityNet()));
  ASSERT_EQ(back.golden_checks.size(), PolarityNet().golden_checks.size());
  for (const GoldenOutcome& o : RunGoldenChecks(back)) EXPECT_TRUE(o.passed) << o.name;
}

TEST(ModelIoTest, MalformedDocuments) {
  EXPECT_THROW(LoadGraph("not json"), FormatError);
  EXPECT_THROW(LoadGraph(R"({"format": "other", "version": 1})"), FormatError);
  EXPECT_THROW(LoadGraph(R"({"format": "conductance-graph", "version": 99})"), FormatError);
  std::string text = SaveGraph(PolarityNet().graph);
  const size_t pos = text.find("\"neg\"");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 5, "\"bogus_op\"");
  EXPECT_THROW(LoadGraph(text), FormatError);
}

TEST(ModelIoTest, ShapeTamperingIsCaught) {
  std::string text = SaveGraph(SaturationNet().graph);
  // Declared shape of a node disagrees with what its inputs produce.
  const size_t node = text.find("\"name\": \"z\"");
  ASSERT_NE(node, std::string::npos);
  const size_t open = text.find("\"shape\": [", node);
  const size_t close = text.find(']', open);
  ASSERT_NE(open, std::string::npos);
  text.replace(open, close + 1 - open, "\"shape\": [2, 2]");
  EXPECT_ANY_THROW(LoadGraph(text));
}

TEST(ModelIoTest, CorruptedWeightsFailGoldenCheck) {
  ZooModel m = SaturationNet();
  m.graph = m.graph.WithConstants({{"y.w", Tensor({1, 1}, {3.0})}});
  const ZooModel back = LoadModel(SaveModel(m));
  bool any_failed = false;
  for (const GoldenOutcome& o : RunGoldenChecks(back)) any_failed |= !o.passed;
  EXPECT_TRUE(any_failed);
}

}  // namespace
}  // namespace conductance
