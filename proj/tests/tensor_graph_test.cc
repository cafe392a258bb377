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

#include <gtest/gtest.h>

#include "conductance/cut.h"
#include "conductance/errors.h"
#include "conductance/graph.h"
#include "conductance/tensor.h"
#include "conductance/zoo.h"

namespace conductance {
namespace {

TEST(TensorTest, ShapeAndData) {
  Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.rank(), 2);
  EXPECT_EQ(t.size(), 6);
  EXPECT_EQ(t.at(1, 2), 6.0);
  EXPECT_EQ(ShapeToString(t.shape()), "[2,3]");
  EXPECT_THROW(Tensor({2, 2}, {1, 2, 3}), ShapeError);
  EXPECT_THROW(Tensor({-1}), ShapeError);
}

TEST(TensorTest, ZerosAndFilled) {
  Tensor z({3});
  for (double v : z.data()) EXPECT_EQ(v, 0.0);
  Tensor f = Tensor::Filled({2}, 1.5);
  EXPECT_EQ(f[1], 1.5);
}

TEST(TensorTest, AllFiniteFlagsNan) {
  Tensor t = Tensor::Vector({1.0, std::nan("")});
  EXPECT_FALSE(t.AllFinite());
}

TEST(TensorTest, ArithmeticHelpers) {
  Tensor a = Tensor::Vector({1, 2, 3});
  Tensor b = Tensor::Vector({0.5, 0.5, 0.5});
  EXPECT_EQ(Subtract(a, b), Tensor::Vector({0.5, 1.5, 2.5}));
  EXPECT_EQ(Axpy(a, 2.0, b), Tensor::Vector({2, 3, 4}));
  EXPECT_DOUBLE_EQ(Dot(a, b), 3.0);
  EXPECT_THROW(Subtract(a, Tensor::Vector({1})), ShapeError);
}

TEST(GraphBuilderTest, InfersShapes) {
  GraphBuilder b;
  NodeId x = b.Input("x", {4, 3});
  NodeId w = b.Constant("w", Tensor({2, 3, 5}));
  NodeId c = b.Conv1D(x, w, "conv");
  EXPECT_EQ(b.shape(c), (Shape{3, 5}));
  NodeId p = b.MaxPoolGlobal(c, "pool");
  EXPECT_EQ(b.shape(p), (Shape{5}));
  NodeId m = b.MatMul(p, b.Constant("m", Tensor({5, 2})), "mm");
  EXPECT_EQ(b.shape(m), (Shape{2}));
  NodeId cat = b.Concat({p, m}, "cat");
  EXPECT_EQ(b.shape(cat), (Shape{7}));
  NodeId s = b.Select(cat, 6, "out");
  Graph g = std::move(b).Build(s);
  EXPECT_EQ(g.output(), s);
  EXPECT_EQ(g.inputs(), std::vector<NodeId>{x});
}

TEST(GraphBuilderTest, RejectsShapeMismatch) {
  GraphBuilder b;
  NodeId x = b.Input("x", {3});
  NodeId w = b.Constant("w", Tensor({4, 2}));
  EXPECT_THROW(b.MatMul(x, w, "bad"), ShapeError);
  EXPECT_THROW(b.Add(x, b.Constant("c", Tensor({2})), "bad_add"), ShapeError);
}

TEST(GraphBuilderTest, RejectsDuplicateNamesAndForwardEdges) {
  GraphBuilder b;
  NodeId x = b.Input("x", {1});
  EXPECT_THROW(b.Input("x", {1}), GraphError);
  OpKind relu;
  relu.type = OpType::kRelu;
  EXPECT_THROW(b.AddNode(relu, {x + 5}, "r"), GraphError);
}

TEST(GraphBuilderTest, OutputMustBeScalar) {
  GraphBuilder b;
  NodeId x = b.Input("x", {2});
  EXPECT_THROW(std::move(b).Build(x), GraphError);
}

TEST(GraphBuilderTest, EdgesPointForward) {
  const Graph g = ToyTextCnn().graph;
  for (const Node& n : g.nodes()) {
    for (NodeId in : n.inputs) EXPECT_LT(in, n.id) << n.name;
  }
  EXPECT_EQ(g.node(g.output()).shape, (Shape{1}));
}

TEST(GraphTest, AncestorsAndNames) {
  GraphBuilder b;
  NodeId x = b.Input("x", {1});
  NodeId unused = b.Neg(x, "unused");
  NodeId y = b.Relu(x, "y");
  Graph g = std::move(b).Build(y);
  const std::vector<bool> anc = g.AncestorsOf(g.output());
  EXPECT_TRUE(anc[x]);
  EXPECT_FALSE(anc[unused]);
  EXPECT_EQ(g.NodeByName("y"), y);
  EXPECT_FALSE(g.FindNode("nope").has_value());
  EXPECT_THROW(g.NodeByName("nope"), GraphError);
}

TEST(GraphTest, WithSelectOutputReplacesTrailingSelect) {
  const ZooModel m = ToyMlp();
  const Graph g1 = m.graph.WithSelectOutput(m.logits, 3);
  EXPECT_EQ(g1.num_nodes(), m.graph.num_nodes());
  EXPECT_EQ(g1.node(g1.output()).op.index, 3);
  EXPECT_THROW(m.graph.WithSelectOutput(m.logits, 99), GraphError);
}

TEST(GraphTest, WithAblationLeavesSourceUntouched) {
  const ZooModel m = ToyMlp();
  const NodeId h1 = m.graph.NodeByName("h1");
  const Graph ablated = m.graph.WithAblation(h1, {2, 0, 2});
  EXPECT_TRUE(m.graph.node(h1).ablated.empty());
  EXPECT_EQ(ablated.node(h1).ablated, (std::vector<int64_t>{0, 2}));
  EXPECT_THROW(m.graph.WithAblation(h1, {100}), GraphError);
}

TEST(CutTest, SeparatingDetection) {
  const ZooModel cnn = ToyTextCnn();
  EXPECT_TRUE(cnn.Cut("pooled").separating());
  EXPECT_TRUE(cnn.Cut("pools").separating());
  EXPECT_TRUE(cnn.Cut("dense").separating());
  // One filter map alone leaves the other widths as a bypass.
  const NodeId pool3 = cnn.graph.NodeByName("pool3");
  EXPECT_FALSE(LayerCut::WholeNodes(cnn.graph, "p3", {pool3}).separating());
  // Part of a node is not separating.
  const NodeId pooled = cnn.graph.NodeByName("pooled");
  EXPECT_FALSE(LayerCut::Create(cnn.graph, "half", {{pooled, 0, 4}}).separating());
}

TEST(CutTest, NestedMembersAreNotSeparating) {
  const ZooModel mlp = ToyMlp();
  const NodeId h1 = mlp.graph.NodeByName("h1");
  const NodeId h2 = mlp.graph.NodeByName("h2");
  EXPECT_FALSE(LayerCut::WholeNodes(mlp.graph, "both", {h1, h2}).separating());
}

TEST(CutTest, RejectsBadMembers) {
  const ZooModel mlp = ToyMlp();
  const NodeId h1 = mlp.graph.NodeByName("h1");
  EXPECT_THROW(LayerCut::Create(mlp.graph, "x", {{mlp.graph.inputs()[0], 0, 1}}), GraphError);
  EXPECT_THROW(LayerCut::Create(mlp.graph, "r", {{h1, 0, 99}}), GraphError);
  EXPECT_THROW(LayerCut::Create(mlp.graph, "o", {{h1, 0, 4}, {h1, 2, 6}}), GraphError);
  EXPECT_THROW(LayerCut::Create(mlp.graph, "e", {{h1, 3, 3}}), GraphError);
}

TEST(CutTest, PartitionsAndGroups) {
  const ZooModel mlp = ToyMlp();
  const LayerCut& h1 = mlp.Cut("h1");
  const auto groups = EqualPartition(h1, 4, "g");
  ASSERT_EQ(groups.size(), 4u);
  EXPECT_EQ(groups[0].members().size(), 4u);
  EXPECT_NO_THROW(ValidatePartition(h1, groups));
  EXPECT_THROW(EqualPartition(h1, 5, "g"), GraphError);
  std::vector<NeuronGroup> partial(groups.begin(), groups.begin() + 3);
  EXPECT_THROW(ValidatePartition(h1, partial), GraphError);
  EXPECT_THROW(NeuronGroup("empty", {}), GraphError);
  EXPECT_THROW(NeuronGroup("dup", {{1, 0}, {1, 0}}), GraphError);
}

}  // namespace
}  // namespace conductance
