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
#include <random>

#include <gtest/gtest.h>

#include "conductance/autodiff.h"
#include "conductance/datasets.h"
#include "conductance/errors.h"
#include "conductance/evaluation.h"
#include "conductance/layer_analysis.h"
#include "conductance/zoo.h"
#include "oracles.h"

namespace conductance {
namespace {

std::vector<std::vector<Tensor>> RandomCorpus(const ZooModel& m, int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Tensor>> out;
  for (int i = 0; i < n; ++i) {
    std::vector<Tensor> x;
    for (NodeId in : m.graph.inputs()) {
      x.push_back(oracle::RandomTensor(m.graph.node(in).shape, rng));
    }
    out.push_back(std::move(x));
  }
  return out;
}

TEST(AblationTest, DoesNotMutateSource) {
  const ZooModel m = ToyMlp();
  const auto corpus = RandomCorpus(m, 1, 1);
  const Graph before = m.graph;
  const double f = oracle::Output(m.graph, corpus[0]);
  const Graph ablated = Ablate(m.graph, m.groups[2]);
  EXPECT_EQ(m.graph, before);
  EXPECT_EQ(oracle::Output(m.graph, corpus[0]), f);
  EXPECT_NE(ablated, m.graph);
}

TEST(AblationTest, ScoreMatchesManualZeroing) {
  // Zero one hidden unit by hand: rebuild the upper graph and feed it y with
  // that entry cleared.
  const ZooModel m = ToyMlp();
  const NodeId h1 = m.graph.NodeByName("h1");
  const auto corpus = RandomCorpus(m, 5, 2);
  const Graph upper = oracle::UpperGraph(m.graph, h1);
  for (const auto& x : corpus) {
    Tensor y = Forward(m.graph, x).at(h1);
    const double full = oracle::Output(upper, {y});
    y[4] = 0.0;
    const double without = oracle::Output(upper, {y});
    EXPECT_NEAR(AblationScore(m.graph, m.groups[4], x), full - without, 1e-12);
  }
}

TEST(AblationTest, RejectsNonHiddenMembers) {
  const ZooModel m = ToyMlp();
  EXPECT_THROW(Ablate(m.graph, NeuronGroup("in", {{m.graph.inputs()[0], 0}})), GraphError);
  EXPECT_THROW(Ablate(m.graph, NeuronGroup("out", {{m.graph.output(), 0}})), GraphError);
}

TEST(LinearExactnessTest, ConductanceEqualsGradActEqualsAblation) {
  const ZooModel m = ToyLinearNet();
  for (const auto& x : RandomCorpus(m, 5, 3)) {
    const PathSpec p = PathSpec::FromZero(x, 7);
    const UnitAttributions a = AttributeUnits(m.graph, p, m.Cut("h"));
    for (const NeuronGroup& g : m.groups) {
      const UnitKey u = g.members()[0];
      const double abl = AblationScore(m.graph, g, x);
      EXPECT_NEAR(a.conductance.Score(u), abl, 1e-12);
      EXPECT_NEAR(a.gradient_activation.Score(u), abl, 1e-12);
    }
  }
}

TEST(FlipsTest, CountsCumulativeAblations) {
  // logits = [h0 + h1, 1.5]: class 0 wins until both units are gone.
  GraphBuilder b;
  NodeId x = b.Input("x", {2});
  NodeId h = b.Relu(x, "h");
  NodeId w = b.Constant("w", Tensor({2, 2}, {1, 0, 1, 0}));
  NodeId logits = b.Add(b.MatMul(h, w), b.Constant("b", Tensor::Vector({0.0, 1.5})), "logits");
  Graph g = std::move(b).Build(b.Select(logits, 0, "out"));
  const std::vector<Tensor> in{Tensor::Vector({1.0, 1.0})};
  const NeuronGroup g0("h0", {{h, 0}});
  const NeuronGroup g1("h1", {{h, 1}});
  EXPECT_EQ(FlipsNeeded(g, logits, in, {g0, g1}, 2), 1);
  const std::vector<Tensor> big{Tensor::Vector({1.0, 3.0})};
  EXPECT_EQ(FlipsNeeded(g, logits, big, {g0, g1}, 2), 2);
  EXPECT_EQ(FlipsNeeded(g, logits, big, {g0, g1}, 1), std::nullopt);
  EXPECT_EQ(FlipsNeeded(g, logits, big, {g1, g0}, 2), 1);
  // Already tied at the input.
  const std::vector<Tensor> tie{Tensor::Vector({0.75, 0.75})};
  EXPECT_EQ(FlipsNeeded(g, logits, tie, {g0, g1}, 2), 0);
}

TEST(SignAgreementTest, HandValues) {
  EXPECT_DOUBLE_EQ(SignAgreementRatio(std::vector<double>{1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(SignAgreementRatio(std::vector<double>{1, -1}), 0.0);
  EXPECT_DOUBLE_EQ(SignAgreementRatio(std::vector<double>{2, -1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(SignAgreementRatio(std::vector<double>{-4}), 1.0);
  EXPECT_DOUBLE_EQ(SignAgreementRatio(std::vector<double>{0, 0}), 1.0);
}

TEST(SignAgreementTest, AlwaysInUnitInterval) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(1 + trial % 7);
    for (double& v : s) v = n(rng);
    const double r = SignAgreementRatio(s);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(CorrelationStudyTest, LinearNetworkIsExact) {
  const ZooModel m = ToyLinearNet();
  AblationStudyOptions opts;
  opts.top_k = 6;
  opts.steps = 3;
  const AblationReport r = CorrelationStudy(m.graph, m.logits, RandomCorpus(m, 10, 5), m.groups, opts);
  ASSERT_TRUE(r.For(Method::kConductance).pooled_r.has_value());
  EXPECT_NEAR(*r.For(Method::kConductance).pooled_r, 1.0, 1e-9);
  EXPECT_NEAR(*r.For(Method::kGradientTimesActivation).pooled_r, 1.0, 1e-9);
  for (const AblationCell& c : r.cells) {
    if (c.method == Method::kConductance) EXPECT_NEAR(c.importance, c.ablation, 1e-12);
  }
}

TEST(CorrelationStudyTest, PooledRMatchesOracleOnCells) {
  const ZooModel m = ToyMlp();
  const AblationReport r = CorrelationStudy(m.graph, m.logits, RandomCorpus(m, 6, 6), m.groups,
                                            {.top_k = 4, .steps = 16});
  for (const CorrelationSummary& s : r.methods) {
    std::vector<double> imp, abl;
    for (const AblationCell& c : r.cells) {
      if (c.method != s.method) continue;
      imp.push_back(c.importance);
      abl.push_back(c.ablation);
    }
    EXPECT_EQ(static_cast<int64_t>(imp.size()), s.pairs);
    ASSERT_TRUE(s.pooled_r.has_value());
    EXPECT_NEAR(*s.pooled_r, oracle::Pearson(imp, abl), 1e-12);
  }
}

TEST(CorrelationStudyTest, CellsFollowRankingAndPrediction) {
  const ZooModel m = ToyMlp();
  const auto corpus = RandomCorpus(m, 3, 7);
  const AblationReport r =
      CorrelationStudy(m.graph, m.logits, corpus, m.groups, {.top_k = 5, .steps = 8});
  for (const InputSummary& in : r.inputs) {
    EXPECT_EQ(in.predicted, m.Predict(corpus[in.input]));
    EXPECT_EQ(in.ablation.size(), m.groups.size());
  }
  for (size_t i = 1; i < r.cells.size(); ++i) {
    const AblationCell& a = r.cells[i - 1];
    const AblationCell& b = r.cells[i];
    if (a.input == b.input && a.method == b.method) EXPECT_GE(a.importance, b.importance);
  }
}

TEST(CorrelationStudyTest, DeterministicAcrossThreads) {
  const ZooModel m = ToyTextCnn();
  const auto corpus = RandomCorpus(m, 8, 8);
  AblationStudyOptions opts{.top_k = 3, .steps = 16, .threads = 1};
  const AblationReport a = CorrelationStudy(m.graph, m.logits, corpus, m.groups, opts);
  opts.threads = 4;
  const AblationReport b = CorrelationStudy(m.graph, m.logits, corpus, m.groups, opts);
  EXPECT_EQ(a.ToCsv(), b.ToCsv());
  EXPECT_EQ(a.ToJson(), b.ToJson());
}

TEST(CorrelationStudyTest, Validation) {
  const ZooModel m = ToyMlp();
  const auto corpus = RandomCorpus(m, 2, 9);
  EXPECT_THROW(CorrelationStudy(m.graph, m.logits, {}, m.groups), ValidationError);
  EXPECT_THROW(CorrelationStudy(m.graph, m.logits, corpus, m.groups, {.top_k = 0}),
               ValidationError);
  EXPECT_THROW(CorrelationStudy(m.graph, m.logits, corpus, m.groups,
                                {.methods = {Method::kIntegratedGradients}}),
               ValidationError);
}

class FeatureSelectionTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const BlobSpec spec{.num_classes = 5, .dim = 10, .per_class = 40, .sigma = 0.5, .seed = 1};
    data_ = GenBlobs(spec);
    for (const Example& e : data_.examples) {
      inputs_.push_back(model_.InputsFor(e));
      labels_.push_back(e.label);
    }
  }

  ZooModel model_ = PlantedSelectionMlp();
  LabeledDataset data_;
  std::vector<std::vector<Tensor>> inputs_;
  std::vector<int> labels_;
};

TEST_F(FeatureSelectionTest, ConductanceRecoversPlantedUnits) {
  FeatureSelectionOptions opts;
  opts.k_list = {5};
  opts.steps = 32;
  const FeatureSelectionReport r =
      FeatureSelectionStudy(model_.graph, model_.logits, 5, inputs_, labels_, data_.train,
                            data_.eval, model_.groups, opts);
  const SelectionRow& row = r.Find(Method::kConductance, 5);
  EXPECT_EQ(row.selected, (std::vector<int64_t>{0, 1, 2, 3, 4}));
  EXPECT_GE(row.accuracy, 0.95);
  // Activation favors the loud distractors.
  EXPECT_NE(r.Find(Method::kActivation, 5).selected, row.selected);
}

TEST_F(FeatureSelectionTest, AggregateIsSumOverTrainInputsPerLabel) {
  FeatureSelectionOptions opts;
  opts.methods = {Method::kConductance};
  opts.k_list = {3};
  opts.steps = 8;
  const FeatureSelectionReport r =
      FeatureSelectionStudy(model_.graph, model_.logits, 5, inputs_, labels_, data_.train,
                            data_.eval, model_.groups, opts);
  std::vector<double> expected(model_.groups.size(), 0.0);
  for (int64_t i : data_.train) {
    if (labels_[i] != 2) continue;
    const Graph g = model_.graph.WithSelectOutput(model_.logits, 2);
    const AttributionResult a = ConductanceTotal(g, PathSpec::FromZero(inputs_[i], 8),
                                                 CutFromGroups(g, "all", model_.groups));
    const auto scores = GroupScores(a, model_.groups);
    for (size_t k = 0; k < scores.size(); ++k) expected[k] += scores[k].score;
  }
  for (size_t k = 0; k < expected.size(); ++k) {
    EXPECT_NEAR(r.aggregate[0][2][k], expected[k], 1e-9);
  }
}

TEST_F(FeatureSelectionTest, KValidationAndClamping) {
  FeatureSelectionOptions opts;
  opts.steps = 4;
  opts.methods = {Method::kActivation};
  opts.k_list = {0};
  EXPECT_THROW(FeatureSelectionStudy(model_.graph, model_.logits, 5, inputs_, labels_,
                                     data_.train, data_.eval, model_.groups, opts),
               ValidationError);
  opts.k_list = {};
  EXPECT_THROW(FeatureSelectionStudy(model_.graph, model_.logits, 5, inputs_, labels_,
                                     data_.train, data_.eval, model_.groups, opts),
               ValidationError);
  opts.k_list = {100};
  const FeatureSelectionReport r =
      FeatureSelectionStudy(model_.graph, model_.logits, 5, inputs_, labels_, data_.train,
                            data_.eval, model_.groups, opts);
  EXPECT_EQ(r.rows[0].k_used, static_cast<int>(model_.groups.size()));
  EXPECT_EQ(r.warnings.size(), 1u);
}

}  // namespace
}  // namespace conductance
