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
#include "conductance/errors.h"
#include "conductance/zoo.h"
#include "oracles.h"

namespace conductance {
namespace {

TEST(ZooTest, EveryBuiltinPassesItsGoldenChecks) {
  for (const std::string& name : ZooNames()) {
    const ZooModel m = BuildZooModel(name);
    for (const GoldenOutcome& o : RunGoldenChecks(m)) {
      EXPECT_TRUE(o.passed) << o.name << " expected " << o.expected << " got " << o.actual;
    }
  }
  EXPECT_THROW(BuildZooModel("resnet"), ValidationError);
}

TEST(ZooTest, GoldenChecksCoverTheCounterexamples) {
  std::vector<std::string> names;
  for (const std::string& model : {"saturation", "overshoot", "polarity"}) {
    for (const GoldenCheck& c : BuildZooModel(model).golden_checks) names.push_back(c.name);
  }
  for (const std::string& want :
       {"saturation/conductance_y", "saturation/gradact_y", "overshoot/conductance_f",
        "overshoot/activation_f", "polarity/influence_g", "polarity/conductance_g"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
  }
}

TEST(ZooTest, OvershootGradientTimesActivationIsZero) {
  // The gradient at x = 1 - eps is zero, so gradient x activation vanishes.
  const ZooModel m = OvershootNet(0.01);
  const NodeId f = m.graph.NodeByName("f");
  EXPECT_EQ(GradientTimesActivation(m.graph, {Tensor::Scalar(0.99)}, m.Cut("f")).Score({f, 0}),
            0.0);
}

TEST(ZooTest, LinearComboMatchesDirectEvaluation) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const HiddenFn fns[] = {HiddenFn::kIdentity, HiddenFn::kSquare, HiddenFn::kSigmoid};
  for (int trial = 0; trial < 20; ++trial) {
    const double a = u(rng);
    const double b = u(rng);
    const double x = u(rng);
    const HiddenFn f1 = fns[trial % 3];
    const HiddenFn f2 = fns[(trial / 3) % 3];
    const ZooModel m = LinearComboNet(a, b, f1, f2, x);
    const NodeId n1 = m.graph.NodeByName("f1");
    const PathSpec p = PathSpec::FromZero({Tensor::Scalar(x)}, 512);
    const double c1 = ConductanceTotal(m.graph, p, m.Cut("hidden")).Score({n1, 0});
    const double want = a * (ApplyHiddenFn(f1, x) - ApplyHiddenFn(f1, 0.0));
    EXPECT_NEAR(c1, want, 1e-5 * std::max(1.0, std::abs(want)))
        << HiddenFnName(f1) << " a=" << a << " x=" << x;
  }
}

TEST(TextCnnTest, ZeroEmbeddingGivesBiasOutput) {
  const ZooModel m = ToyTextCnn();
  const std::vector<Tensor> zero = m.ZeroBaseline();
  const ForwardTrace t = Forward(m.graph, zero);
  // Untrained biases are zero, so every layer is exactly zero.
  EXPECT_EQ(t.output(m.graph), 0.0);
  for (double v : t.at(m.logits).data()) EXPECT_EQ(v, 0.0);
}

TEST(TextCnnTest, StructureAndGroups) {
  const ZooModel m = ToyTextCnn();
  EXPECT_EQ(m.groups.size(), 8u);
  EXPECT_TRUE(m.Cut("pooled").separating());
  EXPECT_EQ(m.num_classes, 2);
  ASSERT_TRUE(m.embedding.has_value());
  EXPECT_EQ(m.embedding->shape(), (Shape{32, 8}));
  EXPECT_THROW(m.Embed(std::vector<int32_t>{1, 2}), ValidationError);
  EXPECT_THROW(m.Embed(std::vector<int32_t>(12, 99)), ValidationError);
}

TEST(TextCnnTest, MaxPoolGradientHitsOneWindowPerFilter) {
  const ZooModel m = ToyTextCnn();
  std::mt19937_64 rng(2);
  const std::vector<Tensor> x{oracle::RandomTensor({12, 8}, rng)};
  for (double alpha : {0.25, 0.75, 1.0}) {
    const std::vector<Tensor> pt{Tensor({12, 8}, [&] {
      std::vector<double> v(x[0].data().begin(), x[0].data().end());
      for (double& e : v) e *= alpha;
      return v;
    }())};
    const ForwardTrace trace = Forward(m.graph, pt);
    for (int w : {3, 4, 5, 6}) {
      const NodeId relu = m.graph.NodeByName("conv" + std::to_string(w) + ".relu");
      const NodeId pool = m.graph.NodeByName("pool" + std::to_string(w));
      for (int64_t c = 0; c < 2; ++c) {
        Tensor seed(m.graph.node(pool).shape);
        seed[c] = 1.0;
        const Tensor g = Vjp(m.graph, trace, pool, seed)[relu];
        int nonzero = 0;
        for (int64_t t = 0; t < g.dim(0); ++t) nonzero += g.at(t, c) != 0.0;
        EXPECT_EQ(nonzero, 1) << "width " << w << " filter " << c;
      }
    }
  }
}

TEST(TextCnnTest, CompletenessOnPooledLayer) {
  const ZooModel m = ToyTextCnn({.seed = 3});
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 3; ++trial) {
    const std::vector<Tensor> x{oracle::RandomTensor({12, 8}, rng)};
    const PathSpec p = PathSpec::FromZero(x, 512);
    const CompletenessCheck c =
        CheckCompleteness(m.graph, p, ConductanceTotal(m.graph, p, m.Cut("pooled")));
    EXPECT_LE(c.relative, 1e-3) << "delta " << c.delta;
  }
}

TEST(MlpTest, ZeroInputGivesBiasPath) {
  const ZooModel m = ToyMlp();
  const ForwardTrace t = Forward(m.graph, m.ZeroBaseline());
  for (double v : t.at(m.graph.NodeByName("h1")).data()) EXPECT_DOUBLE_EQ(v, 0.01);
}

TEST(MlpTest, ForClassRetargets) {
  const ZooModel m = ToyMlp();
  std::mt19937_64 rng(4);
  const std::vector<Tensor> x{oracle::RandomTensor({10}, rng)};
  const std::vector<double> logits = m.Logits(x);
  for (int c = 0; c < 5; ++c) EXPECT_EQ(oracle::Output(m.ForClass(c), x), logits[c]);
  EXPECT_THROW(m.ForClass(5), ValidationError);
}

TEST(PlantedTest, OracleUnitsAreClassSelective) {
  const ZooModel m = PlantedSelectionMlp();
  const NodeId h1 = m.graph.NodeByName("h1");
  for (int c = 0; c < 5; ++c) {
    Example e;
    e.features.assign(10, 0.0);
    e.features[c] = 4.0;
    const ForwardTrace t = Forward(m.graph, m.InputsFor(e));
    for (int u = 0; u < 5; ++u) {
      if (u == c) {
        EXPECT_GT(t.at(h1)[u], 0.0);
      } else {
        EXPECT_EQ(t.at(h1)[u], 0.0);
      }
    }
    EXPECT_EQ(m.Predict(m.InputsFor(e)), c);
  }
}

}  // namespace
}  // namespace conductance
