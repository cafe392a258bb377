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

#ifndef CONDUCTANCE_ZOO_H_
#define CONDUCTANCE_ZOO_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conductance/attribution.h"
#include "conductance/cut.h"
#include "conductance/datasets.h"
#include "conductance/graph.h"
#include "conductance/tensor.h"

namespace conductance {

// A scored expectation shipped with a model. `method` is one of the
// attribution method names or "output" (F at `input`, unit ignored).
// Path methods use a 512-step midpoint path from `baseline` to `input`.
struct GoldenCheck {
  std::string name;
  std::string method;
  UnitKey unit;
  std::vector<double> input;
  std::vector<double> baseline;
  double expected = 0.0;
  double tolerance = 0.0;  // 0 means exact equality
};

struct GoldenOutcome {
  std::string model;
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

inline constexpr int kGoldenSteps = 512;

struct ZooModel {
  std::string name;
  // Output is the score of one class of `logits` (class 0 unless retargeted).
  Graph graph;
  NodeId logits = -1;
  int num_classes = 1;
  // [vocab, dim] table for token models; graph input is the embedded
  // sequence.
  std::optional<Tensor> embedding;
  std::vector<LayerCut> cuts;
  std::vector<NeuronGroup> groups;
  std::vector<GoldenCheck> golden_checks;

  Graph ForClass(int label) const;
  const LayerCut& Cut(std::string_view cut_name) const;
  const NeuronGroup& Group(std::string_view group_name) const;

  // Graph inputs for an example (embeds tokens when the model has a table).
  std::vector<Tensor> InputsFor(const Example& example) const;
  std::vector<Tensor> Embed(std::span<const int32_t> tokens) const;
  std::vector<Tensor> ZeroBaseline() const;
  std::vector<double> Logits(const std::vector<Tensor>& inputs) const;
  int Predict(const std::vector<Tensor>& inputs) const;
};

// y = 2x, z = min(y, 1).
ZooModel SaturationNet();
// f(x) = x, g(y) = max(y - 1, 0); goldens at x = 1 - epsilon.
ZooModel OvershootNet(double epsilon = 0.01);
// f(x) = -x, g(y) = y.
ZooModel PolarityNet();

enum class HiddenFn { kIdentity, kSquare, kSigmoid };
std::string_view HiddenFnName(HiddenFn fn);
double ApplyHiddenFn(HiddenFn fn, double x);

// F(x) = a * f1(x) + b * f2(x) for scalar x; cut "hidden" = {f1, f2}.
// The golden check pins conductance(f1) at `probe` against a(f1(x) - f1(0)).
ZooModel LinearComboNet(double a, double b, HiddenFn f1, HiddenFn f2, double probe = 1.5);

struct TextCnnConfig {
  int vocab = 32;
  int seq_len = 12;
  int embed_dim = 8;
  std::vector<int> widths = {3, 4, 5, 6};
  int maps_per_width = 2;
  int dense_dim = 4;
  int classes = 2;
  uint64_t seed = 0;
};

// Embedded sequence -> conv per width (+bias, ReLU) -> 1-max pool -> concat
// ("pooled") -> dense ReLU ("dense") -> logits. One filter group per pooled
// feature map; cuts "pooled", "pools" and "dense".
ZooModel ToyTextCnn(const TextCnnConfig& config = {});

struct MlpConfig {
  int in_dim = 10;
  std::vector<int> hidden = {16, 8};
  int classes = 5;
  uint64_t seed = 0;
};

// x -> ReLU layers "h1", "h2", ... -> logits. One group per unit of "h1".
ZooModel ToyMlp(const MlpConfig& config = {});

// Purely linear x -> "h" -> logits, zero biases.
ZooModel ToyLinearNet(int in_dim = 6, int hidden = 6, int classes = 2, uint64_t seed = 0);

// ToyMlp architecture with hand-set weights for blob data from
// BlobSpec{classes, in_dim}: h1 unit c < classes fires only for class c and
// drives logit c; the remaining h1 units carry large, class-independent
// activations with no path to the logits.
ZooModel PlantedSelectionMlp(int classes = 5, int in_dim = 10, double separation = 4.0,
                             uint64_t seed = 0);

std::vector<GoldenOutcome> RunGoldenChecks(const ZooModel& model);

// Builtin zoo entries with default parameters.
std::vector<std::string> ZooNames();
// Throws ValidationError for unknown names. `seed` only affects the
// randomly initialized models.
ZooModel BuildZooModel(std::string_view name, uint64_t seed = 0);

// Model file = graph file whose metadata carries the zoo fields.
std::string SaveModel(const ZooModel& model);
ZooModel LoadModel(std::string_view text);

}  // namespace conductance

#endif  // CONDUCTANCE_ZOO_H_
