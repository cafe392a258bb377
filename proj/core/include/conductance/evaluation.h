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

#ifndef CONDUCTANCE_EVALUATION_H_
#define CONDUCTANCE_EVALUATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conductance/attribution.h"
#include "conductance/cut.h"
#include "conductance/graph.h"
#include "conductance/stats.h"
#include "conductance/tensor.h"

namespace conductance {

// Copy of `graph` whose group members are forced to 0 after activation.
// `graph` itself is untouched. Throws GraphError if a member is an input,
// a constant or the output.
Graph Ablate(const Graph& graph, const NeuronGroup& group);

// F(x) - F_ablated(x) on the graph's output.
double AblationScore(const Graph& graph, const NeuronGroup& group,
                     const std::vector<Tensor>& input);

// Ablates `ranking` cumulatively, re-evaluating every class score at
// `logits`, until the argmax class differs from the unablated one. Returns the
// number of groups ablated, or nullopt when `max_ablations` are exhausted
// without a change. A tie for the top class before any ablation counts as
// already on the decision boundary and returns 0.
std::optional<int64_t> FlipsNeeded(const Graph& graph, NodeId logits,
                                   const std::vector<Tensor>& input,
                                   const std::vector<NeuronGroup>& ranking,
                                   int64_t max_ablations);

// |sum s| / sum |s|. 1 when all nonzero scores share a sign; an all-zero
// input counts as agreeing (1).
double SignAgreementRatio(std::span<const double> scores);

struct AblationStudyOptions {
  std::vector<Method> methods = {Method::kConductance, Method::kInternalInfluence,
                                 Method::kActivation, Method::kGradientTimesActivation};
  int top_k = 10;
  int steps = 128;
  QuadratureRule rule = QuadratureRule::kMidpoint;
  int threads = 1;
};

struct AblationCell {
  int64_t input = 0;
  Method method = Method::kConductance;
  int64_t rank = 0;
  int64_t group = 0;
  double importance = 0.0;
  double ablation = 0.0;
};

struct CorrelationSummary {
  Method method = Method::kConductance;
  // Over all pooled (input, selected group) pairs; nullopt when undefined.
  std::optional<double> pooled_r;
  int64_t pairs = 0;
  // Distribution of per-input r over inputs where it is defined.
  int64_t defined_inputs = 0;
  std::optional<double> mean_r;
  std::optional<double> q25_r;
  std::optional<double> median_r;
  std::optional<double> q75_r;
  // Cumulative ablations along this method's ranking until the prediction
  // changes.
  int64_t flipped_inputs = 0;
  std::optional<double> mean_flips;
  std::optional<int64_t> max_flips;
  int64_t flipped_within_top_k = 0;
};

struct InputSummary {
  int64_t input = 0;
  int predicted = 0;
  double score = 0.0;  // pre-softmax score of the predicted class
  std::vector<double> ablation;  // every group, group order
  double sign_agreement = 1.0;
  std::vector<std::optional<int64_t>> flips;  // per method, options order
};

struct AblationReport {
  AblationStudyOptions options;
  std::vector<std::string> groups;
  std::vector<InputSummary> inputs;
  std::vector<AblationCell> cells;
  std::vector<CorrelationSummary> methods;

  const CorrelationSummary& For(Method method) const;
  // One row per (input, method, selected group).
  std::string ToCsv() const;
  std::string ToJson() const;
};

// For each input: take the predicted class, score every group with each
// method against that class's pre-softmax score (zero baseline), keep each
// method's top-k groups, and compare against ablation scores.
AblationReport CorrelationStudy(const Graph& graph, NodeId logits,
                                const std::vector<std::vector<Tensor>>& corpus,
                                const std::vector<NeuronGroup>& groups,
                                const AblationStudyOptions& options = {});

struct FeatureSelectionOptions {
  std::vector<Method> methods = {Method::kConductance, Method::kInternalInfluence,
                                 Method::kActivation, Method::kGradientTimesActivation};
  std::vector<int> k_list = {5, 10, 15, 20};
  // Sum |score| instead of signed scores when aggregating per label.
  bool absolute_aggregate = false;
  int steps = 128;
  QuadratureRule rule = QuadratureRule::kMidpoint;
  int threads = 1;
  LogisticConfig classifier;
};

struct SelectionRow {
  Method method = Method::kConductance;
  int k_requested = 0;
  int k_used = 0;
  std::vector<int64_t> selected;  // group indices, ascending
  double accuracy = 0.0;
};

struct FeatureSelectionReport {
  FeatureSelectionOptions options;
  std::vector<std::string> groups;
  int64_t train_size = 0;
  int64_t eval_size = 0;
  // [method][label][group] aggregated importance over train inputs.
  std::vector<std::vector<std::vector<double>>> aggregate;
  std::vector<SelectionRow> rows;
  std::vector<std::string> warnings;

  const SelectionRow& Find(Method method, int k_requested) const;
  std::string ToCsv() const;
  std::string ToJson() const;
};

// Aggregates each method's per-group importance (target: the example's own
// label) over the train inputs per label, ranks groups by their best label
// aggregate, keeps the top k, and fits a logistic classifier on the selected
// groups' activations. Throws ValidationError on an empty or non-positive k
// list; k above the group count is clamped with a warning.
FeatureSelectionReport FeatureSelectionStudy(const Graph& graph, NodeId logits, int num_classes,
                                             const std::vector<std::vector<Tensor>>& inputs,
                                             const std::vector<int>& labels,
                                             std::span<const int64_t> train,
                                             std::span<const int64_t> eval,
                                             const std::vector<NeuronGroup>& groups,
                                             const FeatureSelectionOptions& options = {});

}  // namespace conductance

#endif  // CONDUCTANCE_EVALUATION_H_
