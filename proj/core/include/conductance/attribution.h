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

#ifndef CONDUCTANCE_ATTRIBUTION_H_
#define CONDUCTANCE_ATTRIBUTION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conductance/cut.h"
#include "conductance/graph.h"
#include "conductance/tensor.h"

namespace conductance {

enum class QuadratureRule { kMidpoint, kTrapezoid, kLeft };

std::string_view RuleName(QuadratureRule rule);
// Throws ValidationError for unknown names.
QuadratureRule ParseRule(std::string_view name);

// Straight line from a baseline to an input, x' + alpha (x - x'), discretized
// with `steps` quadrature intervals.
class PathSpec {
 public:
  // Throws ValidationError if steps < 1 or baseline/input shapes differ.
  PathSpec(std::vector<Tensor> baseline, std::vector<Tensor> input, int steps,
           QuadratureRule rule = QuadratureRule::kMidpoint);

  // All-zero baseline (black image / zero embedding).
  static PathSpec FromZero(std::vector<Tensor> input, int steps,
                           QuadratureRule rule = QuadratureRule::kMidpoint);

  const std::vector<Tensor>& baseline() const { return baseline_; }
  const std::vector<Tensor>& input() const { return input_; }
  int steps() const { return steps_; }
  QuadratureRule rule() const { return rule_; }

  // Evaluation points in ascending order; m points for midpoint/left and
  // m + 1 for trapezoid.
  std::vector<double> Alphas() const;
  // Weight of each alpha in units of 1/m (1 everywhere except the trapezoid
  // endpoints, which get 1/2). The integral is sum(coef * f) / m.
  std::vector<double> Coefficients() const;
  std::vector<Tensor> PointAt(double alpha) const;
  // x - x' per input.
  std::vector<Tensor> Difference() const;
  uint64_t BaselineHash() const;

 private:
  std::vector<Tensor> baseline_;
  std::vector<Tensor> input_;
  int steps_;
  QuadratureRule rule_;
};

enum class Method {
  kIntegratedGradients,
  kConductance,
  kInternalInfluence,
  kActivation,
  kGradientTimesActivation,
};

// CLI / report names: ig, conductance, influence, activation, gradact.
std::string_view MethodName(Method method);
Method ParseMethod(std::string_view name);

struct PathMetadata {
  int steps = 0;
  QuadratureRule rule = QuadratureRule::kMidpoint;
  uint64_t baseline_hash = 0;
};

struct AttributionResult {
  Method method = Method::kConductance;
  NodeId target = 0;
  std::map<UnitKey, double> unit_scores;
  // Flat over all graph inputs, concatenated in graph.inputs() order.
  std::optional<std::vector<double>> per_variable;
  // Absent for the point methods (activation, gradient x activation).
  std::optional<PathMetadata> path;

  // Throws GraphError when the unit was not scored.
  double Score(const UnitKey& unit) const;
  double Sum() const;
};

// Integrated gradients of the graph output with respect to every input
// variable. One vjp per quadrature point.
AttributionResult IntegratedGradients(const Graph& graph, const PathSpec& path,
                                      int threads = 1);

// Total conductance of every unit in `cut`: per quadrature point the product
// (dF/dy_j) * (dy_j/dx . (x - x')) from one vjp and one jvp, then summed.
AttributionResult ConductanceTotal(const Graph& graph, const PathSpec& path,
                                   const LayerCut& cut, int threads = 1);

// Conductance of one hidden unit split over the input variables.
AttributionResult ConductancePerVariable(const Graph& graph, const PathSpec& path,
                                         const UnitKey& unit, int threads = 1);

// ConductancePerVariable for every unit of `cut`, sharing the forward passes.
std::vector<AttributionResult> ConductancePerVariableForCut(const Graph& graph,
                                                            const PathSpec& path,
                                                            const LayerCut& cut,
                                                            int threads = 1);

// Path integral of dF/dy_j with no scaling terms.
AttributionResult InternalInfluence(const Graph& graph, const PathSpec& path,
                                    const LayerCut& cut, int threads = 1);

// y_j(x) from one forward pass.
AttributionResult ActivationScore(const Graph& graph, const std::vector<Tensor>& input,
                                  const LayerCut& cut);

// y_j(x) * dF/dy_j(x) at the input point only.
AttributionResult GradientTimesActivation(const Graph& graph, const std::vector<Tensor>& input,
                                          const LayerCut& cut);

// Conductance, internal influence, activation and gradient x activation for
// one input on a single shared alpha grid.
struct UnitAttributions {
  AttributionResult conductance;
  AttributionResult influence;
  AttributionResult activation;
  AttributionResult gradient_activation;

  const AttributionResult& Get(Method method) const;
};
UnitAttributions AttributeUnits(const Graph& graph, const PathSpec& path, const LayerCut& cut,
                                int threads = 1);

// Any of the unit-level methods by enum; kIntegratedGradients is rejected.
AttributionResult Attribute(Method method, const Graph& graph, const PathSpec& path,
                            const LayerCut& cut, int threads = 1);

struct CompletenessCheck {
  double attributed = 0.0;  // sum of scores
  double delta = 0.0;       // F(x) - F(x')
  double residual = 0.0;    // |attributed - delta|
  double relative = 0.0;    // residual / |delta| (residual itself when delta == 0)
};
CompletenessCheck CheckCompleteness(const Graph& graph, const PathSpec& path,
                                    const AttributionResult& result);

// Flat CSV "method,node,index,score" preceded by '#' metadata lines.
std::string AttributionToCsv(const AttributionResult& result, const Graph& graph);
std::string AttributionToJson(const AttributionResult& result, const Graph& graph);

}  // namespace conductance

#endif  // CONDUCTANCE_ATTRIBUTION_H_
