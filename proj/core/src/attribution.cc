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

#include "conductance/attribution.h"

#include <cmath>
#include <utility>

#include <nlohmann/json.hpp>

#include "conductance/autodiff.h"
#include "conductance/errors.h"
#include "conductance/format.h"
#include "conductance/parallel.h"

namespace conductance {
namespace {

// Compensated (Neumaier) running sum.
class CompensatedSum {
 public:
  void Add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::vector<double> Flatten(std::span<const Tensor> tensors) {
  std::vector<double> out;
  for (const Tensor& t : tensors) out.insert(out.end(), t.data().begin(), t.data().end());
  return out;
}

void ValidateUnits(const Graph& graph, const std::vector<UnitKey>& units) {
  const auto upstream = graph.AncestorsOf(graph.output());
  for (const UnitKey& u : units) {
    const Node& n = graph.node(u.node);
    if (n.op.type == OpType::kInput || n.op.type == OpType::kConstant ||
        u.node == graph.output()) {
      throw GraphError("unit on node " + std::to_string(u.node) + " is not a hidden unit");
    }
    if (!upstream[u.node]) {
      throw GraphError("unit on node " + std::to_string(u.node) +
                       " does not feed the output");
    }
    if (u.index < 0 || u.index >= NumElements(n.shape)) {
      throw GraphError("unit index " + std::to_string(u.index) + " out of range on node " +
                       std::to_string(u.node));
    }
  }
}

struct StepRequest {
  bool input_gradient = false;
  bool unit_tangent = false;
  std::vector<UnitKey> units;           // dF/dy (and tangent) collected here
  std::vector<UnitKey> per_variable;    // dF/dy_j * dy_j/dx_i collected here
};

StepRequest InputGradientRequest() {
  StepRequest r;
  r.input_gradient = true;
  return r;
}

StepRequest UnitRequest(std::vector<UnitKey> units, bool tangent) {
  StepRequest r;
  r.unit_tangent = tangent;
  r.units = std::move(units);
  return r;
}

StepRequest PerVariableRequest(std::vector<UnitKey> units) {
  StepRequest r;
  r.per_variable = std::move(units);
  return r;
}

// Integrals (already divided by m) of every requested per-step quantity.
struct PathIntegrals {
  std::vector<double> input_gradient;           // int dF/dx_i
  std::vector<double> unit_gradient;            // int dF/dy_j
  std::vector<double> unit_flow;                // int dF/dy_j * (dy_j/dx . d)
  std::vector<std::vector<double>> per_variable;  // int dF/dy_j * dy_j/dx_i
};

PathIntegrals IntegratePath(const Graph& graph, const PathSpec& path, const StepRequest& req,
                            int threads) {
  const std::vector<double> alphas = path.Alphas();
  const std::vector<double> coefs = path.Coefficients();
  const std::vector<Tensor> direction = path.Difference();
  const auto steps = static_cast<int64_t>(alphas.size());

  // Per-step terms laid out as one flat vector per step so the reduction
  // below runs over a fixed order.
  size_t n_inputs = 0;
  for (const Tensor& t : path.input()) n_inputs += t.size();
  const size_t n_units = req.units.size();
  const size_t n_pv = req.per_variable.size();
  const size_t width = (req.input_gradient ? n_inputs : 0) + n_units +
                       (req.unit_tangent ? n_units : 0) + n_pv * n_inputs;
  std::vector<std::vector<double>> terms(steps);

  ParallelFor(steps, threads, [&](int64_t k) {
    std::vector<double>& row = terms[k];
    row.reserve(width);
    const std::vector<Tensor> point = path.PointAt(alphas[k]);
    const ForwardTrace trace = Forward(graph, point);
    const std::vector<Tensor> cot = Vjp(graph, trace, graph.output());
    if (req.input_gradient) {
      for (NodeId in : graph.inputs()) {
        row.insert(row.end(), cot[in].data().begin(), cot[in].data().end());
      }
    }
    for (const UnitKey& u : req.units) row.push_back(cot[u.node][u.index]);
    if (req.unit_tangent) {
      const std::vector<Tensor> tan = Jvp(graph, trace, direction);
      for (const UnitKey& u : req.units) {
        row.push_back(cot[u.node][u.index] * tan[u.node][u.index]);
      }
    }
    for (const UnitKey& u : req.per_variable) {
      const double upstream = cot[u.node][u.index];
      Tensor seed(graph.node(u.node).shape);
      seed[u.index] = 1.0;
      const std::vector<Tensor> local = Vjp(graph, trace, u.node, seed);
      for (NodeId in : graph.inputs()) {
        for (double v : local[in].data()) row.push_back(upstream * v);
      }
    }
  });

  std::vector<CompensatedSum> acc(width);
  for (int64_t k = 0; k < steps; ++k) {
    for (size_t j = 0; j < width; ++j) acc[j].Add(coefs[k] * terms[k][j]);
  }
  const double m = path.steps();
  size_t pos = 0;
  auto take = [&](size_t count) {
    std::vector<double> out(count);
    for (size_t j = 0; j < count; ++j) out[j] = acc[pos++].value() / m;
    return out;
  };
  PathIntegrals out;
  if (req.input_gradient) out.input_gradient = take(n_inputs);
  out.unit_gradient = take(n_units);
  if (req.unit_tangent) out.unit_flow = take(n_units);
  for (size_t j = 0; j < n_pv; ++j) out.per_variable.push_back(take(n_inputs));
  return out;
}

PathMetadata MetadataOf(const PathSpec& path) {
  return {path.steps(), path.rule(), path.BaselineHash()};
}

}  // namespace

std::string_view RuleName(QuadratureRule rule) {
  switch (rule) {
    case QuadratureRule::kMidpoint:
      return "midpoint";
    case QuadratureRule::kTrapezoid:
      return "trapezoid";
    case QuadratureRule::kLeft:
      return "left";
  }
  return "?";
}

QuadratureRule ParseRule(std::string_view name) {
  if (name == "midpoint") return QuadratureRule::kMidpoint;
  if (name == "trapezoid") return QuadratureRule::kTrapezoid;
  if (name == "left") return QuadratureRule::kLeft;
  throw ValidationError("unknown quadrature rule '" + std::string(name) + "'");
}

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kIntegratedGradients:
      return "ig";
    case Method::kConductance:
      return "conductance";
    case Method::kInternalInfluence:
      return "influence";
    case Method::kActivation:
      return "activation";
    case Method::kGradientTimesActivation:
      return "gradact";
  }
  return "?";
}

Method ParseMethod(std::string_view name) {
  for (Method m : {Method::kIntegratedGradients, Method::kConductance,
                   Method::kInternalInfluence, Method::kActivation,
                   Method::kGradientTimesActivation}) {
    if (MethodName(m) == name) return m;
  }
  throw ValidationError("unknown method '" + std::string(name) + "'");
}

PathSpec::PathSpec(std::vector<Tensor> baseline, std::vector<Tensor> input, int steps,
                   QuadratureRule rule)
    : baseline_(std::move(baseline)), input_(std::move(input)), steps_(steps), rule_(rule) {
  if (steps_ < 1) throw ValidationError("path needs at least one step, got " +
                                        std::to_string(steps_));
  if (baseline_.size() != input_.size()) {
    throw ValidationError("baseline has " + std::to_string(baseline_.size()) +
                          " tensors, input has " + std::to_string(input_.size()));
  }
  for (size_t i = 0; i < input_.size(); ++i) {
    if (baseline_[i].shape() != input_[i].shape()) {
      throw ValidationError("baseline shape " + ShapeToString(baseline_[i].shape()) +
                            " differs from input shape " + ShapeToString(input_[i].shape()));
    }
  }
}

PathSpec PathSpec::FromZero(std::vector<Tensor> input, int steps, QuadratureRule rule) {
  std::vector<Tensor> zeros;
  for (const Tensor& t : input) zeros.emplace_back(t.shape());
  return PathSpec(std::move(zeros), std::move(input), steps, rule);
}

std::vector<double> PathSpec::Alphas() const {
  std::vector<double> out;
  const double m = steps_;
  switch (rule_) {
    case QuadratureRule::kMidpoint:
      for (int k = 0; k < steps_; ++k) out.push_back((k + 0.5) / m);
      break;
    case QuadratureRule::kLeft:
      for (int k = 0; k < steps_; ++k) out.push_back(k / m);
      break;
    case QuadratureRule::kTrapezoid:
      for (int k = 0; k <= steps_; ++k) out.push_back(k / m);
      break;
  }
  return out;
}

std::vector<double> PathSpec::Coefficients() const {
  if (rule_ != QuadratureRule::kTrapezoid) return std::vector<double>(steps_, 1.0);
  std::vector<double> out(steps_ + 1, 1.0);
  out.front() = 0.5;
  out.back() = 0.5;
  return out;
}

std::vector<Tensor> PathSpec::PointAt(double alpha) const {
  std::vector<Tensor> out;
  out.reserve(input_.size());
  for (size_t i = 0; i < input_.size(); ++i) {
    Tensor p(input_[i].shape());
    for (int64_t j = 0; j < p.size(); ++j) {
      p[j] = baseline_[i][j] + alpha * (input_[i][j] - baseline_[i][j]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Tensor> PathSpec::Difference() const {
  std::vector<Tensor> out;
  for (size_t i = 0; i < input_.size(); ++i) out.push_back(Subtract(input_[i], baseline_[i]));
  return out;
}

uint64_t PathSpec::BaselineHash() const { return HashTensors(baseline_); }

double AttributionResult::Score(const UnitKey& unit) const {
  auto it = unit_scores.find(unit);
  if (it == unit_scores.end()) {
    throw GraphError("no score for node " + std::to_string(unit.node) + " index " +
                     std::to_string(unit.index));
  }
  return it->second;
}

double AttributionResult::Sum() const {
  CompensatedSum s;
  if (!unit_scores.empty()) {
    for (const auto& [unit, score] : unit_scores) s.Add(score);
  } else if (per_variable) {
    for (double v : *per_variable) s.Add(v);
  }
  return s.value();
}

AttributionResult IntegratedGradients(const Graph& graph, const PathSpec& path, int threads) {
  const PathIntegrals ints = IntegratePath(graph, path, InputGradientRequest(), threads);
  const std::vector<double> diff = Flatten(path.Difference());
  std::vector<double> scores(diff.size());
  for (size_t i = 0; i < diff.size(); ++i) scores[i] = diff[i] * ints.input_gradient[i];
  AttributionResult r;
  r.method = Method::kIntegratedGradients;
  r.target = graph.output();
  r.per_variable = std::move(scores);
  r.path = MetadataOf(path);
  return r;
}

AttributionResult ConductanceTotal(const Graph& graph, const PathSpec& path,
                                   const LayerCut& cut, int threads) {
  return AttributeUnits(graph, path, cut, threads).conductance;
}

std::vector<AttributionResult> ConductancePerVariableForCut(const Graph& graph,
                                                            const PathSpec& path,
                                                            const LayerCut& cut,
                                                            int threads) {
  const std::vector<UnitKey> units = cut.Units();
  ValidateUnits(graph, units);
  const PathIntegrals ints = IntegratePath(graph, path, PerVariableRequest(units), threads);
  const std::vector<double> diff = Flatten(path.Difference());
  std::vector<AttributionResult> out;
  for (size_t j = 0; j < units.size(); ++j) {
    std::vector<double> scores(diff.size());
    CompensatedSum total;
    for (size_t i = 0; i < diff.size(); ++i) {
      scores[i] = diff[i] * ints.per_variable[j][i];
      total.Add(scores[i]);
    }
    AttributionResult r;
    r.method = Method::kConductance;
    r.target = graph.output();
    r.unit_scores[units[j]] = total.value();
    r.per_variable = std::move(scores);
    r.path = MetadataOf(path);
    out.push_back(std::move(r));
  }
  return out;
}

AttributionResult ConductancePerVariable(const Graph& graph, const PathSpec& path,
                                         const UnitKey& unit, int threads) {
  LayerCut single = LayerCut::Create(graph, "unit", {{unit.node, unit.index, unit.index + 1}});
  return std::move(ConductancePerVariableForCut(graph, path, single, threads).front());
}

AttributionResult InternalInfluence(const Graph& graph, const PathSpec& path,
                                    const LayerCut& cut, int threads) {
  const std::vector<UnitKey> units = cut.Units();
  ValidateUnits(graph, units);
  const PathIntegrals ints = IntegratePath(graph, path, UnitRequest(units, false), threads);
  AttributionResult r;
  r.method = Method::kInternalInfluence;
  r.target = graph.output();
  for (size_t j = 0; j < units.size(); ++j) r.unit_scores[units[j]] = ints.unit_gradient[j];
  r.path = MetadataOf(path);
  return r;
}

AttributionResult ActivationScore(const Graph& graph, const std::vector<Tensor>& input,
                                  const LayerCut& cut) {
  const std::vector<UnitKey> units = cut.Units();
  ValidateUnits(graph, units);
  const ForwardTrace trace = Forward(graph, input);
  AttributionResult r;
  r.method = Method::kActivation;
  r.target = graph.output();
  for (const UnitKey& u : units) r.unit_scores[u] = trace.at(u.node)[u.index];
  return r;
}

AttributionResult GradientTimesActivation(const Graph& graph, const std::vector<Tensor>& input,
                                          const LayerCut& cut) {
  const std::vector<UnitKey> units = cut.Units();
  ValidateUnits(graph, units);
  const ForwardTrace trace = Forward(graph, input);
  const std::vector<Tensor> cot = Vjp(graph, trace, graph.output());
  AttributionResult r;
  r.method = Method::kGradientTimesActivation;
  r.target = graph.output();
  for (const UnitKey& u : units) {
    r.unit_scores[u] = trace.at(u.node)[u.index] * cot[u.node][u.index];
  }
  return r;
}

const AttributionResult& UnitAttributions::Get(Method method) const {
  switch (method) {
    case Method::kConductance:
      return conductance;
    case Method::kInternalInfluence:
      return influence;
    case Method::kActivation:
      return activation;
    case Method::kGradientTimesActivation:
      return gradient_activation;
    case Method::kIntegratedGradients:
      break;
  }
  throw ValidationError("integrated gradients scores inputs, not hidden units");
}

UnitAttributions AttributeUnits(const Graph& graph, const PathSpec& path, const LayerCut& cut,
                                int threads) {
  const std::vector<UnitKey> units = cut.Units();
  ValidateUnits(graph, units);
  const PathIntegrals ints =
      IntegratePath(graph, path, UnitRequest(units, true), threads);
  UnitAttributions out;
  out.conductance.method = Method::kConductance;
  out.influence.method = Method::kInternalInfluence;
  out.conductance.target = out.influence.target = graph.output();
  out.conductance.path = out.influence.path = MetadataOf(path);
  for (size_t j = 0; j < units.size(); ++j) {
    out.conductance.unit_scores[units[j]] = ints.unit_flow[j];
    out.influence.unit_scores[units[j]] = ints.unit_gradient[j];
  }
  out.activation = ActivationScore(graph, path.input(), cut);
  out.gradient_activation = GradientTimesActivation(graph, path.input(), cut);
  return out;
}

AttributionResult Attribute(Method method, const Graph& graph, const PathSpec& path,
                            const LayerCut& cut, int threads) {
  switch (method) {
    case Method::kConductance:
      return ConductanceTotal(graph, path, cut, threads);
    case Method::kInternalInfluence:
      return InternalInfluence(graph, path, cut, threads);
    case Method::kActivation:
      return ActivationScore(graph, path.input(), cut);
    case Method::kGradientTimesActivation:
      return GradientTimesActivation(graph, path.input(), cut);
    case Method::kIntegratedGradients:
      break;
  }
  throw ValidationError("integrated gradients scores inputs, not hidden units");
}

CompletenessCheck CheckCompleteness(const Graph& graph, const PathSpec& path,
                                    const AttributionResult& result) {
  CompletenessCheck c;
  c.attributed = result.Sum();
  c.delta = Forward(graph, path.input()).output(graph) -
            Forward(graph, path.baseline()).output(graph);
  c.residual = std::abs(c.attributed - c.delta);
  c.relative = c.delta != 0.0 ? c.residual / std::abs(c.delta) : c.residual;
  return c;
}

namespace {

std::string NodeLabel(const Graph& graph, NodeId id) {
  const Node& n = graph.node(id);
  return n.name.empty() ? std::to_string(id) : n.name;
}

}  // namespace

std::string AttributionToCsv(const AttributionResult& result, const Graph& graph) {
  std::string out;
  out += "# method=" + std::string(MethodName(result.method)) + "\n";
  out += "# target=" + NodeLabel(graph, result.target) + "\n";
  if (result.path) {
    out += "# steps=" + std::to_string(result.path->steps) + "\n";
    out += "# rule=" + std::string(RuleName(result.path->rule)) + "\n";
    out += "# baseline_hash=" + HexU64(result.path->baseline_hash) + "\n";
  }
  out += "method,node,index,score\n";
  const std::string method(MethodName(result.method));
  for (const auto& [unit, score] : result.unit_scores) {
    out += method + "," + NodeLabel(graph, unit.node) + "," + std::to_string(unit.index) + "," +
           FormatDouble(score) + "\n";
  }
  if (result.per_variable && result.unit_scores.empty()) {
    for (size_t i = 0; i < result.per_variable->size(); ++i) {
      out += method + ",input," + std::to_string(i) + "," +
             FormatDouble((*result.per_variable)[i]) + "\n";
    }
  }
  return out;
}

std::string AttributionToJson(const AttributionResult& result, const Graph& graph) {
  nlohmann::ordered_json doc;
  doc["method"] = MethodName(result.method);
  doc["target"] = NodeLabel(graph, result.target);
  if (result.path) {
    doc["path"] = {{"steps", result.path->steps},
                   {"rule", RuleName(result.path->rule)},
                   {"baseline_hash", HexU64(result.path->baseline_hash)}};
  }
  auto scores = nlohmann::ordered_json::array();
  for (const auto& [unit, score] : result.unit_scores) {
    scores.push_back({{"node", NodeLabel(graph, unit.node)},
                      {"node_id", unit.node},
                      {"index", unit.index},
                      {"score", score}});
  }
  doc["scores"] = std::move(scores);
  if (result.per_variable) doc["per_variable"] = *result.per_variable;
  return doc.dump(2) + "\n";
}

}  // namespace conductance
