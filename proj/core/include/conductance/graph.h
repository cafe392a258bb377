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

#ifndef CONDUCTANCE_GRAPH_H_
#define CONDUCTANCE_GRAPH_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conductance/tensor.h"

namespace conductance {

using NodeId = int32_t;

enum class OpType {
  kInput,
  kConstant,
  kMatMul,
  kAdd,
  kMul,
  kNeg,
  kRelu,
  kClampMax,    // min(x, c)
  kMaxScalar,   // max(x, c)
  kShiftRelu,   // max(x - b, 0)
  kConv1D,
  kMaxPoolGlobal,
  kEmbeddingLookup,
  kConcat,
  kSigmoid,
  kSoftmax,
  kSelect,
  kSoftmaxCrossEntropy,  // training head only
};

std::string_view OpTypeName(OpType type);
// Throws FormatError for unknown names.
OpType OpTypeFromName(std::string_view name);

// Operation kind plus its static parameters. Only the fields relevant to
// `type` are meaningful.
struct OpKind {
  OpType type = OpType::kInput;
  double scalar = 0.0;    // ClampMax / MaxScalar / ShiftRelu threshold
  int64_t index = 0;      // Select
  int64_t width = 0;      // Conv1D window
  int64_t channels = 0;   // Conv1D output channels
  std::shared_ptr<const Tensor> value;  // Constant payload
  bool trainable = false;               // Constant only

  bool operator==(const OpKind& other) const;
};

struct Node {
  NodeId id = 0;
  OpKind op;
  std::vector<NodeId> inputs;
  Shape shape;
  std::string name;
  // Sorted flat indices whose value is forced to 0 (ablation).
  std::vector<int64_t> ablated;

  bool operator==(const Node& other) const = default;
};

// Immutable DAG. Nodes are stored in topological order and node ids equal
// their position, so every edge points from a smaller id to a larger one.
// The output node always has shape [1].
class Graph {
 public:
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const;
  int32_t num_nodes() const { return static_cast<int32_t>(nodes_.size()); }
  const std::vector<NodeId>& inputs() const { return inputs_; }
  NodeId output() const { return output_; }

  bool Contains(NodeId id) const { return id >= 0 && id < num_nodes(); }
  std::optional<NodeId> FindNode(std::string_view name) const;
  // Throws GraphError when absent.
  NodeId NodeByName(std::string_view name) const;

  // ancestors[i] is true iff node i has a path to `target` (target included).
  std::vector<bool> AncestorsOf(NodeId target) const;
  // Nodes reachable from any input (inputs included).
  std::vector<bool> DescendantsOfInputs() const;

  // Copy whose output is element `index` of node `source`. Replaces a trailing
  // Select output rather than stacking a second one.
  Graph WithSelectOutput(NodeId source, int64_t index) const;

  // Copy with the named constants' payloads replaced (shapes must match).
  Graph WithConstants(const std::map<std::string, Tensor>& values) const;

  // Copy where the listed flat elements of `id` are forced to 0. Existing
  // ablations on the node are kept.
  Graph WithAblation(NodeId id, const std::vector<int64_t>& indices) const;

  // Named trainable constants and their current payloads.
  std::map<std::string, Tensor> TrainableConstants() const;

  bool operator==(const Graph& other) const = default;

 private:
  friend class GraphBuilder;
  std::vector<Node> nodes_;
  std::vector<NodeId> inputs_;
  NodeId output_ = -1;
};

// Builds a Graph one node at a time, running shape inference on every add.
// Errors name the offending node.
class GraphBuilder {
 public:
  NodeId Input(std::string name, Shape shape);
  NodeId Constant(std::string name, Tensor value, bool trainable = false);
  NodeId MatMul(NodeId a, NodeId b, std::string name = {});
  NodeId Add(NodeId a, NodeId b, std::string name = {});
  NodeId Mul(NodeId a, NodeId b, std::string name = {});
  NodeId Neg(NodeId a, std::string name = {});
  NodeId Relu(NodeId a, std::string name = {});
  NodeId ClampMax(NodeId a, double c, std::string name = {});
  NodeId MaxScalar(NodeId a, double c, std::string name = {});
  NodeId ShiftRelu(NodeId a, double b, std::string name = {});
  // x: [T, D], w: [width, D, channels] -> [T - width + 1, channels].
  NodeId Conv1D(NodeId x, NodeId w, std::string name = {});
  // [T, C] -> [C].
  NodeId MaxPoolGlobal(NodeId a, std::string name = {});
  // ids: [T] integral values, table: [V, D] -> [T, D].
  NodeId EmbeddingLookup(NodeId ids, NodeId table, std::string name = {});
  NodeId Concat(const std::vector<NodeId>& parts, std::string name = {});
  NodeId Sigmoid(NodeId a, std::string name = {});
  NodeId Softmax(NodeId a, std::string name = {});
  NodeId Select(NodeId a, int64_t index, std::string name = {});
  // logits: [C], target distribution: [C] -> [1].
  NodeId SoftmaxCrossEntropy(NodeId logits, NodeId target, std::string name = {});

  // Generic entry point used by the helpers above and by the loader.
  NodeId AddNode(OpKind op, std::vector<NodeId> inputs, std::string name,
                 std::optional<Shape> declared_shape = std::nullopt);

  const Shape& shape(NodeId id) const;
  void SetAblated(NodeId id, std::vector<int64_t> indices);

  // Throws GraphError unless `output` exists and has shape [1].
  Graph Build(NodeId output) &&;

 private:
  Shape InferShape(const OpKind& op, const std::vector<NodeId>& inputs,
                   const std::string& label) const;
  Graph graph_;
};

}  // namespace conductance

#endif  // CONDUCTANCE_GRAPH_H_
