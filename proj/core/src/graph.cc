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

#include "conductance/graph.h"

#include <algorithm>
#include <array>
#include <utility>

#include "conductance/errors.h"

namespace conductance {
namespace {

struct OpInfo {
  OpType type;
  std::string_view name;
  int arity;  // -1: variadic (>= 1)
};

constexpr std::array<OpInfo, 18> kOps = {{
    {OpType::kInput, "input", 0},
    {OpType::kConstant, "constant", 0},
    {OpType::kMatMul, "matmul", 2},
    {OpType::kAdd, "add", 2},
    {OpType::kMul, "mul", 2},
    {OpType::kNeg, "neg", 1},
    {OpType::kRelu, "relu", 1},
    {OpType::kClampMax, "clamp_max", 1},
    {OpType::kMaxScalar, "max_scalar", 1},
    {OpType::kShiftRelu, "shift_relu", 1},
    {OpType::kConv1D, "conv1d", 2},
    {OpType::kMaxPoolGlobal, "maxpool_global", 1},
    {OpType::kEmbeddingLookup, "embedding_lookup", 2},
    {OpType::kConcat, "concat", -1},
    {OpType::kSigmoid, "sigmoid", 1},
    {OpType::kSoftmax, "softmax", 1},
    {OpType::kSelect, "select", 1},
    {OpType::kSoftmaxCrossEntropy, "softmax_xent", 2},
}};

const OpInfo& Info(OpType type) {
  for (const auto& info : kOps) {
    if (info.type == type) return info;
  }
  throw GraphError("unknown op type");
}

}  // namespace

std::string_view OpTypeName(OpType type) { return Info(type).name; }

OpType OpTypeFromName(std::string_view name) {
  for (const auto& info : kOps) {
    if (info.name == name) return info.type;
  }
  throw FormatError("unknown op kind '" + std::string(name) + "'");
}

bool OpKind::operator==(const OpKind& other) const {
  if (type != other.type || scalar != other.scalar || index != other.index ||
      width != other.width || channels != other.channels ||
      trainable != other.trainable) {
    return false;
  }
  if (!value || !other.value) return !value && !other.value;
  return *value == *other.value;
}

const Node& Graph::node(NodeId id) const {
  if (!Contains(id)) throw GraphError("node " + std::to_string(id) + " not in graph");
  return nodes_[id];
}

std::optional<NodeId> Graph::FindNode(std::string_view name) const {
  for (const Node& n : nodes_) {
    if (!n.name.empty() && n.name == name) return n.id;
  }
  return std::nullopt;
}

NodeId Graph::NodeByName(std::string_view name) const {
  auto id = FindNode(name);
  if (!id) throw GraphError("no node named '" + std::string(name) + "'");
  return *id;
}

std::vector<bool> Graph::AncestorsOf(NodeId target) const {
  std::vector<bool> mark(nodes_.size(), false);
  mark[node(target).id] = true;
  for (NodeId id = target; id >= 0; --id) {
    if (!mark[id]) continue;
    for (NodeId in : nodes_[id].inputs) mark[in] = true;
  }
  return mark;
}

std::vector<bool> Graph::DescendantsOfInputs() const {
  std::vector<bool> mark(nodes_.size(), false);
  for (NodeId in : inputs_) mark[in] = true;
  for (const Node& n : nodes_) {
    for (NodeId in : n.inputs) {
      if (mark[in]) {
        mark[n.id] = true;
        break;
      }
    }
  }
  return mark;
}

Graph Graph::WithSelectOutput(NodeId source, int64_t index) const {
  const Node& src = node(source);
  if (index < 0 || index >= NumElements(src.shape)) {
    throw GraphError("select index " + std::to_string(index) + " out of range for node '" +
                     src.name + "'");
  }
  Graph out = *this;
  Node& last = out.nodes_.back();
  if (last.id == output_ && last.op.type == OpType::kSelect && last.id != source) {
    last.inputs = {source};
    last.op.index = index;
    return out;
  }
  Node sel;
  sel.id = out.num_nodes();
  sel.op.type = OpType::kSelect;
  sel.op.index = index;
  sel.inputs = {source};
  sel.shape = {1};
  out.nodes_.push_back(std::move(sel));
  out.output_ = out.nodes_.back().id;
  return out;
}

Graph Graph::WithConstants(const std::map<std::string, Tensor>& values) const {
  Graph out = *this;
  for (const auto& [name, value] : values) {
    Node& n = out.nodes_[node(NodeByName(name)).id];
    if (n.op.type != OpType::kConstant) {
      throw GraphError("node '" + name + "' is not a constant");
    }
    if (n.shape != value.shape()) {
      throw ShapeError("constant '" + name + "' expects shape " + ShapeToString(n.shape) +
                       ", got " + ShapeToString(value.shape()));
    }
    n.op.value = std::make_shared<const Tensor>(value);
  }
  return out;
}

Graph Graph::WithAblation(NodeId id, const std::vector<int64_t>& indices) const {
  Graph out = *this;
  Node& n = out.nodes_[node(id).id];
  const int64_t size = NumElements(n.shape);
  for (int64_t i : indices) {
    if (i < 0 || i >= size) {
      throw GraphError("ablation index " + std::to_string(i) + " out of range for node " +
                       std::to_string(id));
    }
    n.ablated.push_back(i);
  }
  std::sort(n.ablated.begin(), n.ablated.end());
  n.ablated.erase(std::unique(n.ablated.begin(), n.ablated.end()), n.ablated.end());
  return out;
}

std::map<std::string, Tensor> Graph::TrainableConstants() const {
  std::map<std::string, Tensor> out;
  for (const Node& n : nodes_) {
    if (n.op.type == OpType::kConstant && n.op.trainable) out.emplace(n.name, *n.op.value);
  }
  return out;
}

// ---------------------------------------------------------------------------

NodeId GraphBuilder::Input(std::string name, Shape shape) {
  return AddNode(OpKind{.type = OpType::kInput}, {}, std::move(name), std::move(shape));
}

NodeId GraphBuilder::Constant(std::string name, Tensor value, bool trainable) {
  OpKind op{.type = OpType::kConstant, .trainable = trainable};
  op.value = std::make_shared<const Tensor>(std::move(value));
  return AddNode(std::move(op), {}, std::move(name));
}

NodeId GraphBuilder::MatMul(NodeId a, NodeId b, std::string name) {
  return AddNode({.type = OpType::kMatMul}, {a, b}, std::move(name));
}
NodeId GraphBuilder::Add(NodeId a, NodeId b, std::string name) {
  return AddNode({.type = OpType::kAdd}, {a, b}, std::move(name));
}
NodeId GraphBuilder::Mul(NodeId a, NodeId b, std::string name) {
  return AddNode({.type = OpType::kMul}, {a, b}, std::move(name));
}
NodeId GraphBuilder::Neg(NodeId a, std::string name) {
  return AddNode({.type = OpType::kNeg}, {a}, std::move(name));
}
NodeId GraphBuilder::Relu(NodeId a, std::string name) {
  return AddNode({.type = OpType::kRelu}, {a}, std::move(name));
}
NodeId GraphBuilder::ClampMax(NodeId a, double c, std::string name) {
  return AddNode({.type = OpType::kClampMax, .scalar = c}, {a}, std::move(name));
}
NodeId GraphBuilder::MaxScalar(NodeId a, double c, std::string name) {
  return AddNode({.type = OpType::kMaxScalar, .scalar = c}, {a}, std::move(name));
}
NodeId GraphBuilder::ShiftRelu(NodeId a, double b, std::string name) {
  return AddNode({.type = OpType::kShiftRelu, .scalar = b}, {a}, std::move(name));
}
NodeId GraphBuilder::Conv1D(NodeId x, NodeId w, std::string name) {
  const Shape& ws = shape(w);
  if (ws.size() != 3) throw ShapeError("conv1d '" + name + "': weight must be rank 3");
  return AddNode({.type = OpType::kConv1D, .width = ws[0], .channels = ws[2]}, {x, w},
                 std::move(name));
}
NodeId GraphBuilder::MaxPoolGlobal(NodeId a, std::string name) {
  return AddNode({.type = OpType::kMaxPoolGlobal}, {a}, std::move(name));
}
NodeId GraphBuilder::EmbeddingLookup(NodeId ids, NodeId table, std::string name) {
  return AddNode({.type = OpType::kEmbeddingLookup}, {ids, table}, std::move(name));
}
NodeId GraphBuilder::Concat(const std::vector<NodeId>& parts, std::string name) {
  return AddNode({.type = OpType::kConcat}, parts, std::move(name));
}
NodeId GraphBuilder::Sigmoid(NodeId a, std::string name) {
  return AddNode({.type = OpType::kSigmoid}, {a}, std::move(name));
}
NodeId GraphBuilder::Softmax(NodeId a, std::string name) {
  return AddNode({.type = OpType::kSoftmax}, {a}, std::move(name));
}
NodeId GraphBuilder::Select(NodeId a, int64_t index, std::string name) {
  return AddNode({.type = OpType::kSelect, .index = index}, {a}, std::move(name));
}
NodeId GraphBuilder::SoftmaxCrossEntropy(NodeId logits, NodeId target, std::string name) {
  return AddNode({.type = OpType::kSoftmaxCrossEntropy}, {logits, target}, std::move(name));
}

const Shape& GraphBuilder::shape(NodeId id) const { return graph_.node(id).shape; }

void GraphBuilder::SetAblated(NodeId id, std::vector<int64_t> indices) {
  graph_ = graph_.WithAblation(id, indices);
}

Shape GraphBuilder::InferShape(const OpKind& op, const std::vector<NodeId>& inputs,
                               const std::string& label) const {
  auto fail = [&](const std::string& what) -> ShapeError {
    return ShapeError(std::string(OpTypeName(op.type)) + " node " + label + ": " + what);
  };
  auto in = [&](size_t i) -> const Shape& { return graph_.nodes_[inputs[i]].shape; };
  auto same = [&]() {
    if (in(0) != in(1)) {
      throw fail("operand shapes " + ShapeToString(in(0)) + " and " + ShapeToString(in(1)) +
                 " differ");
    }
    return in(0);
  };

  switch (op.type) {
    case OpType::kInput:
      throw fail("input nodes need a declared shape");
    case OpType::kConstant:
      if (!op.value) throw fail("constant without payload");
      return op.value->shape();
    case OpType::kMatMul: {
      const Shape& a = in(0);
      const Shape& b = in(1);
      if (b.size() != 2) throw fail("right operand must be rank 2, got " + ShapeToString(b));
      if (a.size() == 1 && a[0] == b[0]) return {b[1]};
      if (a.size() == 2 && a[1] == b[0]) return {a[0], b[1]};
      throw fail("cannot multiply " + ShapeToString(a) + " by " + ShapeToString(b));
    }
    case OpType::kAdd: {
      const Shape& a = in(0);
      const Shape& b = in(1);
      if (a == b) return a;
      if (b.size() == 1 && !a.empty() && a.back() == b[0]) return a;  // bias add
      throw fail("cannot add " + ShapeToString(a) + " and " + ShapeToString(b));
    }
    case OpType::kMul:
      return same();
    case OpType::kNeg:
    case OpType::kRelu:
    case OpType::kClampMax:
    case OpType::kMaxScalar:
    case OpType::kShiftRelu:
    case OpType::kSigmoid:
      return in(0);
    case OpType::kConv1D: {
      const Shape& x = in(0);
      const Shape& w = in(1);
      if (x.size() != 2) throw fail("input must be [T, D], got " + ShapeToString(x));
      if (w.size() != 3 || w[1] != x[1]) {
        throw fail("weight " + ShapeToString(w) + " incompatible with input " +
                   ShapeToString(x));
      }
      if (op.width != w[0] || op.channels != w[2] || op.width < 1) {
        throw fail("width/channels parameters disagree with weight " + ShapeToString(w));
      }
      if (x[0] < op.width) {
        throw fail("sequence length " + std::to_string(x[0]) + " shorter than window " +
                   std::to_string(op.width));
      }
      return {x[0] - op.width + 1, op.channels};
    }
    case OpType::kMaxPoolGlobal:
      if (in(0).size() != 2 || in(0)[0] < 1) throw fail("expects [T, C] with T >= 1");
      return {in(0)[1]};
    case OpType::kEmbeddingLookup:
      if (in(0).size() != 1) throw fail("ids must be rank 1");
      if (in(1).size() != 2) throw fail("table must be [V, D]");
      return {in(0)[0], in(1)[1]};
    case OpType::kConcat: {
      int64_t total = 0;
      for (size_t i = 0; i < inputs.size(); ++i) {
        if (in(i).size() != 1) throw fail("parts must be rank 1");
        total += in(i)[0];
      }
      return {total};
    }
    case OpType::kSoftmax:
      if (in(0).size() != 1) throw fail("expects rank 1");
      return in(0);
    case OpType::kSelect:
      if (op.index < 0 || op.index >= NumElements(in(0))) {
        throw fail("index " + std::to_string(op.index) + " out of range");
      }
      return {1};
    case OpType::kSoftmaxCrossEntropy:
      if (in(0).size() != 1) throw fail("logits must be rank 1");
      same();
      return {1};
  }
  throw fail("unhandled op");
}

NodeId GraphBuilder::AddNode(OpKind op, std::vector<NodeId> inputs, std::string name,
                             std::optional<Shape> declared_shape) {
  const NodeId id = graph_.num_nodes();
  const std::string label = name.empty() ? "#" + std::to_string(id) : "'" + name + "'";
  const OpInfo& info = Info(op.type);
  if (info.arity >= 0 && static_cast<int>(inputs.size()) != info.arity) {
    throw GraphError(std::string(info.name) + " node " + label + " expects " +
                     std::to_string(info.arity) + " inputs, got " +
                     std::to_string(inputs.size()));
  }
  if (info.arity < 0 && inputs.empty()) {
    throw GraphError(std::string(info.name) + " node " + label + " needs at least one input");
  }
  for (NodeId in : inputs) {
    if (in < 0 || in >= id) {
      throw GraphError("node " + label + " references unknown or later node " +
                       std::to_string(in));
    }
  }
  if (!name.empty() && graph_.FindNode(name)) {
    throw GraphError("duplicate node name '" + name + "'");
  }

  Shape shape;
  if (op.type == OpType::kInput) {
    if (!declared_shape) throw ShapeError("input node " + label + " needs a shape");
    NumElements(*declared_shape);
    shape = *declared_shape;
  } else {
    shape = InferShape(op, inputs, label);
    if (declared_shape && *declared_shape != shape) {
      throw ShapeError("node " + label + " declares shape " + ShapeToString(*declared_shape) +
                       " but infers " + ShapeToString(shape));
    }
  }

  Node node{.id = id, .op = std::move(op), .inputs = std::move(inputs),
            .shape = std::move(shape), .name = std::move(name), .ablated = {}};
  if (node.op.type == OpType::kInput) graph_.inputs_.push_back(id);
  graph_.nodes_.push_back(std::move(node));
  return id;
}

Graph GraphBuilder::Build(NodeId output) && {
  const Node& out = graph_.node(output);
  if (out.shape != Shape{1}) {
    throw GraphError("output node must have shape [1], got " + ShapeToString(out.shape));
  }
  graph_.output_ = output;
  return std::move(graph_);
}

}  // namespace conductance
