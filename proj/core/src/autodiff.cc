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

#include "conductance/autodiff.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "conductance/errors.h"

namespace conductance {
namespace {

std::string Label(const Node& n) {
  return n.name.empty() ? "#" + std::to_string(n.id) : "'" + n.name + "'";
}

void ApplyMask(const Node& n, Tensor& t) {
  for (int64_t i : n.ablated) t[i] = 0.0;
}

// Index of the first maximum of column c of a [T, C] tensor.
int64_t ArgMaxColumn(const Tensor& x, int64_t c) {
  const int64_t rows = x.dim(0);
  int64_t best = 0;
  for (int64_t t = 1; t < rows; ++t) {
    if (x.at(t, c) > x.at(best, c)) best = t;
  }
  return best;
}

int64_t TokenId(double raw, int64_t vocab, const Node& n) {
  const double rounded = std::nearbyint(raw);
  if (rounded != raw || rounded < 0 || rounded >= static_cast<double>(vocab)) {
    throw ShapeError("embedding_lookup node " + Label(n) + ": invalid token id " +
                     std::to_string(raw));
  }
  return static_cast<int64_t>(rounded);
}

// out = a * b for a [m, k] (or [k] as m = 1) and b [k, n].
void MatMulInto(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate) {
  const int64_t k = b.dim(0);
  const int64_t n = b.dim(1);
  const int64_t m = a.size() / k;
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (int64_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
      if (accumulate) {
        out[i * n + j] += s;
      } else {
        out[i * n + j] = s;
      }
    }
  }
}

// out[t, c] (+)= sum_{w, d} x[t + w, d] * k[w, d, c].
void ConvInto(const Tensor& x, const Tensor& kernel, Tensor& out, bool accumulate) {
  const int64_t dim = x.dim(1);
  const int64_t width = kernel.dim(0);
  const int64_t channels = kernel.dim(2);
  const int64_t steps = x.dim(0) - width + 1;
  for (int64_t t = 0; t < steps; ++t) {
    for (int64_t c = 0; c < channels; ++c) {
      double s = 0.0;
      for (int64_t w = 0; w < width; ++w) {
        for (int64_t d = 0; d < dim; ++d) {
          s += x[(t + w) * dim + d] * kernel[(w * dim + d) * channels + c];
        }
      }
      if (accumulate) {
        out[t * channels + c] += s;
      } else {
        out[t * channels + c] = s;
      }
    }
  }
}

std::vector<double> LogSoftmax(std::span<const double> z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - mx);
  const double log_sum = std::log(sum);
  std::vector<double> out(z.size());
  for (size_t i = 0; i < z.size(); ++i) out[i] = (z[i] - mx) - log_sum;
  return out;
}

Tensor EvalNode(const Node& n, const std::vector<Tensor>& v) {
  auto in = [&](size_t i) -> const Tensor& { return v[n.inputs[i]]; };
  Tensor out(n.shape);
  switch (n.op.type) {
    case OpType::kInput:
      throw GraphError("input node evaluated without a value");
    case OpType::kConstant:
      return *n.op.value;
    case OpType::kMatMul:
      MatMulInto(in(0), in(1), out, false);
      break;
    case OpType::kAdd: {
      const Tensor& a = in(0);
      const Tensor& b = in(1);
      for (int64_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i % b.size()];
      break;
    }
    case OpType::kMul:
      for (int64_t i = 0; i < out.size(); ++i) out[i] = in(0)[i] * in(1)[i];
      break;
    case OpType::kNeg:
      for (int64_t i = 0; i < out.size(); ++i) out[i] = -in(0)[i];
      break;
    case OpType::kRelu:
      for (int64_t i = 0; i < out.size(); ++i) out[i] = std::max(in(0)[i], 0.0);
      break;
    case OpType::kClampMax:
      for (int64_t i = 0; i < out.size(); ++i) out[i] = std::min(in(0)[i], n.op.scalar);
      break;
    case OpType::kMaxScalar:
      for (int64_t i = 0; i < out.size(); ++i) out[i] = std::max(in(0)[i], n.op.scalar);
      break;
    case OpType::kShiftRelu:
      for (int64_t i = 0; i < out.size(); ++i) out[i] = std::max(in(0)[i] - n.op.scalar, 0.0);
      break;
    case OpType::kConv1D:
      ConvInto(in(0), in(1), out, false);
      break;
    case OpType::kMaxPoolGlobal: {
      const Tensor& x = in(0);
      for (int64_t c = 0; c < out.size(); ++c) out[c] = x.at(ArgMaxColumn(x, c), c);
      break;
    }
    case OpType::kEmbeddingLookup: {
      const Tensor& ids = in(0);
      const Tensor& table = in(1);
      const int64_t dim = table.dim(1);
      for (int64_t t = 0; t < ids.size(); ++t) {
        const int64_t id = TokenId(ids[t], table.dim(0), n);
        for (int64_t d = 0; d < dim; ++d) out[t * dim + d] = table[id * dim + d];
      }
      break;
    }
    case OpType::kConcat: {
      int64_t offset = 0;
      for (size_t i = 0; i < n.inputs.size(); ++i) {
        for (double x : in(i).data()) out[offset++] = x;
      }
      break;
    }
    case OpType::kSigmoid:
      for (int64_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-in(0)[i]));
      break;
    case OpType::kSoftmax: {
      const auto& z = in(0).data();
      const double mx = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (int64_t i = 0; i < out.size(); ++i) sum += out[i] = std::exp(z[i] - mx);
      for (int64_t i = 0; i < out.size(); ++i) out[i] /= sum;
      break;
    }
    case OpType::kSelect:
      out[0] = in(0)[n.op.index];
      break;
    case OpType::kSoftmaxCrossEntropy: {
      const auto logp = LogSoftmax(in(0).data());
      double loss = 0.0;
      for (int64_t i = 0; i < in(1).size(); ++i) {
        if (in(1)[i] != 0.0) loss -= in(1)[i] * logp[i];
      }
      out[0] = loss;
      break;
    }
  }
  return out;
}

}  // namespace

ForwardTrace Forward(const Graph& graph, std::span<const Tensor> inputs) {
  const auto& input_ids = graph.inputs();
  if (inputs.size() != input_ids.size()) {
    throw ShapeError("graph expects " + std::to_string(input_ids.size()) + " inputs, got " +
                     std::to_string(inputs.size()));
  }
  ForwardTrace trace;
  trace.values.resize(graph.num_nodes());
  for (size_t i = 0; i < input_ids.size(); ++i) {
    const Node& n = graph.node(input_ids[i]);
    if (inputs[i].shape() != n.shape) {
      throw ShapeError("input node " + Label(n) + " expects shape " + ShapeToString(n.shape) +
                       ", got " + ShapeToString(inputs[i].shape()));
    }
    trace.values[n.id] = inputs[i];
  }
  for (const Node& n : graph.nodes()) {
    Tensor& value = trace.values[n.id];
    if (n.op.type != OpType::kInput) value = EvalNode(n, trace.values);
    ApplyMask(n, value);
    if (!value.AllFinite()) {
      throw NumericalError("non-finite value at node " + Label(n));
    }
  }
  return trace;
}

std::vector<Tensor> Vjp(const Graph& graph, const ForwardTrace& trace, NodeId seed,
                        const std::optional<Tensor>& seed_cotangent,
                        bool constant_gradients) {
  const Node& seed_node = graph.node(seed);
  std::vector<Tensor> cot;
  cot.reserve(graph.num_nodes());
  for (const Node& n : graph.nodes()) cot.emplace_back(n.shape);
  if (seed_cotangent) {
    if (seed_cotangent->shape() != seed_node.shape) {
      throw ShapeError("seed cotangent shape " + ShapeToString(seed_cotangent->shape()) +
                       " does not match node " + Label(seed_node));
    }
    cot[seed] = *seed_cotangent;
  } else {
    if (seed_node.shape != Shape{1}) {
      throw ShapeError("vjp seed " + Label(seed_node) + " is not scalar; supply a cotangent");
    }
    cot[seed][0] = 1.0;
  }
  const std::vector<bool> live = graph.AncestorsOf(seed);

  for (NodeId id = seed; id >= 0; --id) {
    const Node& n = graph.node(id);
    if (!live[id] || n.inputs.empty()) continue;
    Tensor g = cot[id];
    ApplyMask(n, g);
    auto x = [&](size_t i) -> const Tensor& { return trace.values[n.inputs[i]]; };
    auto wants = [&](size_t i) {
      const Node& src = graph.node(n.inputs[i]);
      return live[src.id] && (constant_gradients || src.op.type != OpType::kConstant);
    };
    auto dx = [&](size_t i) -> Tensor& { return cot[n.inputs[i]]; };
    const Tensor& y = trace.values[id];

    switch (n.op.type) {
      case OpType::kInput:
      case OpType::kConstant:
        break;
      case OpType::kMatMul: {
        const Tensor& a = x(0);
        const Tensor& b = x(1);
        const int64_t k = b.dim(0);
        const int64_t cols = b.dim(1);
        const int64_t m = a.size() / k;
        if (wants(0)) {
          Tensor& da = dx(0);
          for (int64_t i = 0; i < m; ++i)
            for (int64_t p = 0; p < k; ++p) {
              double s = 0.0;
              for (int64_t j = 0; j < cols; ++j) s += g[i * cols + j] * b[p * cols + j];
              da[i * k + p] += s;
            }
        }
        if (wants(1)) {
          Tensor& db = dx(1);
          for (int64_t i = 0; i < m; ++i)
            for (int64_t p = 0; p < k; ++p) {
              const double ap = a[i * k + p];
              if (ap == 0.0) continue;
              for (int64_t j = 0; j < cols; ++j) db[p * cols + j] += ap * g[i * cols + j];
            }
        }
        break;
      }
      case OpType::kAdd: {
        if (wants(0)) {
          Tensor& da = dx(0);
          for (int64_t i = 0; i < g.size(); ++i) da[i] += g[i];
        }
        if (wants(1)) {
          Tensor& db = dx(1);
          for (int64_t i = 0; i < g.size(); ++i) db[i % db.size()] += g[i];
        }
        break;
      }
      case OpType::kMul:
        if (wants(0)) {
          for (int64_t i = 0; i < g.size(); ++i) dx(0)[i] += g[i] * x(1)[i];
        }
        if (wants(1)) {
          for (int64_t i = 0; i < g.size(); ++i) dx(1)[i] += g[i] * x(0)[i];
        }
        break;
      case OpType::kNeg:
        if (wants(0)) {
          for (int64_t i = 0; i < g.size(); ++i) dx(0)[i] -= g[i];
        }
        break;
      case OpType::kRelu:
        if (wants(0)) {
          for (int64_t i = 0; i < g.size(); ++i)
            if (x(0)[i] > 0.0) dx(0)[i] += g[i];
        }
        break;
      case OpType::kClampMax:
        if (wants(0)) {
          for (int64_t i = 0; i < g.size(); ++i)
            if (x(0)[i] < n.op.scalar) dx(0)[i] += g[i];
        }
        break;
      case OpType::kMaxScalar:
      case OpType::kShiftRelu:
        if (wants(0)) {
          for (int64_t i = 0; i < g.size(); ++i)
            if (x(0)[i] > n.op.scalar) dx(0)[i] += g[i];
        }
        break;
      case OpType::kConv1D: {
        const Tensor& in = x(0);
        const Tensor& kernel = x(1);
        const int64_t dim = in.dim(1);
        const int64_t width = kernel.dim(0);
        const int64_t channels = kernel.dim(2);
        const int64_t steps = g.dim(0);
        const bool want_x = wants(0);
        const bool want_k = wants(1);
        for (int64_t t = 0; t < steps; ++t)
          for (int64_t c = 0; c < channels; ++c) {
            const double gc = g[t * channels + c];
            if (gc == 0.0) continue;
            for (int64_t w = 0; w < width; ++w)
              for (int64_t d = 0; d < dim; ++d) {
                const int64_t xi = (t + w) * dim + d;
                const int64_t ki = (w * dim + d) * channels + c;
                if (want_x) dx(0)[xi] += gc * kernel[ki];
                if (want_k) dx(1)[ki] += gc * in[xi];
              }
          }
        break;
      }
      case OpType::kMaxPoolGlobal:
        if (wants(0)) {
          const Tensor& in = x(0);
          const int64_t channels = in.dim(1);
          for (int64_t c = 0; c < channels; ++c) {
            dx(0)[ArgMaxColumn(in, c) * channels + c] += g[c];
          }
        }
        break;
      case OpType::kEmbeddingLookup:
        if (wants(1)) {
          const Tensor& ids = x(0);
          const int64_t dim = x(1).dim(1);
          for (int64_t t = 0; t < ids.size(); ++t) {
            const int64_t id = TokenId(ids[t], x(1).dim(0), n);
            for (int64_t d = 0; d < dim; ++d) dx(1)[id * dim + d] += g[t * dim + d];
          }
        }
        break;
      case OpType::kConcat: {
        int64_t offset = 0;
        for (size_t i = 0; i < n.inputs.size(); ++i) {
          const int64_t len = x(i).size();
          if (wants(i)) {
            for (int64_t j = 0; j < len; ++j) dx(i)[j] += g[offset + j];
          }
          offset += len;
        }
        break;
      }
      case OpType::kSigmoid:
        if (wants(0)) {
          for (int64_t i = 0; i < g.size(); ++i) dx(0)[i] += g[i] * y[i] * (1.0 - y[i]);
        }
        break;
      case OpType::kSoftmax:
        if (wants(0)) {
          const double gs = Dot(g, y);
          for (int64_t i = 0; i < g.size(); ++i) dx(0)[i] += y[i] * (g[i] - gs);
        }
        break;
      case OpType::kSelect:
        if (wants(0)) dx(0)[n.op.index] += g[0];
        break;
      case OpType::kSoftmaxCrossEntropy: {
        const auto logp = LogSoftmax(x(0).data());
        const Tensor& target = x(1);
        double mass = 0.0;
        for (double t : target.data()) mass += t;
        if (wants(0)) {
          for (int64_t i = 0; i < target.size(); ++i)
            dx(0)[i] += g[0] * (mass * std::exp(logp[i]) - target[i]);
        }
        if (wants(1)) {
          for (int64_t i = 0; i < target.size(); ++i) dx(1)[i] -= g[0] * logp[i];
        }
        break;
      }
    }
  }
  return cot;
}

std::vector<Tensor> Jvp(const Graph& graph, const ForwardTrace& trace,
                        std::span<const Tensor> directions) {
  const auto& input_ids = graph.inputs();
  if (directions.size() != input_ids.size()) {
    throw ShapeError("jvp expects " + std::to_string(input_ids.size()) +
                     " directions, got " + std::to_string(directions.size()));
  }
  std::vector<Tensor> tan;
  tan.reserve(graph.num_nodes());
  for (const Node& n : graph.nodes()) tan.emplace_back(n.shape);
  for (size_t i = 0; i < input_ids.size(); ++i) {
    const Node& n = graph.node(input_ids[i]);
    if (directions[i].shape() != n.shape) {
      throw ShapeError("jvp direction for input " + Label(n) + " has shape " +
                       ShapeToString(directions[i].shape()) + ", expected " +
                       ShapeToString(n.shape));
    }
    tan[n.id] = directions[i];
  }

  for (const Node& n : graph.nodes()) {
    Tensor& out = tan[n.id];
    auto x = [&](size_t i) -> const Tensor& { return trace.values[n.inputs[i]]; };
    auto t = [&](size_t i) -> const Tensor& { return tan[n.inputs[i]]; };
    const Tensor& y = trace.values[n.id];

    switch (n.op.type) {
      case OpType::kInput:
      case OpType::kConstant:
        break;
      case OpType::kMatMul:
        MatMulInto(t(0), x(1), out, false);
        MatMulInto(x(0), t(1), out, true);
        break;
      case OpType::kAdd:
        for (int64_t i = 0; i < out.size(); ++i) out[i] = t(0)[i] + t(1)[i % t(1).size()];
        break;
      case OpType::kMul:
        for (int64_t i = 0; i < out.size(); ++i)
          out[i] = t(0)[i] * x(1)[i] + x(0)[i] * t(1)[i];
        break;
      case OpType::kNeg:
        for (int64_t i = 0; i < out.size(); ++i) out[i] = -t(0)[i];
        break;
      case OpType::kRelu:
        for (int64_t i = 0; i < out.size(); ++i) out[i] = x(0)[i] > 0.0 ? t(0)[i] : 0.0;
        break;
      case OpType::kClampMax:
        for (int64_t i = 0; i < out.size(); ++i)
          out[i] = x(0)[i] < n.op.scalar ? t(0)[i] : 0.0;
        break;
      case OpType::kMaxScalar:
      case OpType::kShiftRelu:
        for (int64_t i = 0; i < out.size(); ++i)
          out[i] = x(0)[i] > n.op.scalar ? t(0)[i] : 0.0;
        break;
      case OpType::kConv1D:
        ConvInto(t(0), x(1), out, false);
        ConvInto(x(0), t(1), out, true);
        break;
      case OpType::kMaxPoolGlobal: {
        const Tensor& in = x(0);
        const int64_t channels = in.dim(1);
        for (int64_t c = 0; c < channels; ++c) {
          out[c] = t(0)[ArgMaxColumn(in, c) * channels + c];
        }
        break;
      }
      case OpType::kEmbeddingLookup: {
        const Tensor& ids = x(0);
        const int64_t dim = x(1).dim(1);
        for (int64_t s = 0; s < ids.size(); ++s) {
          const int64_t id = TokenId(ids[s], x(1).dim(0), n);
          for (int64_t d = 0; d < dim; ++d) out[s * dim + d] = t(1)[id * dim + d];
        }
        break;
      }
      case OpType::kConcat: {
        int64_t offset = 0;
        for (size_t i = 0; i < n.inputs.size(); ++i) {
          for (double v : t(i).data()) out[offset++] = v;
        }
        break;
      }
      case OpType::kSigmoid:
        for (int64_t i = 0; i < out.size(); ++i) out[i] = t(0)[i] * y[i] * (1.0 - y[i]);
        break;
      case OpType::kSoftmax: {
        const double st = Dot(y, t(0));
        for (int64_t i = 0; i < out.size(); ++i) out[i] = y[i] * (t(0)[i] - st);
        break;
      }
      case OpType::kSelect:
        out[0] = t(0)[n.op.index];
        break;
      case OpType::kSoftmaxCrossEntropy: {
        const auto logp = LogSoftmax(x(0).data());
        const Tensor& target = x(1);
        double mass = 0.0;
        for (double v : target.data()) mass += v;
        double s = 0.0;
        for (int64_t i = 0; i < target.size(); ++i) {
          s += (mass * std::exp(logp[i]) - target[i]) * t(0)[i];
          s -= logp[i] * t(1)[i];
        }
        out[0] = s;
        break;
      }
    }
    ApplyMask(n, out);
  }
  return tan;
}

}  // namespace conductance
