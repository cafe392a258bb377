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

#ifndef CONDUCTANCE_AUTODIFF_H_
#define CONDUCTANCE_AUTODIFF_H_

#include <optional>
#include <span>
#include <vector>

#include "conductance/graph.h"
#include "conductance/tensor.h"

namespace conductance {

// Activations of every node for one concrete input, indexed by node id.
struct ForwardTrace {
  std::vector<Tensor> values;

  const Tensor& at(NodeId id) const { return values.at(id); }
  double output(const Graph& graph) const { return values.at(graph.output())[0]; }
};

// Evaluates every node. `inputs` follow graph.inputs() order. Throws
// ShapeError on a shape mismatch and NumericalError if any node produces a
// non-finite value; both name the node.
ForwardTrace Forward(const Graph& graph, std::span<const Tensor> inputs);

// Reverse sweep from `seed`. With no cotangent the seed must be a scalar
// ([1]-shaped) node and is seeded with 1. The result holds d<seed, u>/d(node)
// for every node; nodes that are not ancestors of the seed get zeros.
// Constant payloads get gradients only when `constant_gradients` is set.
std::vector<Tensor> Vjp(const Graph& graph, const ForwardTrace& trace, NodeId seed,
                        const std::optional<Tensor>& seed_cotangent = std::nullopt,
                        bool constant_gradients = false);

// Forward-mode directional derivative of every node along `directions`
// (one tangent per graph input; constants have zero tangent).
std::vector<Tensor> Jvp(const Graph& graph, const ForwardTrace& trace,
                        std::span<const Tensor> directions);

}  // namespace conductance

#endif  // CONDUCTANCE_AUTODIFF_H_
