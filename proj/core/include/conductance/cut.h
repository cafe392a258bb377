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

#ifndef CONDUCTANCE_CUT_H_
#define CONDUCTANCE_CUT_H_

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "conductance/graph.h"

namespace conductance {

// One scalar hidden unit: flat element `index` of node `node`.
struct UnitKey {
  NodeId node = 0;
  int64_t index = 0;

  auto operator<=>(const UnitKey&) const = default;
};

// Contiguous element range [begin, end) of a node.
struct CutSlice {
  NodeId node = 0;
  int64_t begin = 0;
  int64_t end = 0;

  bool operator==(const CutSlice&) const = default;
};

// A set of hidden-unit slices. `separating()` is established against the
// graph at construction: every member node is fully covered, no member is
// an ancestor of another, and removing the members disconnects every input
// from the output. Completeness is only meaningful for separating cuts.
class LayerCut {
 public:
  // Throws GraphError for unknown nodes, empty or overlapping slices, inputs,
  // constants or the output node itself.
  static LayerCut Create(const Graph& graph, std::string name, std::vector<CutSlice> members);
  // Convenience: every element of each listed node.
  static LayerCut WholeNodes(const Graph& graph, std::string name,
                             const std::vector<NodeId>& nodes);

  const std::string& name() const { return name_; }
  const std::vector<CutSlice>& members() const { return members_; }
  bool separating() const { return separating_; }

  // Units in member order.
  std::vector<UnitKey> Units() const;
  bool Contains(const UnitKey& unit) const;

 private:
  std::string name_;
  std::vector<CutSlice> members_;
  bool separating_ = false;
};

// A named set of units whose scores are summed (e.g. one feature map).
class NeuronGroup {
 public:
  // Throws GraphError when `members` is empty or has duplicates.
  NeuronGroup(std::string name, std::vector<UnitKey> members);

  const std::string& name() const { return name_; }
  const std::vector<UnitKey>& members() const { return members_; }

 private:
  std::string name_;
  std::vector<UnitKey> members_;
};

// Throws GraphError unless `groups` are pairwise disjoint, all members lie in
// `cut`, and together they cover every unit of `cut`.
void ValidatePartition(const LayerCut& cut, const std::vector<NeuronGroup>& groups);

// Splits `cut` into `num_groups` contiguous groups of equal size, named
// "<prefix><k>". Throws GraphError if the cut size is not divisible or a
// group would be empty.
std::vector<NeuronGroup> EqualPartition(const LayerCut& cut, int64_t num_groups,
                                        const std::string& prefix);

// Cut over exactly the units of `groups` (one single-element slice each).
LayerCut CutFromGroups(const Graph& graph, std::string name,
                       const std::vector<NeuronGroup>& groups);

}  // namespace conductance

#endif  // CONDUCTANCE_CUT_H_
