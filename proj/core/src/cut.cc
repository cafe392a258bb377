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

#include "conductance/cut.h"

#include <algorithm>
#include <set>
#include <utility>

#include "conductance/errors.h"

namespace conductance {
namespace {

bool IsSeparating(const Graph& graph, const std::vector<CutSlice>& members) {
  std::vector<bool> member(graph.num_nodes(), false);
  std::vector<int64_t> covered(graph.num_nodes(), 0);
  for (const CutSlice& s : members) {
    member[s.node] = true;
    covered[s.node] += s.end - s.begin;
  }
  for (const CutSlice& s : members) {
    if (covered[s.node] != NumElements(graph.node(s.node).shape)) return false;
  }
  for (const CutSlice& s : members) {
    const auto anc = graph.AncestorsOf(s.node);
    for (const CutSlice& other : members) {
      if (other.node != s.node && anc[other.node]) return false;
    }
  }
  // Forward reachability from the inputs that never passes through a member.
  std::vector<bool> reach(graph.num_nodes(), false);
  for (NodeId in : graph.inputs()) reach[in] = true;
  for (const Node& n : graph.nodes()) {
    if (n.op.type == OpType::kInput) continue;
    for (NodeId in : n.inputs) {
      if (reach[in] && !member[in]) {
        reach[n.id] = true;
        break;
      }
    }
  }
  return !reach[graph.output()];
}

}  // namespace

LayerCut LayerCut::Create(const Graph& graph, std::string name,
                          std::vector<CutSlice> members) {
  if (members.empty()) throw GraphError("cut '" + name + "' has no members");
  std::sort(members.begin(), members.end(), [](const CutSlice& a, const CutSlice& b) {
    return std::pair(a.node, a.begin) < std::pair(b.node, b.begin);
  });
  for (size_t i = 0; i < members.size(); ++i) {
    const CutSlice& s = members[i];
    const Node& n = graph.node(s.node);
    if (n.op.type == OpType::kInput || n.op.type == OpType::kConstant) {
      throw GraphError("cut '" + name + "': node " + std::to_string(s.node) +
                       " is not a hidden unit");
    }
    if (s.node == graph.output()) {
      throw GraphError("cut '" + name + "': the output node cannot be part of a cut");
    }
    if (s.begin < 0 || s.end > NumElements(n.shape) || s.begin >= s.end) {
      throw GraphError("cut '" + name + "': bad range [" + std::to_string(s.begin) + ", " +
                       std::to_string(s.end) + ") on node " + std::to_string(s.node));
    }
    if (i > 0 && members[i - 1].node == s.node && members[i - 1].end > s.begin) {
      throw GraphError("cut '" + name + "': overlapping ranges on node " +
                       std::to_string(s.node));
    }
  }
  LayerCut cut;
  cut.name_ = std::move(name);
  cut.separating_ = IsSeparating(graph, members);
  cut.members_ = std::move(members);
  return cut;
}

LayerCut LayerCut::WholeNodes(const Graph& graph, std::string name,
                              const std::vector<NodeId>& nodes) {
  std::vector<CutSlice> members;
  for (NodeId id : nodes) members.push_back({id, 0, NumElements(graph.node(id).shape)});
  return Create(graph, std::move(name), std::move(members));
}

std::vector<UnitKey> LayerCut::Units() const {
  std::vector<UnitKey> units;
  for (const CutSlice& s : members_) {
    for (int64_t i = s.begin; i < s.end; ++i) units.push_back({s.node, i});
  }
  return units;
}

bool LayerCut::Contains(const UnitKey& unit) const {
  for (const CutSlice& s : members_) {
    if (s.node == unit.node && unit.index >= s.begin && unit.index < s.end) return true;
  }
  return false;
}

NeuronGroup::NeuronGroup(std::string name, std::vector<UnitKey> members)
    : name_(std::move(name)), members_(std::move(members)) {
  if (members_.empty()) throw GraphError("neuron group '" + name_ + "' is empty");
  std::set<UnitKey> seen(members_.begin(), members_.end());
  if (seen.size() != members_.size()) {
    throw GraphError("neuron group '" + name_ + "' lists a unit twice");
  }
}

void ValidatePartition(const LayerCut& cut, const std::vector<NeuronGroup>& groups) {
  std::set<UnitKey> seen;
  for (const NeuronGroup& g : groups) {
    for (const UnitKey& u : g.members()) {
      if (!cut.Contains(u)) {
        throw GraphError("group '" + g.name() + "' has a unit outside cut '" + cut.name() +
                         "'");
      }
      if (!seen.insert(u).second) {
        throw GraphError("groups overlap on node " + std::to_string(u.node) + " index " +
                         std::to_string(u.index));
      }
    }
  }
  if (seen.size() != cut.Units().size()) {
    throw GraphError("groups do not cover cut '" + cut.name() + "'");
  }
}

std::vector<NeuronGroup> EqualPartition(const LayerCut& cut, int64_t num_groups,
                                        const std::string& prefix) {
  const auto units = cut.Units();
  const auto total = static_cast<int64_t>(units.size());
  if (num_groups < 1 || num_groups > total || total % num_groups != 0) {
    throw GraphError("cannot split " + std::to_string(total) + " units of cut '" +
                     cut.name() + "' into " + std::to_string(num_groups) +
                     " non-empty equal groups");
  }
  const int64_t per = total / num_groups;
  std::vector<NeuronGroup> groups;
  for (int64_t g = 0; g < num_groups; ++g) {
    std::vector<UnitKey> members(units.begin() + g * per, units.begin() + (g + 1) * per);
    groups.emplace_back(prefix + std::to_string(g), std::move(members));
  }
  return groups;
}

LayerCut CutFromGroups(const Graph& graph, std::string name,
                       const std::vector<NeuronGroup>& groups) {
  std::vector<CutSlice> slices;
  for (const NeuronGroup& g : groups) {
    for (const UnitKey& u : g.members()) slices.push_back({u.node, u.index, u.index + 1});
  }
  return LayerCut::Create(graph, std::move(name), std::move(slices));
}

}  // namespace conductance
