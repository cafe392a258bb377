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

#ifndef CONDUCTANCE_LAYER_ANALYSIS_H_
#define CONDUCTANCE_LAYER_ANALYSIS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "conductance/attribution.h"
#include "conductance/cut.h"
#include "conductance/graph.h"
#include "conductance/tensor.h"

namespace conductance {

struct GroupScore {
  std::string name;
  double score = 0.0;
};

// Sum of member scores per group, in group order. Throws GraphError when a
// member was not scored in `result`.
std::vector<GroupScore> GroupScores(const AttributionResult& result,
                                    const std::vector<NeuronGroup>& groups);

enum class Sign { kNegative, kNearZero, kPositive };

// rows = inputs, columns = groups. An entry is near-zero iff |score| <= tau.
struct SignMatrix {
  double tau = 0.0;
  std::vector<std::string> groups;
  std::vector<std::vector<Sign>> entries;
  // max(#pos, #neg) / (#pos + #neg) per column, ignoring near-zero entries.
  // A column with no signed entries reports purity 1 and sets the flag.
  std::vector<double> purity;
  std::vector<bool> all_near_zero;

  // CSV: header of group names, a legend row, then one row per input with
  // -1 / 0 / +1 codes.
  std::string ToCsv() const;
  // {"tau", "groups": [{"name", "purity", "positive", "negative", "near_zero",
  // "all_near_zero"}], "mean_purity"}.
  std::string PurityJson() const;
};

// Throws ValidationError for tau < 0 (or NaN) and ragged rows.
SignMatrix BuildSignMatrix(const std::vector<std::vector<double>>& scores, double tau,
                           std::vector<std::string> group_names = {});

struct RankedInput {
  int64_t corpus_index = 0;
  double score = 0.0;
};

struct RankingOptions {
  int steps = 128;
  QuadratureRule rule = QuadratureRule::kMidpoint;
  int threads = 1;
};

// Corpus entries ranked by the group's total conductance (zero baseline),
// descending; ties keep corpus order. Returns at most k entries. Throws
// ValidationError on an empty corpus.
std::vector<RankedInput> TopConductingInputs(const Graph& graph, const NeuronGroup& group,
                                             const std::vector<std::vector<Tensor>>& corpus,
                                             int64_t k, const RankingOptions& options = {});

}  // namespace conductance

#endif  // CONDUCTANCE_LAYER_ANALYSIS_H_
