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

#include "conductance/layer_analysis.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include <nlohmann/json.hpp>

#include "conductance/errors.h"
#include "conductance/format.h"
#include "conductance/parallel.h"

namespace conductance {

std::vector<GroupScore> GroupScores(const AttributionResult& result,
                                    const std::vector<NeuronGroup>& groups) {
  std::vector<GroupScore> out;
  out.reserve(groups.size());
  for (const NeuronGroup& g : groups) {
    double total = 0.0;
    for (const UnitKey& u : g.members()) total += result.Score(u);
    out.push_back({g.name(), total});
  }
  return out;
}

SignMatrix BuildSignMatrix(const std::vector<std::vector<double>>& scores, double tau,
                           std::vector<std::string> group_names) {
  if (!(tau >= 0.0)) throw ValidationError("sign threshold must be >= 0");
  const size_t cols = scores.empty() ? group_names.size() : scores.front().size();
  for (const auto& row : scores) {
    if (row.size() != cols) throw ValidationError("score matrix rows differ in length");
  }
  if (group_names.empty()) {
    for (size_t c = 0; c < cols; ++c) group_names.push_back("g" + std::to_string(c));
  }
  if (group_names.size() != cols) {
    throw ValidationError("got " + std::to_string(group_names.size()) + " group names for " +
                          std::to_string(cols) + " columns");
  }

  SignMatrix m;
  m.tau = tau;
  m.groups = std::move(group_names);
  for (const auto& row : scores) {
    std::vector<Sign> signs;
    for (double v : row) {
      if (std::abs(v) <= tau) {
        signs.push_back(Sign::kNearZero);
      } else {
        signs.push_back(v > 0 ? Sign::kPositive : Sign::kNegative);
      }
    }
    m.entries.push_back(std::move(signs));
  }
  for (size_t c = 0; c < cols; ++c) {
    int64_t pos = 0;
    int64_t neg = 0;
    for (const auto& row : m.entries) {
      pos += row[c] == Sign::kPositive;
      neg += row[c] == Sign::kNegative;
    }
    const bool empty = pos + neg == 0;
    m.all_near_zero.push_back(empty);
    m.purity.push_back(empty ? 1.0
                             : static_cast<double>(std::max(pos, neg)) /
                                   static_cast<double>(pos + neg));
  }
  return m;
}

std::string SignMatrix::ToCsv() const {
  std::string out = "input";
  for (const auto& g : groups) out += "," + g;
  out += "\n# legend: -1=negative 0=near-zero(|score|<=" + FormatDouble(tau) +
         ") 1=positive\n";
  for (size_t r = 0; r < entries.size(); ++r) {
    out += std::to_string(r);
    for (Sign s : entries[r]) {
      out += s == Sign::kNegative ? ",-1" : s == Sign::kPositive ? ",1" : ",0";
    }
    out += "\n";
  }
  return out;
}

std::string SignMatrix::PurityJson() const {
  nlohmann::ordered_json doc;
  doc["tau"] = tau;
  auto cols = nlohmann::ordered_json::array();
  double total = 0.0;
  for (size_t c = 0; c < groups.size(); ++c) {
    int64_t pos = 0;
    int64_t neg = 0;
    int64_t zero = 0;
    for (const auto& row : entries) {
      pos += row[c] == Sign::kPositive;
      neg += row[c] == Sign::kNegative;
      zero += row[c] == Sign::kNearZero;
    }
    cols.push_back({{"name", groups[c]},
                    {"purity", purity[c]},
                    {"positive", pos},
                    {"negative", neg},
                    {"near_zero", zero},
                    {"all_near_zero", static_cast<bool>(all_near_zero[c])}});
    total += purity[c];
  }
  doc["groups"] = std::move(cols);
  doc["mean_purity"] = groups.empty() ? 1.0 : total / static_cast<double>(groups.size());
  return doc.dump(2) + "\n";
}

std::vector<RankedInput> TopConductingInputs(const Graph& graph, const NeuronGroup& group,
                                             const std::vector<std::vector<Tensor>>& corpus,
                                             int64_t k, const RankingOptions& options) {
  if (corpus.empty()) throw ValidationError("corpus is empty");
  if (k < 1) throw ValidationError("k must be >= 1");
  const LayerCut cut = CutFromGroups(graph, group.name(), {group});

  std::vector<RankedInput> ranked(corpus.size());
  ParallelFor(static_cast<int64_t>(corpus.size()), options.threads, [&](int64_t i) {
    const PathSpec path = PathSpec::FromZero(corpus[i], options.steps, options.rule);
    ranked[i] = {i, ConductanceTotal(graph, path, cut).Sum()};
  });
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedInput& a, const RankedInput& b) { return a.score > b.score; });
  if (static_cast<int64_t>(ranked.size()) > k) ranked.resize(k);
  return ranked;
}

}  // namespace conductance
