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


#include "conductance/evaluation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include <nlohmann/json.hpp>

#include "conductance/autodiff.h"
#include "conductance/errors.h"
#include "conductance/format.h"
#include "conductance/layer_analysis.h"
#include "conductance/parallel.h"

namespace conductance {
namespace {

void CheckHidden(const Graph& graph, const NeuronGroup& group) {
  for (const UnitKey& u : group.members()) {
    const Node& n = graph.node(u.node);
    if (n.op.type == OpType::kInput || n.op.type == OpType::kConstant || n.id == graph.output()) {
      throw GraphError("group '" + group.name() + "' member node '" + n.name +
                       "' is not a hidden unit");
    }
  }
}

Graph AblateInto(Graph graph, const NeuronGroup& group) {
  CheckHidden(graph, group);
  std::map<NodeId, std::vector<int64_t>> by_node;
  for (const UnitKey& u : group.members()) by_node[u.node].push_back(u.index);
  for (const auto& [node, indices] : by_node) graph = graph.WithAblation(node, indices);
  return graph;
}

// First index of the maximum; -1 when the maximum is shared.
int64_t UniqueArgmax(const Tensor& scores) {
  int64_t best = 0;
  bool tied = false;
  for (int64_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) {
      best = i;
      tied = false;
    } else if (scores[i] == scores[best]) {
      tied = true;
    }
  }
  return tied ? -1 : best;
}

int64_t Argmax(const Tensor& scores) {
  int64_t best = 0;
  for (int64_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

std::vector<int64_t> RankDescending(std::span<const double> scores) {
  std::vector<int64_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int64_t a, int64_t b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<double> ScoresOf(const AttributionResult& result,
                             const std::vector<NeuronGroup>& groups) {
  std::vector<double> out;
  for (const GroupScore& g : GroupScores(result, groups)) out.push_back(g.score);
  return out;
}

void CheckMethods(const std::vector<Method>& methods) {
  if (methods.empty()) throw ValidationError("no attribution methods selected");
  for (Method m : methods) {
    if (m == Method::kIntegratedGradients) {
      throw ValidationError("method 'ig' scores inputs, not hidden units");
    }
  }
}

nlohmann::ordered_json MethodList(const std::vector<Method>& methods) {
  auto out = nlohmann::ordered_json::array();
  for (Method m : methods) out.push_back(std::string(MethodName(m)));
  return out;
}

nlohmann::ordered_json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json();
}

}  // namespace

Graph Ablate(const Graph& graph, const NeuronGroup& group) { return AblateInto(graph, group); }

double AblationScore(const Graph& graph, const NeuronGroup& group,
                     const std::vector<Tensor>& input) {
  const Graph ablated = Ablate(graph, group);
  const double full = Forward(graph, input).output(graph);
  const double without = Forward(ablated, input).output(ablated);
  return full - without;
}

std::optional<int64_t> FlipsNeeded(const Graph& graph, NodeId logits,
                                   const std::vector<Tensor>& input,
                                   const std::vector<NeuronGroup>& ranking,
                                   int64_t max_ablations) {
  const int64_t original = UniqueArgmax(Forward(graph, input).at(logits));
  if (original < 0) return 0;
  Graph current = graph;
  const int64_t limit = std::min<int64_t>(max_ablations, ranking.size());
  for (int64_t k = 0; k < limit; ++k) {
    current = AblateInto(std::move(current), ranking[k]);
    const Tensor scores = Forward(current, input).at(logits);
    if (UniqueArgmax(scores) != original) return k + 1;
  }
  return std::nullopt;
}

double SignAgreementRatio(std::span<const double> scores) {
  double sum = 0.0;
  double abs_sum = 0.0;
  for (double s : scores) {
    sum += s;
    abs_sum += std::abs(s);
  }
  if (abs_sum == 0.0) return 1.0;
  return std::abs(sum) / abs_sum;
}

const CorrelationSummary& AblationReport::For(Method method) const {
  for (const CorrelationSummary& s : methods) {
    if (s.method == method) return s;
  }
  throw ValidationError("method '" + std::string(MethodName(method)) + "' not in report");
}

std::string AblationReport::ToCsv() const {
  std::string out = "input,method,rank,group,importance,ablation\n";
  for (const AblationCell& c : cells) {
    out += std::to_string(c.input) + "," + std::string(MethodName(c.method)) + "," +
           std::to_string(c.rank) + "," + groups[c.group] + "," + FormatDouble(c.importance) +
           "," + FormatDouble(c.ablation) + "\n";
  }
  return out;
}

std::string AblationReport::ToJson() const {
  nlohmann::ordered_json doc;
  doc["config"] = {{"methods", MethodList(options.methods)},
                   {"top_k", options.top_k},
                   {"steps", options.steps},
                   {"rule", std::string(RuleName(options.rule))},
                   {"baseline", "zero"},
                   {"num_groups", groups.size()},
                   {"num_inputs", inputs.size()}};
  auto summary = nlohmann::ordered_json::array();
  for (const CorrelationSummary& s : methods) {
    nlohmann::ordered_json j;
    j["method"] = std::string(MethodName(s.method));
    j["pooled_r"] = OptionalJson(s.pooled_r);
    j["pairs"] = s.pairs;
    j["per_input_r"] = {{"defined", s.defined_inputs},
                        {"mean", OptionalJson(s.mean_r)},
                        {"q25", OptionalJson(s.q25_r)},
                        {"median", OptionalJson(s.median_r)},
                        {"q75", OptionalJson(s.q75_r)}};
    j["flips"] = {{"flipped_inputs", s.flipped_inputs},
                  {"mean", OptionalJson(s.mean_flips)},
                  {"max", s.max_flips ? nlohmann::ordered_json(*s.max_flips)
                                      : nlohmann::ordered_json()},
                  {"within_top_k", s.flipped_within_top_k}};
    summary.push_back(std::move(j));
  }
  doc["methods"] = std::move(summary);
  auto per_input = nlohmann::ordered_json::array();
  for (const InputSummary& in : inputs) {
    nlohmann::ordered_json j;
    j["input"] = in.input;
    j["predicted"] = in.predicted;
    j["score"] = in.score;
    j["sign_agreement"] = in.sign_agreement;
    nlohmann::ordered_json flips;
    for (size_t m = 0; m < in.flips.size(); ++m) {
      flips[std::string(MethodName(options.methods[m]))] =
          in.flips[m] ? nlohmann::ordered_json(*in.flips[m]) : nlohmann::ordered_json();
    }
    j["flips"] = std::move(flips);
    per_input.push_back(std::move(j));
  }
  doc["inputs"] = std::move(per_input);
  return doc.dump(2) + "\n";
}

AblationReport CorrelationStudy(const Graph& graph, NodeId logits,
                                const std::vector<std::vector<Tensor>>& corpus,
                                const std::vector<NeuronGroup>& groups,
                                const AblationStudyOptions& options) {
  CheckMethods(options.methods);
  if (options.top_k < 1) throw ValidationError("top_k must be >= 1");
  if (corpus.empty()) throw ValidationError("empty corpus");
  if (groups.empty()) throw ValidationError("no neuron groups");
  for (const NeuronGroup& g : groups) CheckHidden(graph, g);

  const size_t num_methods = options.methods.size();
  const int64_t num_groups = static_cast<int64_t>(groups.size());
  const int64_t top_k = std::min<int64_t>(options.top_k, num_groups);

  struct Slot {
    InputSummary summary;
    std::vector<std::vector<double>> importance;  // [method][group]
    std::vector<std::vector<int64_t>> selected;   // [method][rank]
  };
  std::vector<Slot> slots(corpus.size());

  ParallelFor(static_cast<int64_t>(corpus.size()), options.threads, [&](int64_t i) {
    const std::vector<Tensor>& x = corpus[i];
    const Tensor scores = Forward(graph, x).at(logits);
    const int64_t predicted = Argmax(scores);
    const Graph target = graph.WithSelectOutput(logits, predicted);
    const LayerCut cut = CutFromGroups(target, "groups", groups);
    const UnitAttributions attrs =
        AttributeUnits(target, PathSpec::FromZero(x, options.steps, options.rule), cut);

    Slot& slot = slots[i];
    slot.summary.input = i;
    slot.summary.predicted = static_cast<int>(predicted);
    slot.summary.score = scores[predicted];
    for (const NeuronGroup& g : groups) {
      slot.summary.ablation.push_back(AblationScore(target, g, x));
    }
    for (Method m : options.methods) {
      std::vector<double> imp = ScoresOf(attrs.Get(m), groups);
      std::vector<int64_t> order = RankDescending(imp);
      std::vector<NeuronGroup> ranking;
      for (int64_t g : order) ranking.push_back(groups[g]);
      slot.summary.flips.push_back(FlipsNeeded(graph, logits, x, ranking, num_groups));
      if (m == Method::kConductance) {
        slot.summary.sign_agreement = SignAgreementRatio(imp);
      }
      order.resize(top_k);
      slot.selected.push_back(std::move(order));
      slot.importance.push_back(std::move(imp));
    }
  });

  AblationReport report;
  report.options = options;
  for (const NeuronGroup& g : groups) report.groups.push_back(g.name());
  for (size_t m = 0; m < num_methods; ++m) {
    CorrelationSummary s;
    s.method = options.methods[m];
    std::vector<double> pooled_imp;
    std::vector<double> pooled_abl;
    std::vector<double> per_input;
    std::vector<double> flips;
    for (const Slot& slot : slots) {
      std::vector<double> imp;
      std::vector<double> abl;
      for (int64_t r = 0; r < top_k; ++r) {
        const int64_t g = slot.selected[m][r];
        AblationCell cell{slot.summary.input, s.method, r + 1, g, slot.importance[m][g],
                          slot.summary.ablation[g]};
        imp.push_back(cell.importance);
        abl.push_back(cell.ablation);
        report.cells.push_back(cell);
      }
      if (auto r = PearsonCorrelation(imp, abl)) per_input.push_back(*r);
      pooled_imp.insert(pooled_imp.end(), imp.begin(), imp.end());
      pooled_abl.insert(pooled_abl.end(), abl.begin(), abl.end());
      if (const auto& f = slot.summary.flips[m]) {
        flips.push_back(static_cast<double>(*f));
        s.max_flips = std::max<int64_t>(s.max_flips.value_or(0), *f);
        s.flipped_within_top_k += *f <= top_k;
      }
    }
    s.pooled_r = PearsonCorrelation(pooled_imp, pooled_abl);
    s.pairs = static_cast<int64_t>(pooled_imp.size());
    s.defined_inputs = static_cast<int64_t>(per_input.size());
    if (!per_input.empty()) {
      s.mean_r = Mean(per_input);
      s.q25_r = Quantile(per_input, 0.25);
      s.median_r = Quantile(per_input, 0.5);
      s.q75_r = Quantile(per_input, 0.75);
    }
    s.flipped_inputs = static_cast<int64_t>(flips.size());
    if (!flips.empty()) s.mean_flips = Mean(flips);
    report.methods.push_back(std::move(s));
  }
  for (Slot& slot : slots) report.inputs.push_back(std::move(slot.summary));
  return report;
}

const SelectionRow& FeatureSelectionReport::Find(Method method, int k_requested) const {
  for (const SelectionRow& row : rows) {
    if (row.method == method && row.k_requested == k_requested) return row;
  }
  throw ValidationError("no selection row for method '" + std::string(MethodName(method)) +
                        "' and k=" + std::to_string(k_requested));
}

std::string FeatureSelectionReport::ToCsv() const {
  std::string out = "method,k_requested,k_used,accuracy,selected\n";
  for (const SelectionRow& row : rows) {
    std::string sel;
    for (int64_t g : row.selected) {
      if (!sel.empty()) sel += ";";
      sel += groups[g];
    }
    out += std::string(MethodName(row.method)) + "," + std::to_string(row.k_requested) + "," +
           std::to_string(row.k_used) + "," + FormatDouble(row.accuracy) + "," + sel + "\n";
  }
  return out;
}

std::string FeatureSelectionReport::ToJson() const {
  nlohmann::ordered_json doc;
  doc["config"] = {{"methods", MethodList(options.methods)},
                   {"k_list", options.k_list},
                   {"absolute_aggregate", options.absolute_aggregate},
                   {"steps", options.steps},
                   {"rule", std::string(RuleName(options.rule))},
                   {"baseline", "zero"},
                   {"classifier",
                    {{"l2", options.classifier.l2},
                     {"epochs", options.classifier.epochs},
                     {"learning_rate", options.classifier.learning_rate},
                     {"seed", options.classifier.seed},
                     {"standardize", options.classifier.standardize}}},
                   {"num_groups", groups.size()},
                   {"train_size", train_size},
                   {"eval_size", eval_size}};
  auto out_rows = nlohmann::ordered_json::array();
  for (const SelectionRow& row : rows) {
    auto names = nlohmann::ordered_json::array();
    for (int64_t g : row.selected) names.push_back(groups[g]);
    out_rows.push_back({{"method", std::string(MethodName(row.method))},
                        {"k_requested", row.k_requested},
                        {"k_used", row.k_used},
                        {"accuracy", row.accuracy},
                        {"selected", std::move(names)}});
  }
  doc["rows"] = std::move(out_rows);
  doc["warnings"] = warnings;
  return doc.dump(2) + "\n";
}

FeatureSelectionReport FeatureSelectionStudy(const Graph& graph, NodeId logits, int num_classes,
                                             const std::vector<std::vector<Tensor>>& inputs,
                                             const std::vector<int>& labels,
                                             std::span<const int64_t> train,
                                             std::span<const int64_t> eval,
                                             const std::vector<NeuronGroup>& groups,
                                             const FeatureSelectionOptions& options) {
  CheckMethods(options.methods);
  if (options.k_list.empty()) throw ValidationError("k list is empty");
  for (int k : options.k_list) {
    if (k < 1) throw ValidationError("k must be >= 1, got " + std::to_string(k));
  }
  if (num_classes < 2) throw ValidationError("need at least 2 classes");
  if (inputs.size() != labels.size()) {
    throw ValidationError("got " + std::to_string(inputs.size()) + " inputs and " +
                          std::to_string(labels.size()) + " labels");
  }
  if (train.empty() || eval.empty()) {
    throw ValidationError("train and eval splits must be non-empty");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw ValidationError("label out of range: " + std::to_string(y));
    }
  }
  for (std::span<const int64_t> split : {train, eval}) {
    for (int64_t i : split) {
      if (i < 0 || i >= static_cast<int64_t>(inputs.size())) {
        throw ValidationError("split index out of range: " + std::to_string(i));
      }
    }
  }
  if (groups.empty()) throw ValidationError("no neuron groups");
  for (const NeuronGroup& g : groups) CheckHidden(graph, g);

  const size_t num_methods = options.methods.size();
  const int64_t num_groups = static_cast<int64_t>(groups.size());

  FeatureSelectionReport report;
  report.options = options;
  for (const NeuronGroup& g : groups) report.groups.push_back(g.name());
  report.train_size = static_cast<int64_t>(train.size());
  report.eval_size = static_cast<int64_t>(eval.size());

  // Per-train-example group importance, [example][method][group].
  std::vector<std::vector<std::vector<double>>> importance(train.size());
  ParallelFor(static_cast<int64_t>(train.size()), options.threads, [&](int64_t t) {
    const int64_t i = train[t];
    const Graph target = graph.WithSelectOutput(logits, labels[i]);
    const LayerCut cut = CutFromGroups(target, "groups", groups);
    const UnitAttributions attrs =
        AttributeUnits(target, PathSpec::FromZero(inputs[i], options.steps, options.rule), cut);
    for (Method m : options.methods) importance[t].push_back(ScoresOf(attrs.Get(m), groups));
  });

  report.aggregate.assign(num_methods, std::vector<std::vector<double>>(
                                           num_classes, std::vector<double>(num_groups, 0.0)));
  for (size_t t = 0; t < train.size(); ++t) {
    const int y = labels[train[t]];
    for (size_t m = 0; m < num_methods; ++m) {
      for (int64_t g = 0; g < num_groups; ++g) {
        const double s = importance[t][m][g];
        report.aggregate[m][y][g] += options.absolute_aggregate ? std::abs(s) : s;
      }
    }
  }

  // Group activations for every example, [example][group].
  std::vector<std::vector<double>> activations(inputs.size());
  ParallelFor(static_cast<int64_t>(inputs.size()), options.threads, [&](int64_t i) {
    const ForwardTrace trace = Forward(graph, inputs[i]);
    for (const NeuronGroup& g : groups) {
      double total = 0.0;
      for (const UnitKey& u : g.members()) total += trace.at(u.node)[u.index];
      activations[i].push_back(total);
    }
  });

  auto features_for = [&](std::span<const int64_t> split, const std::vector<int64_t>& selected,
                          std::vector<std::vector<double>>& x, std::vector<int>& y) {
    x.clear();
    y.clear();
    for (int64_t i : split) {
      std::vector<double> row;
      for (int64_t g : selected) row.push_back(activations[i][g]);
      x.push_back(std::move(row));
      y.push_back(labels[i]);
    }
  };

  for (int k : options.k_list) {
    if (k > num_groups) {
      report.warnings.push_back("k=" + std::to_string(k) + " exceeds " +
                                std::to_string(num_groups) + " groups; using " +
                                std::to_string(num_groups));
    }
  }
  for (size_t m = 0; m < num_methods; ++m) {
    std::vector<double> best(num_groups);
    for (int64_t g = 0; g < num_groups; ++g) {
      best[g] = report.aggregate[m][0][g];
      for (int c = 1; c < num_classes; ++c) best[g] = std::max(best[g], report.aggregate[m][c][g]);
    }
    const std::vector<int64_t> order = RankDescending(best);
    for (int k : options.k_list) {
      SelectionRow row;
      row.method = options.methods[m];
      row.k_requested = k;
      row.k_used = static_cast<int>(std::min<int64_t>(k, num_groups));
      row.selected.assign(order.begin(), order.begin() + row.k_used);
      std::sort(row.selected.begin(), row.selected.end());
      std::vector<std::vector<double>> x_train, x_eval;
      std::vector<int> y_train, y_eval;
      features_for(train, row.selected, x_train, y_train);
      features_for(eval, row.selected, x_eval, y_eval);
      const LogisticRegression clf =
          LogisticRegression::Fit(x_train, y_train, num_classes, options.classifier);
      row.accuracy = clf.Accuracy(x_eval, y_eval);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace conductance
