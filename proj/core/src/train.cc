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

#include "conductance/train.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <utility>

#include "conductance/autodiff.h"
#include "conductance/errors.h"

namespace conductance {

Graph MakeTrainingGraph(const ZooModel& model) {
  const Graph& g = model.graph;
  const std::vector<bool> needed = g.AncestorsOf(model.logits);
  GraphBuilder b;
  std::vector<NodeId> remap(g.num_nodes(), -1);
  for (const Node& n : g.nodes()) {
    if (!needed[n.id]) continue;
    if (n.op.type == OpType::kInput && model.embedding) {
      const NodeId tokens = b.Input("tokens", {n.shape[0]});
      const NodeId table = b.Constant("embedding", *model.embedding, true);
      remap[n.id] = b.EmbeddingLookup(tokens, table, n.name);
      continue;
    }
    std::vector<NodeId> inputs;
    for (NodeId in : n.inputs) inputs.push_back(remap[in]);
    remap[n.id] = b.AddNode(n.op, std::move(inputs), n.name,
                            n.op.type == OpType::kInput ? std::optional(n.shape) : std::nullopt);
    if (!n.ablated.empty()) b.SetAblated(remap[n.id], n.ablated);
  }
  const NodeId target = b.Input("target", {model.num_classes});
  const NodeId loss = b.SoftmaxCrossEntropy(remap[model.logits], target, "loss");
  return std::move(b).Build(loss);
}

std::vector<Tensor> TrainingInputs(const ZooModel& model, const Example& example) {
  Tensor onehot({model.num_classes});
  if (example.label < 0 || example.label >= model.num_classes) {
    throw ValidationError("label " + std::to_string(example.label) + " out of range");
  }
  onehot[example.label] = 1.0;
  if (model.embedding) {
    std::vector<double> ids(example.tokens.begin(), example.tokens.end());
    const auto n = static_cast<int64_t>(ids.size());
    return {Tensor({n}, std::move(ids)), std::move(onehot)};
  }
  std::vector<Tensor> inputs = model.InputsFor(example);
  inputs.push_back(std::move(onehot));
  return inputs;
}

ZooModel Train(const ZooModel& model, const LabeledDataset& data, const TrainConfig& config,
               TrainReport* report) {
  if (config.epochs < 0 || config.batch_size < 1) {
    throw ValidationError("epochs must be >= 0 and batch size >= 1");
  }
  data.Validate();
  if (data.train.empty()) throw ValidationError("training split is empty");

  Graph graph = MakeTrainingGraph(model);
  std::map<std::string, Tensor> weights = graph.TrainableConstants();
  std::map<std::string, Tensor> velocity;
  std::map<std::string, NodeId> ids;
  for (const auto& [name, w] : weights) {
    velocity.emplace(name, Tensor(w.shape()));
    ids.emplace(name, graph.NodeByName(name));
  }

  std::vector<std::vector<Tensor>> inputs;
  inputs.reserve(data.train.size());
  for (int64_t i : data.train) inputs.push_back(TrainingInputs(model, data.examples[i]));

  std::mt19937_64 rng(config.seed);
  std::vector<size_t> order(inputs.size());
  double epoch_loss = 0.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    epoch_loss = 0.0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      std::map<std::string, Tensor> grads;
      for (const auto& [name, w] : weights) grads.emplace(name, Tensor(w.shape()));
      for (size_t k = start; k < end; ++k) {
        ForwardTrace trace;
        try {
          trace = Forward(graph, inputs[order[k]]);
        } catch (const NumericalError& e) {
          throw NumericalError("training diverged at epoch " + std::to_string(epoch) + ": " +
                               e.what());
        }
        const double loss = trace.output(graph);
        if (!std::isfinite(loss)) {
          throw NumericalError("non-finite loss at epoch " + std::to_string(epoch));
        }
        epoch_loss += loss;
        const std::vector<Tensor> cot = Vjp(graph, trace, graph.output(), std::nullopt, true);
        for (auto& [name, gsum] : grads) {
          const Tensor& gi = cot[ids[name]];
          for (int64_t j = 0; j < gsum.size(); ++j) gsum[j] += gi[j];
        }
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto& [name, w] : weights) {
        Tensor& v = velocity.at(name);
        const Tensor& gsum = grads.at(name);
        for (int64_t j = 0; j < w.size(); ++j) {
          v[j] = config.momentum * v[j] - config.learning_rate * gsum[j] * scale;
          w[j] += v[j];
        }
      }
      graph = graph.WithConstants(weights);
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) {
      throw NumericalError("non-finite loss at epoch " + std::to_string(epoch));
    }
  }

  ZooModel trained = model;
  std::map<std::string, Tensor> body = weights;
  if (trained.embedding) {
    trained.embedding = body.at("embedding");
    body.erase("embedding");
  }
  trained.graph = model.graph.WithConstants(body);
  if (report) {
    report->train_accuracy = Accuracy(trained, data, data.train);
    report->final_loss = epoch_loss;
    report->epochs = config.epochs;
  }
  return trained;
}

double Accuracy(const ZooModel& model, const LabeledDataset& data,
                std::span<const int64_t> indices) {
  if (indices.empty()) return 0.0;
  int64_t hits = 0;
  for (int64_t i : indices) {
    const Example& e = data.examples.at(i);
    hits += model.Predict(model.InputsFor(e)) == e.label;
  }
  return static_cast<double>(hits) / static_cast<double>(indices.size());
}

}  // namespace conductance
