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

#ifndef CONDUCTANCE_TRAIN_H_
#define CONDUCTANCE_TRAIN_H_

#include <cstdint>
#include <span>
#include <vector>

#include "conductance/datasets.h"
#include "conductance/graph.h"
#include "conductance/zoo.h"

namespace conductance {

// Minibatch SGD with momentum.
struct TrainConfig {
  uint64_t seed = 0;
  int epochs = 50;
  double learning_rate = 0.02;
  int batch_size = 16;
  double momentum = 0.9;
};

struct TrainReport {
  double train_accuracy = 0.0;
  double final_loss = 0.0;  // mean loss over the last epoch
  int epochs = 0;
};

// The model's graph cut at the logits with a softmax cross-entropy head
// (inputs: model inputs, or "tokens" for embedded models, then "target"
// one-hot). Token models look up the trainable "embedding" constant.
Graph MakeTrainingGraph(const ZooModel& model);

// Inputs of the training graph for one example.
std::vector<Tensor> TrainingInputs(const ZooModel& model, const Example& example);

// Trains on dataset.train and returns a copy with updated weights. Same
// model, data and config give bit-identical weights. Throws NumericalError
// when the loss becomes non-finite.
ZooModel Train(const ZooModel& model, const LabeledDataset& data, const TrainConfig& config,
               TrainReport* report = nullptr);

// Fraction of `indices` the model classifies correctly.
double Accuracy(const ZooModel& model, const LabeledDataset& data,
                std::span<const int64_t> indices);

}  // namespace conductance

#endif  // CONDUCTANCE_TRAIN_H_
