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

#ifndef CONDUCTANCE_STATS_H_
#define CONDUCTANCE_STATS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace conductance {

// Pearson correlation; nullopt when either side has zero variance or fewer
// than two points.
std::optional<double> PearsonCorrelation(std::span<const double> x, std::span<const double> y);

// Linear-interpolation quantile (type 7) of `values`, q in [0, 1].
double Quantile(std::vector<double> values, double q);

double Mean(std::span<const double> values);

struct LogisticConfig {
  double l2 = 1e-3;
  int epochs = 500;
  double learning_rate = 0.1;
  uint64_t seed = 0;
  // Standardize each feature with train-set mean and deviation first.
  bool standardize = true;
};

// Multinomial logistic regression trained by full-batch gradient descent.
// Weights start at small seeded values; the whole procedure is
// deterministic under the config.
class LogisticRegression {
 public:
  static LogisticRegression Fit(const std::vector<std::vector<double>>& features,
                                const std::vector<int>& labels, int num_classes,
                                const LogisticConfig& config = {});

  int Predict(std::span<const double> features) const;
  double Accuracy(const std::vector<std::vector<double>>& features,
                  const std::vector<int>& labels) const;

 private:
  std::vector<double> Logits(std::span<const double> features) const;

  int num_classes_ = 0;
  int64_t dim_ = 0;
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::vector<double> weights_;  // [num_classes, dim]
  std::vector<double> bias_;
};

}  // namespace conductance

#endif  // CONDUCTANCE_STATS_H_
