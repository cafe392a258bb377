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

#include "conductance/stats.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "conductance/errors.h"

namespace conductance {

double Mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

std::optional<double> PearsonCorrelation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson: length mismatch");
  if (x.size() < 2) return std::nullopt;
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

LogisticRegression LogisticRegression::Fit(const std::vector<std::vector<double>>& features,
                                           const std::vector<int>& labels, int num_classes,
                                           const LogisticConfig& config) {
  if (features.empty() || features.size() != labels.size()) {
    throw ValidationError("logistic regression needs matching, non-empty features and labels");
  }
  if (num_classes < 2) throw ValidationError("logistic regression needs >= 2 classes");
  LogisticRegression model;
  model.num_classes_ = num_classes;
  model.dim_ = static_cast<int64_t>(features.front().size());
  const int64_t dim = model.dim_;
  const auto n = static_cast<double>(features.size());
  for (const auto& row : features) {
    if (static_cast<int64_t>(row.size()) != dim) throw ValidationError("ragged feature rows");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw ValidationError("label out of range");
  }

  model.mean_.assign(dim, 0.0);
  model.scale_.assign(dim, 1.0);
  if (config.standardize) {
    for (int64_t d = 0; d < dim; ++d) {
      double m = 0.0;
      for (const auto& row : features) m += row[d];
      m /= n;
      double var = 0.0;
      for (const auto& row : features) var += (row[d] - m) * (row[d] - m);
      const double sd = std::sqrt(var / n);
      model.mean_[d] = m;
      model.scale_[d] = sd > 1e-12 ? 1.0 / sd : 1.0;
    }
  }
  std::vector<std::vector<double>> z(features.size(), std::vector<double>(dim));
  for (size_t i = 0; i < features.size(); ++i) {
    for (int64_t d = 0; d < dim; ++d) {
      z[i][d] = (features[i][d] - model.mean_[d]) * model.scale_[d];
    }
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> init(-0.01, 0.01);
  model.weights_.resize(num_classes * dim);
  for (double& w : model.weights_) w = init(rng);
  model.bias_.assign(num_classes, 0.0);

  std::vector<double> grad_w(model.weights_.size());
  std::vector<double> grad_b(num_classes);
  std::vector<double> prob(num_classes);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    for (size_t i = 0; i < z.size(); ++i) {
      double mx = -INFINITY;
      for (int c = 0; c < num_classes; ++c) {
        double s = model.bias_[c];
        for (int64_t d = 0; d < dim; ++d) s += model.weights_[c * dim + d] * z[i][d];
        prob[c] = s;
        mx = std::max(mx, s);
      }
      double total = 0.0;
      for (double& p : prob) total += (p = std::exp(p - mx));
      for (int c = 0; c < num_classes; ++c) {
        const double err = prob[c] / total - (labels[i] == c ? 1.0 : 0.0);
        grad_b[c] += err;
        for (int64_t d = 0; d < dim; ++d) grad_w[c * dim + d] += err * z[i][d];
      }
    }
    for (size_t j = 0; j < grad_w.size(); ++j) {
      model.weights_[j] -=
          config.learning_rate * (grad_w[j] / n + config.l2 * model.weights_[j]);
    }
    for (int c = 0; c < num_classes; ++c) {
      model.bias_[c] -= config.learning_rate * grad_b[c] / n;
    }
  }
  return model;
}

std::vector<double> LogisticRegression::Logits(std::span<const double> features) const {
  if (static_cast<int64_t>(features.size()) != dim_) {
    throw ValidationError("feature vector has wrong length");
  }
  std::vector<double> out(num_classes_);
  for (int c = 0; c < num_classes_; ++c) {
    double s = bias_[c];
    for (int64_t d = 0; d < dim_; ++d) {
      s += weights_[c * dim_ + d] * (features[d] - mean_[d]) * scale_[d];
    }
    out[c] = s;
  }
  return out;
}

int LogisticRegression::Predict(std::span<const double> features) const {
  const auto logits = Logits(features);
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

double LogisticRegression::Accuracy(const std::vector<std::vector<double>>& features,
                                    const std::vector<int>& labels) const {
  if (features.empty()) return 0.0;
  int64_t hits = 0;
  for (size_t i = 0; i < features.size(); ++i) hits += Predict(features[i]) == labels[i];
  return static_cast<double>(hits) / static_cast<double>(features.size());
}

}  // namespace conductance
