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


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "conductance/datasets.h"
#include "conductance/errors.h"
#include "conductance/format.h"
#include "conductance/stats.h"
#include "oracles.h"

namespace conductance {
namespace {

TEST(PearsonTest, MatchesTwoPassFormula) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(n(rng));
    y.push_back(0.3 * x.back() + n(rng));
  }
  EXPECT_NEAR(*PearsonCorrelation(x, y), oracle::Pearson(x, y), 1e-12);
}

TEST(PearsonTest, PerfectAndUndefined) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  EXPECT_NEAR(*PearsonCorrelation(x, y), 1.0, 1e-15);
  const std::vector<double> neg{-1, -2, -3, -4};
  EXPECT_NEAR(*PearsonCorrelation(x, neg), -1.0, 1e-15);
  EXPECT_FALSE(PearsonCorrelation(x, std::vector<double>{2, 2, 2, 2}).has_value());
  EXPECT_FALSE(PearsonCorrelation(std::vector<double>{1}, std::vector<double>{1}).has_value());
}

TEST(QuantileTest, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(Quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(Quantile({1, 2, 3, 4, 5}, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(Quantile({7}, 0.75), 7.0);
  EXPECT_DOUBLE_EQ(Mean(std::vector<double>{1, 2, 6}), 3.0);
}

TEST(LogisticTest, SeparatesBlobs) {
  const LabeledDataset d = GenBlobs({.num_classes = 3, .dim = 3, .per_class = 60,
                                     .sigma = 0.5, .seed = 2});
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (int64_t i : d.train) {
    xs.push_back(d.examples[i].features);
    ys.push_back(d.examples[i].label);
  }
  std::vector<std::vector<double>> xe;
  std::vector<int> ye;
  for (int64_t i : d.eval) {
    xe.push_back(d.examples[i].features);
    ye.push_back(d.examples[i].label);
  }
  const LogisticRegression clf = LogisticRegression::Fit(xs, ys, 3);
  EXPECT_GE(clf.Accuracy(xe, ye), 0.97);
}

TEST(LogisticTest, DeterministicUnderSeed) {
  const LabeledDataset d = GenBlobs({.num_classes = 2, .dim = 2, .per_class = 30, .seed = 5});
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (const Example& e : d.examples) {
    xs.push_back(e.features);
    ys.push_back(e.label);
  }
  const auto a = LogisticRegression::Fit(xs, ys, 2, {.seed = 3});
  const auto b = LogisticRegression::Fit(xs, ys, 2, {.seed = 3});
  for (const auto& x : xs) EXPECT_EQ(a.Predict(x), b.Predict(x));
}

TEST(LogisticTest, RejectsBadInput) {
  EXPECT_THROW(LogisticRegression::Fit({}, {}, 2), ValidationError);
  EXPECT_THROW(LogisticRegression::Fit({{1.0}}, {3}, 2), ValidationError);
}

TEST(FormatTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(-0.0), "0");
  EXPECT_EQ(FormatDouble(1.0), "1");
  for (double v : {1.0 / 3.0, 1e-300, 123456789.123456789, -2.5e17}) {
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
}

TEST(FormatTest, Fnv1a64KnownValues) {
  EXPECT_EQ(Fnv1a64(std::string()), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64(std::string("a")), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(HexU64(0xabcULL), "0000000000000abc");
}

}  // namespace
}  // namespace conductance
