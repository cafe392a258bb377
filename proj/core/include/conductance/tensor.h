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

#ifndef CONDUCTANCE_TENSOR_H_
#define CONDUCTANCE_TENSOR_H_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace conductance {

using Shape = std::vector<int64_t>;

// Number of elements described by `shape`. Throws ShapeError on negative
// dimensions.
int64_t NumElements(const Shape& shape);

std::string ShapeToString(const Shape& shape);

// Dense row-major tensor of 64-bit floats.
class Tensor {
 public:
  // A [0]-shaped empty tensor.
  Tensor() : shape_{0} {}

  // Zero-filled tensor of the given shape.
  explicit Tensor(Shape shape);

  // Throws ShapeError unless NumElements(shape) == data.size().
  Tensor(Shape shape, std::vector<double> data);

  static Tensor Scalar(double value) { return Tensor({1}, {value}); }
  static Tensor Vector(std::vector<double> values);
  static Tensor Filled(Shape shape, double value);

  const Shape& shape() const { return shape_; }
  int64_t rank() const { return static_cast<int64_t>(shape_.size()); }
  int64_t dim(int64_t axis) const { return shape_.at(axis); }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }

  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double operator[](int64_t i) const { return data_[i]; }
  double& operator[](int64_t i) { return data_[i]; }

  // Element (r, c) of a rank-2 tensor.
  double at(int64_t r, int64_t c) const { return data_[r * shape_[1] + c]; }
  double& at(int64_t r, int64_t c) { return data_[r * shape_[1] + c]; }

  bool AllFinite() const;

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Elementwise helpers used by the path machinery.
Tensor Subtract(const Tensor& a, const Tensor& b);
// a + alpha * direction.
Tensor Axpy(const Tensor& a, double alpha, const Tensor& direction);
double Dot(const Tensor& a, const Tensor& b);

}  // namespace conductance

#endif  // CONDUCTANCE_TENSOR_H_
