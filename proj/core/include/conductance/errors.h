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

#ifndef CONDUCTANCE_ERRORS_H_
#define CONDUCTANCE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace conductance {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape inference or input-shape validation failed.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Structural problem with a graph, node reference, cut or group.
class GraphError : public Error {
 public:
  using Error::Error;
};

// A non-finite value appeared (forward pass, loss, report).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Bad user-supplied argument or configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed model, dataset or report file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace conductance

#endif  // CONDUCTANCE_ERRORS_H_
