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

#ifndef CONDUCTANCE_FORMAT_H_
#define CONDUCTANCE_FORMAT_H_

#include <cstdint>
#include <span>
#include <string>

#include "conductance/tensor.h"

namespace conductance {

// Shortest decimal text that parses back to exactly `value`.
std::string FormatDouble(double value);

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::span<const unsigned char> bytes, uint64_t seed = 0xcbf29ce484222325ULL);
uint64_t Fnv1a64(const std::string& text);

// Hash of shapes and little-endian float64 payloads.
uint64_t HashTensors(std::span<const Tensor> tensors);

// 16-digit lowercase hex.
std::string HexU64(uint64_t value);

}  // namespace conductance

#endif  // CONDUCTANCE_FORMAT_H_
