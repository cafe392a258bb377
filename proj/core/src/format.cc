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

#include "conductance/format.h"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>

namespace conductance {
namespace {

void MixU64(uint64_t v, uint64_t& h) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  h = Fnv1a64(buf, h);
}

}  // namespace

std::string FormatDouble(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

uint64_t Fnv1a64(std::span<const unsigned char> bytes, uint64_t seed) {
  uint64_t h = seed;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t Fnv1a64(const std::string& text) {
  return Fnv1a64({reinterpret_cast<const unsigned char*>(text.data()), text.size()});
}

uint64_t HashTensors(std::span<const Tensor> tensors) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const Tensor& t : tensors) {
    MixU64(t.shape().size(), h);
    for (int64_t d : t.shape()) MixU64(static_cast<uint64_t>(d), h);
    for (double v : t.data()) MixU64(std::bit_cast<uint64_t>(v), h);
  }
  return h;
}

std::string HexU64(uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kDigits[value & 0xf];
    value >>= 4;
  }
  return out;
}

}  // namespace conductance
