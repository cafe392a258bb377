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

#ifndef CONDUCTANCE_MODEL_IO_H_
#define CONDUCTANCE_MODEL_IO_H_

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "conductance/graph.h"
#include "conductance/tensor.h"

namespace conductance {

inline constexpr std::string_view kGraphFormat = "conductance-graph";
inline constexpr int kGraphFormatVersion = 1;

std::string Base64Encode(std::string_view bytes);
// Throws FormatError on characters outside the standard alphabet or bad
// padding.
std::string Base64Decode(std::string_view text);

// {"shape": [...], "data": base64 of little-endian float64}.
nlohmann::ordered_json TensorToJson(const Tensor& tensor);
Tensor TensorFromJson(const nlohmann::json& doc);

// Self-describing text document:
//   {"format", "version", "inputs", "output",
//    "nodes": [{"id", "kind", "name", "inputs", "shape", "params",
//               "value"?, "trainable"?, "ablated"?}],
//    "metadata": {...}}
// Saving, loading and saving again reproduces the same bytes.
std::string SaveGraph(const Graph& graph,
                      const nlohmann::ordered_json& metadata = nlohmann::ordered_json::object());

struct LoadedGraph {
  Graph graph;
  nlohmann::ordered_json metadata;
};

// Rebuilds through GraphBuilder so every node is shape-checked again.
// Throws FormatError (or ShapeError / GraphError) on malformed documents.
LoadedGraph LoadGraph(std::string_view text);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace conductance

#endif  // CONDUCTANCE_MODEL_IO_H_
