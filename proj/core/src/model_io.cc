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

#include "conductance/model_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include "conductance/errors.h"

namespace conductance {
namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int DecodeChar(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

template <typename T>
T Field(const nlohmann::json& doc, const char* key, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw FormatError(where + ": missing field '" + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where + ": bad field '" + key + "': " + e.what());
  }
}

}  // namespace

std::string Base64Encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const uint32_t v = (static_cast<uint8_t>(bytes[i]) << 16) |
                       (static_cast<uint8_t>(bytes[i + 1]) << 8) |
                       static_cast<uint8_t>(bytes[i + 2]);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const size_t rest = bytes.size() - i;
  if (rest > 0) {
    uint32_t v = static_cast<uint8_t>(bytes[i]) << 16;
    if (rest == 2) v |= static_cast<uint8_t>(bytes[i + 1]) << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::string Base64Decode(std::string_view text) {
  if (text.size() % 4 != 0) throw FormatError("base64 length is not a multiple of 4");
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int pad = 0;
    uint32_t v = 0;
    for (size_t j = 0; j < 4; ++j) {
      const char c = text[i + j];
      int d;
      if (c == '=' && last && j >= 2) {
        d = 0;
        ++pad;
      } else {
        if (pad > 0) throw FormatError("base64 data after padding");
        d = DecodeChar(c);
        if (d < 0) throw FormatError("invalid base64 character");
      }
      v = (v << 6) | static_cast<uint32_t>(d);
    }
    out += static_cast<char>((v >> 16) & 0xff);
    if (pad < 2) out += static_cast<char>((v >> 8) & 0xff);
    if (pad < 1) out += static_cast<char>(v & 0xff);
  }
  return out;
}

nlohmann::ordered_json TensorToJson(const Tensor& tensor) {
  std::string bytes(static_cast<size_t>(tensor.size()) * 8, '\0');
  for (int64_t i = 0; i < tensor.size(); ++i) {
    const auto bits = std::bit_cast<uint64_t>(tensor[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  nlohmann::ordered_json doc;
  doc["shape"] = tensor.shape();
  doc["data"] = Base64Encode(bytes);
  return doc;
}

Tensor TensorFromJson(const nlohmann::json& doc) {
  const auto shape = Field<Shape>(doc, "shape", "tensor");
  const std::string bytes = Base64Decode(Field<std::string>(doc, "data", "tensor"));
  if (bytes.size() % 8 != 0) throw FormatError("tensor payload is not a float64 block");
  std::vector<double> data(bytes.size() / 8);
  for (size_t i = 0; i < data.size(); ++i) {
    uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<uint64_t>(static_cast<uint8_t>(bytes[i * 8 + b])) << (8 * b);
    }
    data[i] = std::bit_cast<double>(bits);
  }
  try {
    return Tensor(shape, std::move(data));
  } catch (const ShapeError& e) {
    throw FormatError(std::string("tensor: ") + e.what());
  }
}

std::string SaveGraph(const Graph& graph, const nlohmann::ordered_json& metadata) {
  nlohmann::ordered_json doc;
  doc["format"] = kGraphFormat;
  doc["version"] = kGraphFormatVersion;
  doc["inputs"] = graph.inputs();
  doc["output"] = graph.output();
  auto nodes = nlohmann::ordered_json::array();
  for (const Node& n : graph.nodes()) {
    nlohmann::ordered_json j;
    j["id"] = n.id;
    j["kind"] = OpTypeName(n.op.type);
    j["name"] = n.name;
    j["inputs"] = n.inputs;
    j["shape"] = n.shape;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    switch (n.op.type) {
      case OpType::kClampMax:
      case OpType::kMaxScalar:
      case OpType::kShiftRelu:
        params["scalar"] = n.op.scalar;
        break;
      case OpType::kSelect:
        params["index"] = n.op.index;
        break;
      case OpType::kConv1D:
        params["width"] = n.op.width;
        params["channels"] = n.op.channels;
        break;
      default:
        break;
    }
    j["params"] = std::move(params);
    if (n.op.type == OpType::kConstant) {
      j["trainable"] = n.op.trainable;
      j["value"] = TensorToJson(*n.op.value);
    }
    if (!n.ablated.empty()) j["ablated"] = n.ablated;
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  doc["metadata"] = metadata;
  return doc.dump(1) + "\n";
}

LoadedGraph LoadGraph(std::string_view text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (Field<std::string>(doc, "format", "model") != kGraphFormat) {
    throw FormatError("model: unexpected format tag");
  }
  const int version = Field<int>(doc, "version", "model");
  if (version != kGraphFormatVersion) {
    throw FormatError("model: unsupported version " + std::to_string(version));
  }
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw FormatError("model: missing node array 'nodes'");
  }
  const auto& nodes = doc["nodes"];

  GraphBuilder builder;
  for (size_t pos = 0; pos < nodes.size(); ++pos) {
    const auto& j = nodes[pos];
    const int id = Field<int>(j, "id", "node");
    const std::string where = "node " + std::to_string(id);
    if (id != static_cast<int>(pos)) {
      throw FormatError(where + ": ids must be consecutive from 0");
    }
    OpKind op;
    op.type = OpTypeFromName(Field<std::string>(j, "kind", where));
    const auto params = j.contains("params") ? j["params"] : nlohmann::ordered_json::object();
    if (params.contains("scalar")) op.scalar = Field<double>(params, "scalar", where);
    if (params.contains("index")) op.index = Field<int64_t>(params, "index", where);
    if (params.contains("width")) op.width = Field<int64_t>(params, "width", where);
    if (params.contains("channels")) op.channels = Field<int64_t>(params, "channels", where);
    if (op.type == OpType::kConstant) {
      if (!j.contains("value")) throw FormatError(where + ": missing field 'value'");
      op.value = std::make_shared<const Tensor>(TensorFromJson(j["value"]));
      op.trainable = j.value("trainable", false);
    }
    builder.AddNode(std::move(op), Field<std::vector<NodeId>>(j, "inputs", where),
                    Field<std::string>(j, "name", where), Field<Shape>(j, "shape", where));
    if (j.contains("ablated")) {
      builder.SetAblated(id, Field<std::vector<int64_t>>(j, "ablated", where));
    }
  }
  LoadedGraph out{std::move(builder).Build(Field<NodeId>(doc, "output", "model")),
                  doc.contains("metadata") ? doc["metadata"] : nlohmann::ordered_json::object()};
  if (Field<std::vector<NodeId>>(doc, "inputs", "model") != out.graph.inputs()) {
    throw FormatError("model: input list does not match input nodes");
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

}  // namespace conductance
