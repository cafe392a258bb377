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

#include "conductance/zoo.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include <nlohmann/json.hpp>

#include "conductance/autodiff.h"
#include "conductance/errors.h"
#include "conductance/model_io.h"

namespace conductance {
namespace {

Tensor Uniform(Shape shape, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-limit, limit);
  Tensor t(std::move(shape));
  for (double& v : t.mutable_data()) v = d(rng);
  return t;
}

double GlorotLimit(int64_t fan_in, int64_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Tensor Scalar2D(double v) { return Tensor({1, 1}, {v}); }

// Logits -> Select(class 0) and the standard single-unit cuts.
ZooModel Finish(std::string name, GraphBuilder&& b, NodeId logits, int num_classes) {
  const NodeId out = b.Select(logits, 0, "output");
  ZooModel m;
  m.name = std::move(name);
  m.graph = std::move(b).Build(out);
  m.logits = logits;
  m.num_classes = num_classes;
  return m;
}

LayerCut NodeCut(const Graph& g, const std::string& cut_name,
                 const std::vector<std::string>& nodes) {
  std::vector<NodeId> ids;
  for (const auto& n : nodes) ids.push_back(g.NodeByName(n));
  return LayerCut::WholeNodes(g, cut_name, ids);
}

GoldenCheck Check(std::string name, std::string method, UnitKey unit, double input,
                  double expected, double tolerance) {
  return {std::move(name), std::move(method), unit, {input}, {0.0}, expected, tolerance};
}

std::vector<Tensor> Reshape(const Graph& graph, const std::vector<double>& flat) {
  if (graph.inputs().size() != 1) {
    throw ValidationError("golden checks need a single-input graph");
  }
  return {Tensor(graph.node(graph.inputs()[0]).shape, flat)};
}

nlohmann::ordered_json CheckToJson(const GoldenCheck& c) {
  return {{"name", c.name},       {"method", c.method},     {"node", c.unit.node},
          {"index", c.unit.index}, {"input", c.input},      {"baseline", c.baseline},
          {"expected", c.expected}, {"tolerance", c.tolerance}};
}

}  // namespace

Graph ZooModel::ForClass(int label) const {
  if (label < 0 || label >= num_classes) {
    throw ValidationError("class " + std::to_string(label) + " outside [0, " +
                          std::to_string(num_classes) + ")");
  }
  return graph.WithSelectOutput(logits, label);
}

const LayerCut& ZooModel::Cut(std::string_view cut_name) const {
  for (const LayerCut& c : cuts) {
    if (c.name() == cut_name) return c;
  }
  throw ValidationError("model '" + name + "' has no cut '" + std::string(cut_name) + "'");
}

const NeuronGroup& ZooModel::Group(std::string_view group_name) const {
  for (const NeuronGroup& g : groups) {
    if (g.name() == group_name) return g;
  }
  throw ValidationError("model '" + name + "' has no group '" + std::string(group_name) + "'");
}

std::vector<Tensor> ZooModel::Embed(std::span<const int32_t> tokens) const {
  if (!embedding) throw ValidationError("model '" + name + "' has no embedding table");
  const Shape& in_shape = graph.node(graph.inputs().at(0)).shape;
  if (static_cast<int64_t>(tokens.size()) != in_shape[0]) {
    throw ValidationError("expected " + std::to_string(in_shape[0]) + " tokens, got " +
                          std::to_string(tokens.size()));
  }
  const int64_t vocab = embedding->dim(0);
  const int64_t dim = embedding->dim(1);
  Tensor out(in_shape);
  for (size_t t = 0; t < tokens.size(); ++t) {
    if (tokens[t] < 0 || tokens[t] >= vocab) {
      throw ValidationError("token id " + std::to_string(tokens[t]) + " outside vocabulary");
    }
    for (int64_t d = 0; d < dim; ++d) out.at(t, d) = embedding->at(tokens[t], d);
  }
  return {std::move(out)};
}

std::vector<Tensor> ZooModel::InputsFor(const Example& example) const {
  if (embedding) return Embed(example.tokens);
  return Reshape(graph, example.features);
}

std::vector<Tensor> ZooModel::ZeroBaseline() const {
  std::vector<Tensor> out;
  for (NodeId in : graph.inputs()) out.emplace_back(graph.node(in).shape);
  return out;
}

std::vector<double> ZooModel::Logits(const std::vector<Tensor>& inputs) const {
  return Forward(graph, inputs).at(logits).values();
}

int ZooModel::Predict(const std::vector<Tensor>& inputs) const {
  const auto scores = Logits(inputs);
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

ZooModel SaturationNet() {
  GraphBuilder b;
  const NodeId x = b.Input("x", {1});
  const NodeId y = b.MatMul(x, b.Constant("y.w", Scalar2D(2.0)), "y");
  const NodeId z = b.ClampMax(y, 1.0, "z");
  ZooModel m = Finish("saturation", std::move(b), z, 1);
  m.cuts = {NodeCut(m.graph, "y", {"y"}), NodeCut(m.graph, "z", {"z"})};
  m.groups = {NeuronGroup("y", {{y, 0}})};
  m.golden_checks = {
      Check("saturation/conductance_y", "conductance", {y, 0}, 1.0, 1.0, 2e-3),
      Check("saturation/gradact_y", "gradact", {y, 0}, 1.0, 0.0, 0.0),
      Check("saturation/influence_y", "influence", {y, 0}, 1.0, 0.5, 2e-3),
  };
  return m;
}

ZooModel OvershootNet(double epsilon) {
  GraphBuilder b;
  const NodeId x = b.Input("x", {1});
  const NodeId f = b.MatMul(x, b.Constant("f.w", Scalar2D(1.0)), "f");
  const NodeId g = b.ShiftRelu(f, 1.0, "g");
  ZooModel m = Finish("overshoot", std::move(b), g, 1);
  m.cuts = {NodeCut(m.graph, "f", {"f"}), NodeCut(m.graph, "g", {"g"})};
  m.groups = {NeuronGroup("f", {{f, 0}})};
  const double x_in = 1.0 - epsilon;
  m.golden_checks = {
      Check("overshoot/output", "output", {f, 0}, x_in, 0.0, 0.0),
      Check("overshoot/conductance_f", "conductance", {f, 0}, x_in, 0.0, 0.0),
      Check("overshoot/conductance_g", "conductance", {g, 0}, x_in, 0.0, 0.0),
      Check("overshoot/activation_f", "activation", {f, 0}, x_in, x_in, 0.0),
  };
  return m;
}

ZooModel PolarityNet() {
  GraphBuilder b;
  const NodeId x = b.Input("x", {1});
  const NodeId f = b.Neg(x, "f");
  const NodeId g = b.MatMul(f, b.Constant("g.w", Scalar2D(1.0)), "g");
  ZooModel m = Finish("polarity", std::move(b), g, 1);
  m.cuts = {NodeCut(m.graph, "f", {"f"}), NodeCut(m.graph, "g", {"g"})};
  m.groups = {NeuronGroup("g", {{g, 0}})};
  m.golden_checks = {
      Check("polarity/output", "output", {g, 0}, 1.0, -1.0, 0.0),
      Check("polarity/influence_g", "influence", {g, 0}, 1.0, 1.0, 1e-9),
      Check("polarity/conductance_g", "conductance", {g, 0}, 1.0, -1.0, 1e-9),
  };
  return m;
}

std::string_view HiddenFnName(HiddenFn fn) {
  switch (fn) {
    case HiddenFn::kIdentity:
      return "identity";
    case HiddenFn::kSquare:
      return "square";
    case HiddenFn::kSigmoid:
      return "sigmoid";
  }
  return "?";
}

double ApplyHiddenFn(HiddenFn fn, double x) {
  switch (fn) {
    case HiddenFn::kIdentity:
      return x;
    case HiddenFn::kSquare:
      return x * x;
    case HiddenFn::kSigmoid:
      return 1.0 / (1.0 + std::exp(-x));
  }
  return 0.0;
}

ZooModel LinearComboNet(double a, double b_coef, HiddenFn f1, HiddenFn f2, double probe) {
  GraphBuilder b;
  const NodeId x = b.Input("x", {1});
  auto hidden = [&](HiddenFn fn, const std::string& name) {
    switch (fn) {
      case HiddenFn::kIdentity:
        return b.MatMul(x, b.Constant(name + ".w", Scalar2D(1.0)), name);
      case HiddenFn::kSquare:
        return b.Mul(x, x, name);
      case HiddenFn::kSigmoid:
        return b.Sigmoid(x, name);
    }
    throw ValidationError("unknown hidden function");
  };
  const NodeId h1 = hidden(f1, "f1");
  const NodeId h2 = hidden(f2, "f2");
  const NodeId both = b.Concat({h1, h2}, "hidden");
  const NodeId logits = b.MatMul(both, b.Constant("mix.w", Tensor({2, 1}, {a, b_coef})), "mix");
  ZooModel m = Finish("linear_combo", std::move(b), logits, 1);
  m.cuts = {NodeCut(m.graph, "hidden", {"f1", "f2"})};
  m.groups = {NeuronGroup("f1", {{h1, 0}}), NeuronGroup("f2", {{h2, 0}})};
  const double expected = a * (ApplyHiddenFn(f1, probe) - ApplyHiddenFn(f1, 0.0));
  m.golden_checks = {
      Check("linear_combo/conductance_f1", "conductance", {h1, 0}, probe, expected, 1e-6)};
  return m;
}

ZooModel ToyTextCnn(const TextCnnConfig& cfg) {
  if (cfg.widths.empty() || cfg.maps_per_width < 1 || cfg.classes < 2) {
    throw ValidationError("text CNN needs widths, >= 1 map per width and >= 2 classes");
  }
  std::mt19937_64 rng(cfg.seed);
  GraphBuilder b;
  const NodeId x = b.Input("embedded", {cfg.seq_len, cfg.embed_dim});
  std::vector<NodeId> pools;
  for (int w : cfg.widths) {
    const std::string p = "conv" + std::to_string(w);
    const NodeId kernel = b.Constant(
        p + ".w",
        Uniform({w, cfg.embed_dim, cfg.maps_per_width},
                GlorotLimit(w * cfg.embed_dim, cfg.maps_per_width), rng),
        true);
    const NodeId bias = b.Constant(p + ".b", Tensor({cfg.maps_per_width}), true);
    const NodeId conv = b.Conv1D(x, kernel, p);
    const NodeId act = b.Relu(b.Add(conv, bias, p + ".pre"), p + ".relu");
    pools.push_back(b.MaxPoolGlobal(act, "pool" + std::to_string(w)));
  }
  const NodeId pooled = b.Concat(pools, "pooled");
  const int64_t n_filters = b.shape(pooled)[0];
  const NodeId w1 = b.Constant("dense.w",
                               Uniform({n_filters, cfg.dense_dim},
                                       GlorotLimit(n_filters, cfg.dense_dim), rng),
                               true);
  const NodeId b1 = b.Constant("dense.b", Tensor({cfg.dense_dim}), true);
  const NodeId dense = b.Relu(b.Add(b.MatMul(pooled, w1), b1, "dense.pre"), "dense");
  const NodeId w2 = b.Constant(
      "logits.w",
      Uniform({cfg.dense_dim, cfg.classes}, GlorotLimit(cfg.dense_dim, cfg.classes), rng), true);
  const NodeId b2 = b.Constant("logits.b", Tensor({cfg.classes}), true);
  const NodeId logits = b.Add(b.MatMul(dense, w2), b2, "logits");

  ZooModel m = Finish("text_cnn", std::move(b), logits, cfg.classes);
  m.embedding = Uniform({cfg.vocab, cfg.embed_dim}, 1.0, rng);
  m.cuts = {NodeCut(m.graph, "pooled", {"pooled"}), LayerCut::WholeNodes(m.graph, "pools", pools),
            NodeCut(m.graph, "dense", {"dense"})};
  int64_t unit = 0;
  for (int w : cfg.widths) {
    for (int k = 0; k < cfg.maps_per_width; ++k) {
      m.groups.emplace_back("conv-w" + std::to_string(w) + "-filter-" + std::to_string(k),
                            std::vector<UnitKey>{{pooled, unit++}});
    }
  }
  return m;
}

ZooModel ToyMlp(const MlpConfig& cfg) {
  if (cfg.hidden.empty() || cfg.classes < 2) {
    throw ValidationError("MLP needs at least one hidden layer and two classes");
  }
  std::mt19937_64 rng(cfg.seed);
  GraphBuilder b;
  NodeId h = b.Input("x", {cfg.in_dim});
  int64_t width = cfg.in_dim;
  std::vector<std::string> layer_names;
  for (size_t l = 0; l < cfg.hidden.size(); ++l) {
    const std::string p = "h" + std::to_string(l + 1);
    const NodeId w = b.Constant(
        p + ".w", Uniform({width, cfg.hidden[l]}, GlorotLimit(width, cfg.hidden[l]), rng), true);
    const NodeId bias = b.Constant(p + ".b", Tensor::Filled({cfg.hidden[l]}, 0.01), true);
    h = b.Relu(b.Add(b.MatMul(h, w), bias, p + ".pre"), p);
    width = cfg.hidden[l];
    layer_names.push_back(p);
  }
  const NodeId w = b.Constant(
      "logits.w", Uniform({width, cfg.classes}, GlorotLimit(width, cfg.classes), rng), true);
  const NodeId bias = b.Constant("logits.b", Tensor({cfg.classes}), true);
  const NodeId logits = b.Add(b.MatMul(h, w), bias, "logits");

  ZooModel m = Finish("mlp", std::move(b), logits, cfg.classes);
  for (const auto& p : layer_names) m.cuts.push_back(NodeCut(m.graph, p, {p}));
  const NodeId h1 = m.graph.NodeByName("h1");
  for (int k = 0; k < cfg.hidden[0]; ++k) {
    m.groups.emplace_back("h1-unit-" + std::to_string(k), std::vector<UnitKey>{{h1, k}});
  }
  return m;
}

ZooModel ToyLinearNet(int in_dim, int hidden, int classes, uint64_t seed) {
  std::mt19937_64 rng(seed);
  GraphBuilder b;
  const NodeId x = b.Input("x", {in_dim});
  const NodeId h = b.MatMul(x, b.Constant("h.w", Uniform({in_dim, hidden}, 1.0, rng), true), "h");
  const NodeId logits =
      b.MatMul(h, b.Constant("logits.w", Uniform({hidden, classes}, 1.0, rng), true), "logits");
  ZooModel m = Finish("linear", std::move(b), logits, classes);
  m.cuts = {NodeCut(m.graph, "h", {"h"})};
  for (int k = 0; k < hidden; ++k) {
    m.groups.emplace_back("h-unit-" + std::to_string(k), std::vector<UnitKey>{{h, k}});
  }
  return m;
}

ZooModel PlantedSelectionMlp(int classes, int in_dim, double separation, uint64_t seed) {
  constexpr int kWide = 16;
  constexpr int kNarrow = 8;
  if (classes < 2 || classes > kNarrow || in_dim < classes) {
    throw ValidationError("planted MLP needs 2 <= classes <= 8 and in_dim >= classes");
  }
  ZooModel m = ToyMlp({.in_dim = in_dim, .hidden = {kWide, kNarrow}, .classes = classes,
                       .seed = seed});
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);

  Tensor w1({in_dim, kWide});
  Tensor b1({kWide});
  for (int c = 0; c < classes; ++c) {
    w1.at(c, c) = 1.0;
    b1[c] = -separation / 2.0;
  }
  for (int j = classes; j < kWide; ++j) {
    for (int d = classes; d < in_dim; ++d) w1.at(d, j) = jitter(rng);
    b1[j] = 5.0 + 0.1 * j;
  }
  Tensor w2({kWide, kNarrow});
  for (int c = 0; c < classes; ++c) w2.at(c, c) = 1.0;
  Tensor w3({kNarrow, classes});
  for (int c = 0; c < classes; ++c) w3.at(c, c) = 2.0;

  m.graph = m.graph.WithConstants({{"h1.w", w1},
                                   {"h1.b", b1},
                                   {"h2.w", w2},
                                   {"h2.b", Tensor({kNarrow})},
                                   {"logits.w", w3},
                                   {"logits.b", Tensor({classes})}});
  m.name = "planted_mlp";
  return m;
}

std::vector<GoldenOutcome> RunGoldenChecks(const ZooModel& model) {
  std::vector<GoldenOutcome> out;
  for (const GoldenCheck& c : model.golden_checks) {
    GoldenOutcome o{model.name, c.name, c.expected, 0.0, c.tolerance, false};
    const std::vector<Tensor> input = Reshape(model.graph, c.input);
    if (c.method == "output") {
      o.actual = Forward(model.graph, input).output(model.graph);
    } else {
      const Method method = ParseMethod(c.method);
      const LayerCut cut =
          LayerCut::Create(model.graph, c.name, {{c.unit.node, c.unit.index, c.unit.index + 1}});
      const PathSpec path(Reshape(model.graph, c.baseline), input, kGoldenSteps);
      o.actual = Attribute(method, model.graph, path, cut).Score(c.unit);
    }
    o.passed = c.tolerance == 0.0 ? o.actual == c.expected
                                  : std::abs(o.actual - c.expected) <= c.tolerance;
    out.push_back(o);
  }
  return out;
}

std::vector<std::string> ZooNames() {
  return {"saturation", "overshoot", "polarity", "linear_combo", "text_cnn",
          "mlp",        "linear",    "planted_mlp"};
}

ZooModel BuildZooModel(std::string_view name, uint64_t seed) {
  if (name == "saturation") return SaturationNet();
  if (name == "overshoot") return OvershootNet();
  if (name == "polarity") return PolarityNet();
  if (name == "linear_combo") {
    return LinearComboNet(2.0, -3.0, HiddenFn::kSquare, HiddenFn::kSigmoid);
  }
  if (name == "text_cnn") return ToyTextCnn({.seed = seed});
  if (name == "mlp") return ToyMlp({.seed = seed});
  if (name == "linear") return ToyLinearNet(6, 6, 2, seed);
  if (name == "planted_mlp") return PlantedSelectionMlp(5, 10, 4.0, seed);
  throw ValidationError("unknown zoo model '" + std::string(name) + "'");
}

std::string SaveModel(const ZooModel& model) {
  nlohmann::ordered_json zoo;
  zoo["name"] = model.name;
  zoo["logits"] = model.logits;
  zoo["num_classes"] = model.num_classes;
  zoo["embedding"] = model.embedding ? TensorToJson(*model.embedding) : nlohmann::ordered_json();
  auto cuts = nlohmann::ordered_json::array();
  for (const LayerCut& c : model.cuts) {
    auto members = nlohmann::ordered_json::array();
    for (const CutSlice& s : c.members()) members.push_back({s.node, s.begin, s.end});
    cuts.push_back({{"name", c.name()}, {"members", std::move(members)}});
  }
  zoo["cuts"] = std::move(cuts);
  auto groups = nlohmann::ordered_json::array();
  for (const NeuronGroup& g : model.groups) {
    auto members = nlohmann::ordered_json::array();
    for (const UnitKey& u : g.members()) members.push_back({u.node, u.index});
    groups.push_back({{"name", g.name()}, {"members", std::move(members)}});
  }
  zoo["groups"] = std::move(groups);
  auto checks = nlohmann::ordered_json::array();
  for (const GoldenCheck& c : model.golden_checks) checks.push_back(CheckToJson(c));
  zoo["golden_checks"] = std::move(checks);
  nlohmann::ordered_json meta;
  meta["zoo"] = std::move(zoo);
  return SaveGraph(model.graph, meta);
}

ZooModel LoadModel(std::string_view text) {
  LoadedGraph loaded = LoadGraph(text);
  if (!loaded.metadata.contains("zoo")) throw FormatError("model file has no zoo metadata");
  const auto& zoo = loaded.metadata["zoo"];
  ZooModel m;
  m.graph = std::move(loaded.graph);
  try {
    m.name = zoo.at("name").get<std::string>();
    m.logits = zoo.at("logits").get<NodeId>();
    m.num_classes = zoo.at("num_classes").get<int>();
    if (!zoo.at("embedding").is_null()) m.embedding = TensorFromJson(zoo["embedding"]);
    for (const auto& c : zoo.at("cuts")) {
      std::vector<CutSlice> members;
      for (const auto& s : c.at("members")) {
        members.push_back({s.at(0).get<NodeId>(), s.at(1).get<int64_t>(), s.at(2).get<int64_t>()});
      }
      m.cuts.push_back(LayerCut::Create(m.graph, c.at("name").get<std::string>(), members));
    }
    for (const auto& g : zoo.at("groups")) {
      std::vector<UnitKey> members;
      for (const auto& u : g.at("members")) {
        members.push_back({u.at(0).get<NodeId>(), u.at(1).get<int64_t>()});
      }
      m.groups.emplace_back(g.at("name").get<std::string>(), std::move(members));
    }
    for (const auto& c : zoo.at("golden_checks")) {
      m.golden_checks.push_back({c.at("name").get<std::string>(),
                                 c.at("method").get<std::string>(),
                                 {c.at("node").get<NodeId>(), c.at("index").get<int64_t>()},
                                 c.at("input").get<std::vector<double>>(),
                                 c.at("baseline").get<std::vector<double>>(),
                                 c.at("expected").get<double>(),
                                 c.at("tolerance").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad zoo metadata: ") + e.what());
  }
  if (!m.graph.Contains(m.logits)) throw FormatError("zoo metadata: logits node missing");
  return m;
}

}  // namespace conductance
