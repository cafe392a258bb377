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


#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <cmath>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "conductance/attribution.h"
#include "conductance/autodiff.h"
#include "conductance/cut.h"
#include "conductance/datasets.h"
#include "conductance/errors.h"
#include "conductance/evaluation.h"
#include "conductance/format.h"
#include "conductance/layer_analysis.h"
#include "conductance/model_io.h"
#include "conductance/parallel.h"
#include "conductance/train.h"
#include "conductance/zoo.h"

namespace conductance::cli {
namespace {

using Json = nlohmann::ordered_json;

struct Globals {
  std::optional<uint64_t> seed;
  int threads = 1;
};

uint64_t ParseU64(std::string_view text, std::string_view what) {
  uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ValidationError(std::string(what) + " is not an unsigned integer: '" +
                          std::string(text) + "'");
  }
  return v;
}

uint64_t EffectiveSeed(const Globals& g) {
  if (g.seed) return *g.seed;
  if (const char* env = std::getenv("CONDUCTANCE_SEED"); env != nullptr && *env != '\0') {
    return ParseU64(env, "CONDUCTANCE_SEED");
  }
  return 0;
}

std::vector<std::string> SplitList(std::string_view text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = text.find(',', start);
    const size_t end = comma == std::string_view::npos ? text.size() : comma;
    out.emplace_back(text.substr(start, end - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<int> ParseIntList(std::string_view text, std::string_view what) {
  std::vector<int> out;
  for (const std::string& item : SplitList(text)) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ValidationError(std::string(what) + " has a non-integer entry: '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<Method> ParseMethods(std::string_view text) {
  std::vector<Method> out;
  for (const std::string& item : SplitList(text)) out.push_back(ParseMethod(item));
  return out;
}

std::string ReadInput(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ValidationError("no such file: " + path);
  }
  return ReadFile(path);
}

ZooModel LoadModelFile(const std::string& path) { return LoadModel(ReadInput(path)); }

LabeledDataset LoadDataFile(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw ValidationError("no such file: " + path);
  return LoadJsonlFile(path);
}

// {"values": [...]} for vector models or {"tokens": [...]} for token models.
std::vector<Tensor> ParsePoint(const ZooModel& model, const std::string& text,
                               const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(origin + ": " + e.what());
  }
  Example ex;
  try {
    if (doc.contains("tokens")) {
      ex.tokens = doc.at("tokens").get<std::vector<int32_t>>();
    } else if (doc.contains("values")) {
      ex.features = doc.at("values").get<std::vector<double>>();
    } else {
      throw FormatError(origin + ": expected field 'values' or 'tokens'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(origin + ": " + e.what());
  }
  if (doc.contains("tokens") != model.embedding.has_value()) {
    throw ValidationError(origin + ": model '" + model.name + "' takes " +
                          (model.embedding ? "'tokens'" : "'values'"));
  }
  return model.InputsFor(ex);
}

std::vector<int64_t> SelectSplit(const LabeledDataset& data, const std::string& split,
                                 int64_t limit) {
  std::vector<int64_t> idx;
  if (split == "eval") {
    idx = data.eval;
  } else if (split == "train") {
    idx = data.train;
  } else if (split == "all") {
    for (size_t i = 0; i < data.examples.size(); ++i) idx.push_back(static_cast<int64_t>(i));
  } else {
    throw ValidationError("unknown split '" + split + "' (expected eval, train or all)");
  }
  if (limit < 0) throw ValidationError("--limit must be >= 0");
  if (limit > 0 && static_cast<int64_t>(idx.size()) > limit) idx.resize(limit);
  if (idx.empty()) throw ValidationError("split '" + split + "' is empty");
  return idx;
}

void CheckDataMatchesModel(const ZooModel& model, const LabeledDataset& data) {
  data.Validate();
  const bool tokens = data.kind == DatasetKind::kTokens;
  if (tokens != model.embedding.has_value()) {
    throw ValidationError("dataset kind does not match model '" + model.name + "'");
  }
  if (data.num_classes != model.num_classes) {
    throw ValidationError("dataset has " + std::to_string(data.num_classes) +
                          " classes but model '" + model.name + "' has " +
                          std::to_string(model.num_classes));
  }
}

Json FileRef(const std::string& path) {
  return {{"path", path}, {"fnv1a64", HexU64(Fnv1a64(ReadFile(path)))}};
}

void WriteReport(const std::string& path, const std::string& text, std::ostream& out) {
  WriteFile(path, text);
  out << "wrote " << path << "\n";
}

// Merges CLI-level settings into a report's "config" block.
std::string WithCliConfig(const std::string& report_json, const Json& cli) {
  Json doc = Json::parse(report_json);
  doc["config"]["cli"] = cli;
  return doc.dump(2) + "\n";
}

// ---- zoo -------------------------------------------------------------------

struct ZooArgs {
  std::string name;
  std::string out;
  bool all = false;
  std::string dir;
};

int RunZooList(std::ostream& out) {
  for (const std::string& n : ZooNames()) out << n << "\n";
  return kExitOk;
}

int RunZooBuild(const ZooArgs& a, const Globals& g, std::ostream& out) {
  const uint64_t seed = EffectiveSeed(g);
  if (a.all) {
    if (a.dir.empty()) throw ValidationError("--all requires --dir");
    std::filesystem::create_directories(a.dir);
    for (const std::string& n : ZooNames()) {
      WriteReport((std::filesystem::path(a.dir) / (n + ".json")).string(),
                  SaveModel(BuildZooModel(n, seed)), out);
    }
    return kExitOk;
  }
  if (a.name.empty() || a.out.empty()) throw ValidationError("zoo build needs --name and --out");
  WriteReport(a.out, SaveModel(BuildZooModel(a.name, seed)), out);
  return kExitOk;
}

// ---- gen-data --------------------------------------------------------------

struct GenDataArgs {
  std::string kind = "sentiment";
  std::string out;
  BlobSpec blobs;
  SyntheticSentimentSpec sentiment;
};

int RunGenData(GenDataArgs a, const Globals& g, std::ostream& out) {
  const uint64_t seed = EffectiveSeed(g);
  LabeledDataset data;
  if (a.kind == "blobs") {
    a.blobs.seed = seed;
    data = GenBlobs(a.blobs);
  } else if (a.kind == "sentiment") {
    a.sentiment.seed = seed;
    data = GenSentiment(a.sentiment);
  } else {
    throw ValidationError("unknown dataset kind '" + a.kind + "' (expected blobs or sentiment)");
  }
  SaveJsonl(a.out, data);
  out << "wrote " << a.out << " (" << data.examples.size() << " examples)\n";
  return kExitOk;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string model;
  std::string data;
  std::string out;
  std::string report;
  TrainConfig config;
};

int RunTrain(TrainArgs a, const Globals& g, std::ostream& out) {
  a.config.seed = EffectiveSeed(g);
  if (a.config.epochs < 0) throw ValidationError("--epochs must be >= 0");
  if (a.config.batch_size < 1) throw ValidationError("--batch must be >= 1");
  const ZooModel model = LoadModelFile(a.model);
  const LabeledDataset data = LoadDataFile(a.data);
  CheckDataMatchesModel(model, data);
  TrainReport tr;
  const ZooModel trained = Train(model, data, a.config, &tr);
  Json doc;
  doc["config"] = {{"model", FileRef(a.model)},
                   {"data", FileRef(a.data)},
                   {"seed", a.config.seed},
                   {"epochs", a.config.epochs},
                   {"learning_rate", a.config.learning_rate},
                   {"batch_size", a.config.batch_size},
                   {"momentum", a.config.momentum}};
  doc["train_accuracy"] = tr.train_accuracy;
  doc["eval_accuracy"] = data.eval.empty() ? Json() : Json(Accuracy(trained, data, data.eval));
  doc["final_loss"] = tr.final_loss;
  WriteReport(a.out, SaveModel(trained), out);
  const std::string text = doc.dump(2) + "\n";
  if (a.report.empty()) {
    out << text;
  } else {
    WriteReport(a.report, text, out);
  }
  return kExitOk;
}

// ---- attribute -------------------------------------------------------------

struct AttributeArgs {
  std::string model;
  std::string input;
  std::string method = "conductance";
  std::string baseline = "zero";
  int steps = 128;
  std::string rule = "midpoint";
  std::string layer;
  std::string group;
  int target = 0;
  std::string out;
};

void CheckFinite(const AttributionResult& r) {
  for (const auto& [unit, score] : r.unit_scores) {
    if (!std::isfinite(score)) throw NumericalError("non-finite attribution score");
  }
  if (r.per_variable) {
    for (double v : *r.per_variable) {
      if (!std::isfinite(v)) throw NumericalError("non-finite attribution score");
    }
  }
}

int RunAttribute(const AttributeArgs& a, const Globals& g, std::ostream& out) {
  const Method method = ParseMethod(a.method);
  const QuadratureRule rule = ParseRule(a.rule);
  if (a.steps < 1) throw ValidationError("--steps must be >= 1");
  if (!a.layer.empty() && !a.group.empty()) {
    throw ValidationError("--layer and --group are mutually exclusive");
  }
  const ZooModel model = LoadModelFile(a.model);
  if (a.target < 0 || a.target >= model.num_classes) {
    throw ValidationError("--target " + std::to_string(a.target) + " outside [0, " +
                          std::to_string(model.num_classes) + ")");
  }
  const Graph graph = model.ForClass(a.target);
  const std::vector<Tensor> x = ParsePoint(model, ReadInput(a.input), a.input);
  const std::vector<Tensor> baseline =
      a.baseline == "zero" ? model.ZeroBaseline()
                           : ParsePoint(model, ReadInput(a.baseline), a.baseline);
  const PathSpec path(baseline, x, a.steps, rule);

  AttributionResult result;
  std::optional<LayerCut> cut;
  std::optional<NeuronGroup> group;
  if (method == Method::kIntegratedGradients) {
    if (!a.layer.empty() || !a.group.empty()) {
      throw ValidationError("--layer/--group do not apply to method 'ig'");
    }
    result = IntegratedGradients(graph, path, g.threads);
  } else {
    if (!a.group.empty()) {
      group = model.Group(a.group);
      cut = CutFromGroups(graph, a.group, {*group});
    } else if (!a.layer.empty()) {
      const auto it = std::find_if(model.cuts.begin(), model.cuts.end(),
                                   [&](const LayerCut& c) { return c.name() == a.layer; });
      if (it != model.cuts.end()) {
        cut = *it;
      } else {
        const std::optional<NodeId> id = graph.FindNode(a.layer);
        if (!id) throw ValidationError("no cut or node named '" + a.layer + "'");
        cut = LayerCut::WholeNodes(graph, a.layer, {*id});
      }
    } else if (!model.cuts.empty()) {
      cut = model.cuts.front();
    } else {
      throw ValidationError("model '" + model.name + "' declares no cut; pass --layer");
    }
    result = Attribute(method, graph, path, *cut, g.threads);
  }
  CheckFinite(result);

  std::string csv = AttributionToCsv(result, graph);
  Json doc = Json::parse(AttributionToJson(result, graph));
  doc["config"] = {{"model", FileRef(a.model)},
                   {"input", FileRef(a.input)},
                   {"baseline", a.baseline == "zero" ? Json("zero") : FileRef(a.baseline)},
                   {"method", a.method},
                   {"steps", a.steps},
                   {"rule", a.rule},
                   {"cut", cut ? Json(cut->name()) : Json()},
                   {"target", a.target},
                   {"seed", EffectiveSeed(g)}};

  std::string summary;
  if (group) {
    const double total = GroupScores(result, {*group}).front().score;
    doc["group"] = {{"name", group->name()}, {"score", total}};
    summary += "# group " + group->name() + " score=" + FormatDouble(total) + "\n";
  }
  const bool complete_cut = method == Method::kConductance && cut && cut->separating();
  if (method == Method::kIntegratedGradients || complete_cut) {
    const CompletenessCheck c = CheckCompleteness(graph, path, result);
    doc["completeness"] = {{"attributed", c.attributed},
                           {"delta", c.delta},
                           {"residual", c.residual},
                           {"relative", c.relative}};
    summary += "# completeness attributed=" + FormatDouble(c.attributed) +
               " delta=" + FormatDouble(c.delta) + " residual=" + FormatDouble(c.residual) +
               " relative=" + FormatDouble(c.relative) + "\n";
  }
  if (a.out.empty()) {
    out << csv << summary;
  } else {
    WriteReport(a.out + ".csv", csv, out);
    WriteReport(a.out + ".json", doc.dump(2) + "\n", out);
    out << summary;
  }
  return kExitOk;
}

// ---- studies ---------------------------------------------------------------

struct StudyArgs {
  std::string model;
  std::string data;
  std::string split = "eval";
  int64_t limit = 0;
  std::string methods = "conductance,influence,activation,gradact";
  int steps = 128;
  std::string rule = "midpoint";
  std::string out;
};

Json StudyCliConfig(const StudyArgs& a, const Globals& g) {
  return {{"model", FileRef(a.model)},
          {"data", FileRef(a.data)},
          {"split", a.split},
          {"limit", a.limit},
          {"seed", EffectiveSeed(g)}};
}

int RunAblationStudy(const StudyArgs& a, int top_k, const Globals& g, std::ostream& out) {
  AblationStudyOptions opts;
  opts.methods = ParseMethods(a.methods);
  opts.top_k = top_k;
  opts.steps = a.steps;
  opts.rule = ParseRule(a.rule);
  opts.threads = g.threads;
  if (a.steps < 1) throw ValidationError("--steps must be >= 1");
  if (top_k < 1) throw ValidationError("--top-k must be >= 1");
  const ZooModel model = LoadModelFile(a.model);
  const LabeledDataset data = LoadDataFile(a.data);
  CheckDataMatchesModel(model, data);
  std::vector<std::vector<Tensor>> corpus;
  for (int64_t i : SelectSplit(data, a.split, a.limit)) {
    corpus.push_back(model.InputsFor(data.examples[i]));
  }
  const AblationReport report =
      CorrelationStudy(model.graph, model.logits, corpus, model.groups, opts);
  WriteReport(a.out + ".csv", report.ToCsv(), out);
  WriteReport(a.out + ".json", WithCliConfig(report.ToJson(), StudyCliConfig(a, g)), out);
  for (const CorrelationSummary& s : report.methods) {
    out << MethodName(s.method) << " pooled_r="
        << (s.pooled_r ? FormatDouble(*s.pooled_r) : std::string("undefined")) << "\n";
  }
  return kExitOk;
}

int RunFeatureStudy(const StudyArgs& a, const std::string& k_list, bool absolute,
                    const Globals& g, std::ostream& out) {
  FeatureSelectionOptions opts;
  opts.methods = ParseMethods(a.methods);
  opts.k_list = ParseIntList(k_list, "--k-list");
  opts.absolute_aggregate = absolute;
  opts.steps = a.steps;
  opts.rule = ParseRule(a.rule);
  opts.threads = g.threads;
  opts.classifier.seed = EffectiveSeed(g);
  if (a.steps < 1) throw ValidationError("--steps must be >= 1");
  for (int k : opts.k_list) {
    if (k < 1) throw ValidationError("--k-list entries must be >= 1, got " + std::to_string(k));
  }
  const ZooModel model = LoadModelFile(a.model);
  const LabeledDataset data = LoadDataFile(a.data);
  CheckDataMatchesModel(model, data);
  std::vector<std::vector<Tensor>> inputs;
  std::vector<int> labels;
  for (const Example& ex : data.examples) {
    inputs.push_back(model.InputsFor(ex));
    labels.push_back(ex.label);
  }
  const FeatureSelectionReport report =
      FeatureSelectionStudy(model.graph, model.logits, model.num_classes, inputs, labels,
                            data.train, data.eval, model.groups, opts);
  Json cli = StudyCliConfig(a, g);
  cli.erase("split");
  cli.erase("limit");
  WriteReport(a.out + ".csv", report.ToCsv(), out);
  WriteReport(a.out + ".json", WithCliConfig(report.ToJson(), cli), out);
  for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
  return kExitOk;
}

int RunSignHeatmap(const StudyArgs& a, double tau, const std::string& target, const Globals& g,
                   std::ostream& out) {
  if (a.steps < 1) throw ValidationError("--steps must be >= 1");
  if (!(tau >= 0.0)) throw ValidationError("--tau must be >= 0");
  const QuadratureRule rule = ParseRule(a.rule);
  const ZooModel model = LoadModelFile(a.model);
  const LabeledDataset data = LoadDataFile(a.data);
  CheckDataMatchesModel(model, data);
  std::optional<int> fixed_class;
  if (target != "predicted" && target != "label") {
    fixed_class = static_cast<int>(ParseU64(target, "--target"));
    if (*fixed_class >= model.num_classes) throw ValidationError("--target outside class range");
  }
  const std::vector<int64_t> idx = SelectSplit(data, a.split, a.limit);
  std::vector<std::vector<double>> scores(idx.size());
  ParallelFor(static_cast<int64_t>(idx.size()), g.threads, [&](int64_t r) {
    const Example& ex = data.examples[idx[r]];
    const std::vector<Tensor> x = model.InputsFor(ex);
    const int cls = fixed_class ? *fixed_class
                    : target == "label" ? ex.label
                                        : model.Predict(x);
    const Graph graph = model.ForClass(cls);
    const LayerCut cut = CutFromGroups(graph, "groups", model.groups);
    const AttributionResult res =
        ConductanceTotal(graph, PathSpec::FromZero(x, a.steps, rule), cut);
    for (const GroupScore& s : GroupScores(res, model.groups)) scores[r].push_back(s.score);
  });
  std::vector<std::string> names;
  for (const NeuronGroup& grp : model.groups) names.push_back(grp.name());
  const SignMatrix m = BuildSignMatrix(scores, tau, names);

  std::vector<int> row_labels;
  for (int64_t i : idx) row_labels.push_back(data.examples[i].label);
  Json doc;
  doc["config"] = {{"method", "conductance"}, {"tau", tau}, {"target", target},
                   {"steps", a.steps},        {"rule", a.rule}, {"baseline", "zero"},
                   {"cli", StudyCliConfig(a, g)}};
  doc["purity"] = Json::parse(m.PurityJson());
  WriteReport(a.out + ".csv", m.ToCsv(), out);
  WriteReport(a.out + ".scores.csv", FeaturesToCsv(scores, names, row_labels), out);
  WriteReport(a.out + ".json", doc.dump(2) + "\n", out);
  return kExitOk;
}

// ---- golden-check ----------------------------------------------------------

int RunGoldenCheck(bool all, const std::string& zoo_dir, std::ostream& out) {
  std::vector<ZooModel> models;
  if (!zoo_dir.empty()) {
    if (!std::filesystem::is_directory(zoo_dir)) {
      throw ValidationError("no such directory: " + zoo_dir);
    }
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(zoo_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ValidationError("zoo directory has no model files: " + zoo_dir);
    for (const auto& f : files) {
      try {
        models.push_back(LoadModel(ReadFile(f.string())));
      } catch (const Error& e) {
        throw FormatError(f.string() + ": " + e.what());
      }
    }
  } else if (all) {
    for (const std::string& n : ZooNames()) models.push_back(BuildZooModel(n));
  } else {
    throw ValidationError("golden-check needs --all or --zoo-dir");
  }

  out << "model,check,expected,actual,tolerance,result\n";
  int64_t passed = 0;
  int64_t total = 0;
  for (const ZooModel& model : models) {
    for (const GoldenOutcome& o : RunGoldenChecks(model)) {
      ++total;
      passed += o.passed;
      out << o.model << "," << o.name << "," << FormatDouble(o.expected) << ","
          << FormatDouble(o.actual) << "," << FormatDouble(o.tolerance) << ","
          << (o.passed ? "PASS" : "FAIL") << "\n";
    }
  }
  out << passed << "/" << total << " golden checks passed\n";
  return passed == total ? kExitOk : kExitCheckFailed;
}

std::string OneLine(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

int Fail(std::ostream& err, std::string_view kind, const std::string& message, int code) {
  err << Json{{"error", kind}, {"message", OneLine(message)}}.dump() << "\n";
  return code;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hidden-unit conductance attribution toolkit", "conductance"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed (falls back to $CONDUCTANCE_SEED, then 0)");
  app.add_option("--threads", g.threads, "Worker threads for corpus-level work")
      ->check(CLI::Range(1, 1024));

  // zoo
  CLI::App* zoo = app.add_subcommand("zoo", "List or build zoo models");
  zoo->require_subcommand(1);
  CLI::App* zoo_list = zoo->add_subcommand("list", "Print builtin model names");
  ZooArgs zoo_args;
  CLI::App* zoo_build = zoo->add_subcommand("build", "Write a zoo model file");
  zoo_build->add_option("--name", zoo_args.name, "Builtin model name");
  zoo_build->add_option("--out", zoo_args.out, "Output model file");
  zoo_build->add_flag("--all", zoo_args.all, "Build every builtin model into --dir");
  zoo_build->add_option("--dir", zoo_args.dir, "Output directory for --all");

  // gen-data
  GenDataArgs gen;
  CLI::App* gen_data = app.add_subcommand("gen-data", "Generate a synthetic JSONL dataset");
  gen_data->add_option("--kind", gen.kind, "blobs or sentiment")->capture_default_str();
  gen_data->add_option("--out", gen.out, "Output JSONL file")->required();
  gen_data->add_option("--classes", gen.blobs.num_classes)->capture_default_str();
  gen_data->add_option("--dim", gen.blobs.dim)->capture_default_str();
  gen_data->add_option("--per-class", gen.blobs.per_class)->capture_default_str();
  gen_data->add_option("--sigma", gen.blobs.sigma)->capture_default_str();
  gen_data->add_option("--separation", gen.blobs.separation)->capture_default_str();
  gen_data->add_option("--examples", gen.sentiment.num_examples)->capture_default_str();
  gen_data->add_option("--seq-len", gen.sentiment.seq_len)->capture_default_str();
  gen_data->add_option("--vocab", gen.sentiment.vocab_size)->capture_default_str();
  gen_data->add_option("--noise", gen.sentiment.noise_rate)->capture_default_str();

  // train
  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a zoo model on a dataset");
  train_cmd->add_option("--model", train.model, "Model file")->required();
  train_cmd->add_option("--data", train.data, "JSONL dataset")->required();
  train_cmd->add_option("--out", train.out, "Trained model file")->required();
  train_cmd->add_option("--report", train.report, "Training report JSON (default: stdout)");
  train_cmd->add_option("--epochs", train.config.epochs)->capture_default_str();
  train_cmd->add_option("--lr", train.config.learning_rate)->capture_default_str();
  train_cmd->add_option("--batch", train.config.batch_size)->capture_default_str();
  train_cmd->add_option("--momentum", train.config.momentum)->capture_default_str();

  // attribute
  AttributeArgs attr;
  CLI::App* attribute = app.add_subcommand("attribute", "Attribute one input");
  attribute->add_option("--model", attr.model, "Model file")->required();
  attribute->add_option("--input", attr.input, "Input JSON {\"values\"} or {\"tokens\"}")
      ->required();
  attribute->add_option("--method", attr.method, "ig|conductance|influence|activation|gradact")
      ->capture_default_str();
  attribute->add_option("--baseline", attr.baseline, "zero or a baseline JSON file")
      ->capture_default_str();
  attribute->add_option("--steps", attr.steps)->capture_default_str();
  attribute->add_option("--rule", attr.rule, "midpoint|trapezoid|left")->capture_default_str();
  attribute->add_option("--layer", attr.layer, "Declared cut or node name");
  attribute->add_option("--group", attr.group, "Neuron group name");
  attribute->add_option("--target", attr.target, "Class whose score is attributed")
      ->capture_default_str();
  attribute->add_option("--out", attr.out, "Report prefix (.csv and .json)");

  auto add_study_flags = [](CLI::App* cmd, StudyArgs& s) {
    cmd->add_option("--model", s.model, "Model file")->required();
    cmd->add_option("--data", s.data, "JSONL dataset")->required();
    cmd->add_option("--steps", s.steps)->capture_default_str();
    cmd->add_option("--rule", s.rule)->capture_default_str();
    cmd->add_option("--out", s.out, "Report prefix (.csv and .json)")->required();
  };

  StudyArgs abl;
  int top_k = 10;
  CLI::App* ablation = app.add_subcommand("ablation-study", "Importance vs ablation correlation");
  add_study_flags(ablation, abl);
  ablation->add_option("--split", abl.split, "eval|train|all")->capture_default_str();
  ablation->add_option("--limit", abl.limit, "Use at most N inputs (0 = all)")
      ->capture_default_str();
  ablation->add_option("--methods", abl.methods)->capture_default_str();
  ablation->add_option("--top-k", top_k)->capture_default_str();

  StudyArgs feat;
  std::string k_list = "5,10,15,20";
  bool absolute = false;
  CLI::App* feature = app.add_subcommand("feature-study", "Attribution-based feature selection");
  add_study_flags(feature, feat);
  feature->add_option("--methods", feat.methods)->capture_default_str();
  feature->add_option("--k-list", k_list)->capture_default_str();
  feature->add_flag("--absolute", absolute, "Aggregate |score| instead of signed scores");

  StudyArgs heat;
  double tau = 0.01;
  std::string heat_target = "predicted";
  CLI::App* heatmap = app.add_subcommand("sign-heatmap", "Conductance sign matrix and purity");
  add_study_flags(heatmap, heat);
  heatmap->add_option("--split", heat.split, "eval|train|all")->capture_default_str();
  heatmap->add_option("--limit", heat.limit)->capture_default_str();
  heatmap->add_option("--tau", tau)->capture_default_str();
  heatmap->add_option("--target", heat_target, "predicted, label or a class index")
      ->capture_default_str();

  bool golden_all = false;
  std::string zoo_dir;
  CLI::App* golden = app.add_subcommand("golden-check", "Run zoo golden checks");
  golden->add_flag("--all", golden_all, "Check every builtin model");
  golden->add_option("--zoo-dir", zoo_dir, "Check every model file in a directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return Fail(err, "usage", e.what(), kExitValidation);
  }

  try {
    if (zoo_list->parsed()) return RunZooList(out);
    if (zoo_build->parsed()) return RunZooBuild(zoo_args, g, out);
    if (gen_data->parsed()) return RunGenData(gen, g, out);
    if (train_cmd->parsed()) return RunTrain(train, g, out);
    if (attribute->parsed()) return RunAttribute(attr, g, out);
    if (ablation->parsed()) return RunAblationStudy(abl, top_k, g, out);
    if (feature->parsed()) return RunFeatureStudy(feat, k_list, absolute, g, out);
    if (heatmap->parsed()) return RunSignHeatmap(heat, tau, heat_target, g, out);
    if (golden->parsed()) return RunGoldenCheck(golden_all, zoo_dir, out);
  } catch (const NumericalError& e) {
    return Fail(err, "numerical", e.what(), kExitNumerical);
  } catch (const ValidationError& e) {
    return Fail(err, "validation", e.what(), kExitValidation);
  } catch (const FormatError& e) {
    return Fail(err, "format", e.what(), kExitValidation);
  } catch (const ShapeError& e) {
    return Fail(err, "shape", e.what(), kExitValidation);
  } catch (const GraphError& e) {
    return Fail(err, "graph", e.what(), kExitValidation);
  } catch (const std::filesystem::filesystem_error& e) {
    return Fail(err, "io", e.what(), kExitValidation);
  }
  return Fail(err, "usage", "no command given", kExitValidation);
}

}  // namespace conductance::cli
