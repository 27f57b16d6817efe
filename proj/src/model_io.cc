/*
 * Copyright 2026 The namc Authors.
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

#include "namc/model_io.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "namc/errors.h"

namespace namc {

using nlohmann::json;

namespace {

std::string Idx(std::size_t i) { return "[" + std::to_string(i) + "]"; }

const json& Require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(path + ": missing field '" + key + "'");
  }
  return *it;
}

// Accepts a JSON number or a decimal string.
double ReadDouble(const json& v, const std::string& path) {
  double out;
  if (v.is_number()) {
    out = v.get<double>();
  } else if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw SchemaError(path + ": '" + s + "' is not a decimal number");
    }
  } else {
    throw SchemaError(path + ": expected a number");
  }
  if (!std::isfinite(out)) throw NonFiniteError(path + ": non-finite value");
  return out;
}

std::vector<double> ReadVector(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path + ": expected an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(ReadDouble(v[i], path + Idx(i)));
  }
  return out;
}

int ReadInt(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path + ": expected an integer");
  return v.get<int>();
}

UnivariateNet ReadNet(const json& v, const std::string& path) {
  const json& layers_json = Require(v, "layers", path);
  if (!layers_json.is_array() || layers_json.empty()) {
    throw SchemaError(path + ".layers: expected a non-empty array");
  }
  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k < layers_json.size(); ++k) {
    const std::string lpath = path + ".layers" + Idx(k);
    const json& w = Require(layers_json[k], "weights", lpath);
    if (!w.is_array() || w.empty()) {
      throw SchemaError(lpath + ".weights: expected a non-empty matrix");
    }
    DenseLayer layer;
    layer.out = static_cast<int>(w.size());
    for (std::size_t o = 0; o < w.size(); ++o) {
      std::vector<double> row = ReadVector(w[o], lpath + ".weights" + Idx(o));
      if (o == 0) {
        layer.in = static_cast<int>(row.size());
      } else if (static_cast<int>(row.size()) != layer.in) {
        throw ShapeMismatchError(lpath + ".weights" + Idx(o) +
                                 ": ragged weight matrix");
      }
      layer.weights.insert(layer.weights.end(), row.begin(), row.end());
    }
    layer.bias = ReadVector(Require(layers_json[k], "bias", lpath),
                            lpath + ".bias");
    layers.push_back(std::move(layer));
  }
  try {
    return UnivariateNet(std::move(layers));
  } catch (const NonFiniteError& e) {
    throw NonFiniteError(path + ": " + e.what());
  } catch (const ShapeMismatchError& e) {
    throw ShapeMismatchError(path + ": " + e.what());
  }
}

json NetToJson(const UnivariateNet& net) {
  json layers = json::array();
  for (const DenseLayer& layer : net.layers()) {
    json w = json::array();
    for (int o = 0; o < layer.out; ++o) {
      json row = json::array();
      for (int i = 0; i < layer.in; ++i) row.push_back(layer.weight(o, i));
      w.push_back(std::move(row));
    }
    layers.push_back({{"weights", std::move(w)}, {"bias", layer.bias}});
  }
  return {{"layers", std::move(layers)}};
}

}  // namespace

json ModelToJson(const NamModel& model) {
  json doc;
  doc["version"] = kModelFormatVersion;
  doc["task"] = TaskName(model.task());
  doc["n_features"] = model.n_features();
  doc["n_classes"] = model.n_classes();
  doc["intercepts"] = model.intercepts();
  json components = json::array();
  for (const auto& output : model.components()) {
    json row = json::array();
    for (const UnivariateNet& net : output) row.push_back(NetToJson(net));
    components.push_back(std::move(row));
  }
  doc["components"] = std::move(components);
  json meta;
  meta["names"] = model.meta().names;
  json domains = json::array();
  for (const Interval& d : model.meta().domains) {
    domains.push_back({d.lo, d.hi});
  }
  meta["domains"] = std::move(domains);
  if (model.meta().normalization.empty()) {
    meta["normalization"] = nullptr;
  } else {
    json norm = json::array();
    for (const FeatureNormalization& n : model.meta().normalization) {
      norm.push_back(
          {{"min", n.min}, {"max", n.max}, {"zero_range", n.zero_range}});
    }
    meta["normalization"] = std::move(norm);
  }
  doc["feature_meta"] = std::move(meta);
  return doc;
}

NamModel ModelFromJson(const json& doc) {
  const int version = ReadInt(Require(doc, "version", "$"), "$.version");
  if (version != kModelFormatVersion) {
    throw UnsupportedVersionError("$.version: unsupported model version " +
                                  std::to_string(version));
  }
  const json& task_json = Require(doc, "task", "$");
  if (!task_json.is_string()) throw SchemaError("$.task: expected a string");
  const std::optional<Task> task = ParseTask(task_json.get<std::string>());
  if (!task) {
    throw SchemaError("$.task: unknown task '" + task_json.get<std::string>() +
                      "'");
  }
  const int n_features =
      ReadInt(Require(doc, "n_features", "$"), "$.n_features");
  const int n_classes = ReadInt(Require(doc, "n_classes", "$"), "$.n_classes");
  if (n_features < 1) throw SchemaError("$.n_features: must be >= 1");
  int expected_outputs = 1;
  if (*task == Task::kMulticlass) {
    if (n_classes < 2) throw SchemaError("$.n_classes: multiclass needs >= 2");
    expected_outputs = n_classes;
  } else if (*task == Task::kBinary && n_classes != 2) {
    throw SchemaError("$.n_classes: binary models have n_classes = 2");
  } else if (*task == Task::kRegression && n_classes != 1) {
    throw SchemaError("$.n_classes: regression models have n_classes = 1");
  }

  std::vector<double> intercepts =
      ReadVector(Require(doc, "intercepts", "$"), "$.intercepts");
  if (static_cast<int>(intercepts.size()) != expected_outputs) {
    throw ShapeMismatchError("$.intercepts: expected " +
                             std::to_string(expected_outputs) + " values");
  }

  const json& comps = Require(doc, "components", "$");
  if (!comps.is_array() || static_cast<int>(comps.size()) != expected_outputs) {
    throw ShapeMismatchError("$.components: expected " +
                             std::to_string(expected_outputs) + " outputs");
  }
  std::vector<std::vector<UnivariateNet>> components;
  for (std::size_t o = 0; o < comps.size(); ++o) {
    const std::string opath = "components" + Idx(o);
    if (!comps[o].is_array() ||
        static_cast<int>(comps[o].size()) != n_features) {
      throw ShapeMismatchError(opath + ": expected " +
                               std::to_string(n_features) + " components");
    }
    std::vector<UnivariateNet> row;
    for (std::size_t i = 0; i < comps[o].size(); ++i) {
      row.push_back(ReadNet(comps[o][i], opath + Idx(i)));
    }
    components.push_back(std::move(row));
  }

  FeatureMeta meta;
  if (auto it = doc.find("feature_meta"); it != doc.end() && !it->is_null()) {
    const json& m = *it;
    if (auto names = m.find("names"); names != m.end() && !names->is_null()) {
      if (!names->is_array()) {
        throw SchemaError("feature_meta.names: expected an array");
      }
      for (const json& n : *names) {
        if (!n.is_string()) {
          throw SchemaError("feature_meta.names: expected strings");
        }
        meta.names.push_back(n.get<std::string>());
      }
    }
    if (auto domains = m.find("domains");
        domains != m.end() && !domains->is_null()) {
      if (!domains->is_array()) {
        throw SchemaError("feature_meta.domains: expected an array");
      }
      for (std::size_t i = 0; i < domains->size(); ++i) {
        const std::string dpath = "feature_meta.domains" + Idx(i);
        std::vector<double> d = ReadVector((*domains)[i], dpath);
        if (d.size() != 2) throw SchemaError(dpath + ": expected [lo, hi]");
        meta.domains.push_back({d[0], d[1]});
      }
    }
    if (auto norm = m.find("normalization");
        norm != m.end() && !norm->is_null()) {
      if (!norm->is_array()) {
        throw SchemaError("feature_meta.normalization: expected an array");
      }
      for (std::size_t i = 0; i < norm->size(); ++i) {
        const std::string npath = "feature_meta.normalization" + Idx(i);
        const json& entry = (*norm)[i];
        FeatureNormalization n;
        n.min = ReadDouble(Require(entry, "min", npath), npath + ".min");
        n.max = ReadDouble(Require(entry, "max", npath), npath + ".max");
        if (auto zr = entry.find("zero_range"); zr != entry.end()) {
          if (!zr->is_boolean()) {
            throw SchemaError(npath + ".zero_range: expected a boolean");
          }
          n.zero_range = zr->get<bool>();
        }
        meta.normalization.push_back(n);
      }
    }
  }
  if (!meta.names.empty() && static_cast<int>(meta.names.size()) != n_features) {
    throw ShapeMismatchError("feature_meta.names: expected " +
                             std::to_string(n_features) + " names");
  }
  if (!meta.domains.empty() &&
      static_cast<int>(meta.domains.size()) != n_features) {
    throw ShapeMismatchError("feature_meta.domains: expected " +
                             std::to_string(n_features) + " domains");
  }
  return NamModel(*task, std::move(intercepts), std::move(components),
                  std::move(meta));
}

std::string DumpModel(const NamModel& model) {
  return ModelToJson(model).dump(1) + "\n";
}

NamModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": invalid JSON: " + e.what());
  }
  return ModelFromJson(doc);
}

void save_model(const NamModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file " + path.string());
  out << DumpModel(model);
  if (!out) throw Error("error writing model file " + path.string());
}

double Normalize(const FeatureNormalization& norm, double raw) {
  if (norm.zero_range || !(norm.max > norm.min)) return 0.0;
  const double v = (raw - norm.min) / (norm.max - norm.min);
  return std::clamp(v, 0.0, 1.0);
}

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double ParseCell(const std::string& cell, std::size_t row,
                 const std::string& column) {
  const std::string s = Trim(cell);
  double v = 0.0;
  const char* begin = s.data();
  if (!s.empty() && s[0] == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() ||
      !std::isfinite(v)) {
    throw SchemaError("row " + std::to_string(row) + ", column '" + column +
                      "': non-numeric cell '" + s + "'");
  }
  return v;
}

}  // namespace

Dataset ParseDataset(const std::string& csv_text, const DatasetSchema& schema) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("dataset: missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = SplitCsvLine(line);
  for (std::string& h : header) h = Trim(h);

  const auto column_of = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw SchemaError("dataset: missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  Dataset data;
  std::vector<std::size_t> feature_cols;
  if (schema.features.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (schema.label && header[c] == *schema.label) continue;
      feature_cols.push_back(c);
      data.feature_names.push_back(header[c]);
    }
  } else {
    for (const std::string& name : schema.features) {
      feature_cols.push_back(column_of(name));
      data.feature_names.push_back(name);
    }
  }
  std::optional<std::size_t> label_col;
  if (schema.label) label_col = column_of(*schema.label);
  if (feature_cols.empty()) throw SchemaError("dataset: no feature columns");

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    ++row;
    const std::vector<std::string> cells = SplitCsvLine(line);
    if (cells.size() != header.size()) {
      throw SchemaError("row " + std::to_string(row) + ": expected " +
                        std::to_string(header.size()) + " cells, got " +
                        std::to_string(cells.size()));
    }
    Instance inst;
    for (std::size_t c : feature_cols) {
      inst.values.push_back(ParseCell(cells[c], row, header[c]));
    }
    if (label_col) {
      inst.label = ParseCell(cells[*label_col], row, header[*label_col]);
    }
    data.raw.push_back(std::move(inst));
  }

  const std::size_t n = feature_cols.size();
  if (!schema.normalization.empty()) {
    if (schema.normalization.size() != n) {
      throw SchemaError("dataset: normalization length != feature count");
    }
    data.normalization = schema.normalization;
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      FeatureNormalization norm{std::numeric_limits<double>::infinity(),
                                -std::numeric_limits<double>::infinity(),
                                false};
      for (const Instance& inst : data.raw) {
        norm.min = std::min(norm.min, inst.values[j]);
        norm.max = std::max(norm.max, inst.values[j]);
      }
      if (data.raw.empty()) norm = {0.0, 1.0, false};
      norm.zero_range = !(norm.max > norm.min);
      data.normalization.push_back(norm);
    }
  }
  for (const Instance& inst : data.raw) {
    Instance normalized{{}, inst.label};
    for (std::size_t j = 0; j < n; ++j) {
      normalized.values.push_back(
          Normalize(data.normalization[j], inst.values[j]));
    }
    data.instances.push_back(std::move(normalized));
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& path,
                     const DatasetSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseDataset(buffer.str(), schema);
}

}  // namespace namc
