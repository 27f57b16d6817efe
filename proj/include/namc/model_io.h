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

#ifndef NAMC_MODEL_IO_H_
#define NAMC_MODEL_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "namc/nam_model.h"

namespace namc {

inline constexpr int kModelFormatVersion = 1;

// Model file layout (version 1):
//   {version, task, n_features, n_classes, intercepts: [...],
//    components: [output][feature] -> {layers: [{weights: [[...]], bias}]},
//    feature_meta: {names, domains: [[lo, hi]...], normalization}}
// Weights are [out][in]. Doubles are written as shortest round-trip decimals.
nlohmann::json ModelToJson(const NamModel& model);

// Errors carry the JSON path of the offending element, e.g.
// "components[1][3].layers[0]: ...".
NamModel ModelFromJson(const nlohmann::json& doc);

NamModel load_model(const std::filesystem::path& path);
void save_model(const NamModel& model, const std::filesystem::path& path);

// Serialized model text, byte-stable for equal models.
std::string DumpModel(const NamModel& model);

// Feature columns to read from a CSV. Empty `features` means every column
// except `label`.
struct DatasetSchema {
  std::vector<std::string> features;
  std::optional<std::string> label;
  // Use these instead of fitting min/max on the data (e.g. the model's own
  // normalization metadata).
  std::vector<FeatureNormalization> normalization;
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<Instance> raw;
  std::vector<Instance> instances;  // normalized
  std::vector<FeatureNormalization> normalization;
};

// Min-max normalization to [0, 1]. A constant column maps to 0 and is flagged
// zero_range. Values outside a supplied normalization range are clamped.
double Normalize(const FeatureNormalization& norm, double raw);

Dataset load_dataset(const std::filesystem::path& path,
                     const DatasetSchema& schema = {});
Dataset ParseDataset(const std::string& csv_text,
                     const DatasetSchema& schema = {});

}  // namespace namc

#endif  // NAMC_MODEL_IO_H_
