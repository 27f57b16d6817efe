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

#ifndef NAMC_EXPLAIN_H_
#define NAMC_EXPLAIN_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "namc/importance.h"
#include "namc/nam_model.h"
#include "namc/sufficiency.h"

namespace namc {

enum class Minimality { kSubsetMinimal, kCardinallyMinimal, kNone };

const char* MinimalityName(Minimality m);

struct TracePoint {
  double t_ms = 0.0;
  int size = 0;
};

struct ExplanationResult {
  // Ascending feature indices.
  std::vector<int> subset;
  Minimality minimality = Minimality::kNone;
  // "importance", "lexicographic", "sensitivity", "sampled-importance",
  // "max-deviation" or "enumeration".
  std::string ordering;
  // The traversal order: removal order for greedy searches, descending
  // importance for prefix searches.
  std::vector<int> order;
  QueryMode mode = QueryMode::kClass1;
  std::int64_t suff_calls = 0;
  // Extremum queries inside suff plus verify calls of the importance sort.
  std::int64_t verifier_calls = 0;
  double sort_ms = 0.0;
  double search_ms = 0.0;
  // (elapsed, size of the current best sufficient set) after every probe.
  std::vector<TracePoint> trace;
  // Certificate of the returned subset.
  SuffCertificate certificate;
  // Set for uncertified results: whether the exact oracle accepts the subset.
  std::optional<bool> certified_sufficient;
  // Present when the importance sort ran.
  std::optional<ImportanceOrder> importance;
};

// Drops features in `removal_order` whenever the rest stays sufficient.
// Exactly n suff calls.
ExplanationResult GreedyRemovalSearch(SufficiencyOracle& oracle,
                                      std::span<const int> removal_order,
                                      Minimality claim, std::string ordering);

// First-true binary search over prefix sizes 0..n of `descending_order`.
// Returns the smallest sufficient prefix (given monotone prefix sufficiency)
// with at most ceil(log2(n + 1)) suff calls.
ExplanationResult PrefixSearch(SufficiencyOracle& oracle,
                               std::span<const int> descending_order,
                               Minimality claim, std::string ordering);

struct BruteForceResult {
  int size = 0;
  std::vector<int> subset;
  std::int64_t suff_calls = 0;
};

inline constexpr int kBruteForceMaxFeatures = 22;

// Enumerates subsets by ascending size, then lexicographically, and returns
// the first sufficient one.
BruteForceResult BruteForceSearch(SufficiencyOracle& oracle);

enum class Ordering { kLexicographic, kSensitivity };

struct ExplainConfig {
  SuffConfig suff;
  SortConfig sort;
  // Default: class of the prediction (binary), two-sided (regression).
  std::optional<QueryMode> mode;
  // Allowed regression deviation.
  double delta = 0.0;
  int sensitivity_samples = 64;
  int sampling_grid = 1000;
};

// Query mode used for a single-output model when the config leaves it open.
QueryMode ResolveMode(const NamModel& model, std::span<const double> x,
                      const ExplainConfig& config);

// Per-feature max |f_i(z) - f_i(x_i)| over `samples` evenly spaced z in the
// feature's interval (endpoints included).
std::vector<double> Sensitivities(const NamModel& model, int output,
                                  std::span<const double> x,
                                  const PerturbationSpec& spec, int samples);

// Ascending sensitivity, ties by index. Removal order for the greedy search.
std::vector<int> sensitivity_order(const NamModel& model,
                                   std::span<const double> x,
                                   const PerturbationSpec& spec,
                                   int samples = 64);

// The functions below take single-output (binary or regression) models.

ExplanationResult explain_subset_minimal(const NamModel& model,
                                         std::span<const double> x,
                                         const PerturbationSpec& spec,
                                         Ordering ordering,
                                         const ExplainConfig& config = {});

ExplanationResult explain_cardinal_linear(const NamModel& model,
                                          std::span<const double> x,
                                          const PerturbationSpec& spec,
                                          const ImportanceOrder& order,
                                          const ExplainConfig& config = {});

ExplanationResult explain_cardinal_log(const NamModel& model,
                                       std::span<const double> x,
                                       const PerturbationSpec& spec,
                                       const ImportanceOrder& order,
                                       const ExplainConfig& config = {});

// Sampling baseline: grid extrema in place of certified ones, order derived
// from the sampled deviations, prefix search. Uncertified; the result's
// certified_sufficient field holds the exact oracle's verdict.
ExplanationResult explain_sampling(const NamModel& model,
                                   std::span<const double> x,
                                   const PerturbationSpec& spec,
                                   const ExplainConfig& config = {});

BruteForceResult brute_force_min(const NamModel& model,
                                 std::span<const double> x,
                                 const PerturbationSpec& spec,
                                 const ExplainConfig& config = {});

enum class Method {
  kOurs,         // importance sort + prefix search
  kOursLinear,   // importance sort + greedy removal
  kLexicographic,
  kSensitivity,
  kSampling,
  kBruteForce,
};

const char* MethodName(Method method);
std::optional<Method> ParseMethod(const std::string& name);

// Full pipeline for any task.
//  - binary / regression one-sided: the methods as named.
//  - regression two-sided and multiclass winner-vs-all: "ours" and
//    "ours-linear" run the greedy removal ordered by ascending maximal
//    deviation (claimed subset-minimal); brute force stays exact.
//  - multiclass with a rival: the pairwise reduction, then as binary.
ExplanationResult explain_instance(const NamModel& model,
                                   std::span<const double> x,
                                   const PerturbationSpec& spec, Method method,
                                   const ExplainConfig& config = {},
                                   std::optional<int> rival = {});

}  // namespace namc

#endif  // NAMC_EXPLAIN_H_
