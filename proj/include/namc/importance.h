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

#ifndef NAMC_IMPORTANCE_H_
#define NAMC_IMPORTANCE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "namc/nam_model.h"
#include "namc/runtime.h"
#include "namc/verifier.h"

namespace namc {

// Which extremum of each component pushes the output toward the decision
// boundary. kMinimize: predicted class 1 (or a lower regression bound), the
// deviation is f_i(x_i) - min f_i. kMaximize: predicted class 0 (or an upper
// regression bound), the deviation is max f_i - f_i(x_i). kMaximize is
// handled by refining the negated component.
enum class Orientation { kMinimize, kMaximize };

const char* OrientationName(Orientation o);

struct SortConfig {
  int processors = 1;
  int max_refinements = 200;
  // Overlapping intervals narrower than this are declared tied.
  double tie_threshold = 1e-9;
  bool counterexample_tightening = true;
  bool probe_near_upper = true;
  double probe_offset = 1e-7;
  // Probing starts once a feature has been refined this many times.
  int probe_after = 3;
  // Kept well below tie_threshold so that bisection can shrink intervals
  // under it.
  VerifyBudget verify{100'000, 1e-9 / 16};
  Deadline deadline;
};

// Certified bounds l <= min g_i <= u on the oriented component g_i over the
// feature's perturbation interval, and the deviation interval they induce.
struct ImportanceInterval {
  int feature = 0;
  double value_at_x = 0.0;  // g_i(x_i)
  double l = 0.0;
  double u = 0.0;
  double ibp_alpha = 0.0;  // initial IBP bounds on g_i
  double ibp_beta = 0.0;
  int refinements = 0;
  std::int64_t verify_calls = 0;
  int probes = 0;
  bool converged = false;  // finished refining (separated or narrow)

  double width() const { return u - l; }
  // g_i(x_i) - u: lower end of the true deviation.
  double deviation_lo() const { return value_at_x - u; }
  // g_i(x_i) - l: upper end of the true deviation.
  double deviation_hi() const { return value_at_x - l; }
};

// Non-strict separation: one deviation interval lies at or above the other.
bool Separated(const ImportanceInterval& a, const ImportanceInterval& b);

struct ProcessedPoint {
  double t_ms = 0.0;
  int processed = 0;
};

struct ImportanceOrder {
  Orientation orientation = Orientation::kMinimize;
  // Descending importance, most important first.
  std::vector<int> order;
  // Indexed by feature.
  std::vector<ImportanceInterval> intervals;
  // Separation to the adjacent features in `order`, indexed by feature;
  // nullopt when a feature has no neighbour.
  std::vector<std::optional<double>> xi;
  // Groups (size >= 2) of mutually overlapping converged intervals, each in
  // ascending feature index.
  std::vector<std::vector<int>> tie_groups;
  int rounds = 0;
  std::int64_t verify_calls = 0;
  double elapsed_ms = 0.0;
  // Finished features after each round.
  std::vector<ProcessedPoint> trace;

  // Least important first.
  std::vector<int> removal_order() const;
};

// Initial interval: IBP bounds on g_i, with u tightened to g_i(x_i).
ImportanceInterval InitialInterval(int feature, const UnivariateNet& oriented,
                                   const Interval& box, double x);

// u <- min(u, witness value, m). Never increases u.
void apply_counterexample_tightening(ImportanceInterval& state, double m,
                                     const Witness& witness);

// Tests g_i >= u - delta. On Holds the interval collapses to width ~delta;
// on Violated u is lowered (by the witness when tightening is enabled).
// Returns the verifier outcome.
VerifyOutcome probe_near_upper_bound(ImportanceInterval& state,
                                     const UnivariateNet& oriented,
                                     const Interval& box, double delta,
                                     const SortConfig& config);

// One bisection step (plus an optional probe).
void RefineOnce(ImportanceInterval& state, const UnivariateNet& oriented,
                const Interval& box, const SortConfig& config);

// Core routine on already-oriented components.
ImportanceOrder SortOrientedComponents(std::span<const UnivariateNet> oriented,
                                       std::span<const Interval> boxes,
                                       std::span<const double> x,
                                       Orientation orientation,
                                       const SortConfig& config);

// Parallel interval importance sorting for a single-output model. The
// orientation defaults to the predicted class (binary models).
ImportanceOrder sort_features(const NamModel& model, std::span<const double> x,
                              const PerturbationSpec& spec,
                              const SortConfig& config = {},
                              std::optional<Orientation> orientation = {});

}  // namespace namc

#endif  // NAMC_IMPORTANCE_H_
