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

#ifndef NAMC_VERIFIER_H_
#define NAMC_VERIFIER_H_

#include <cstdint>
#include <optional>

#include "namc/nam_model.h"

namespace namc {

// Interval-arithmetic bounds on a net over an input interval.
struct IbpBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Layer-wise interval arithmetic. Sound, usually loose.
IbpBounds ibp_bounds(const UnivariateNet& net, const Interval& interval);

struct VerifyBudget {
  std::int64_t max_subdivisions = 100'000;
  // Completeness tolerance: Holds certifies min f >= m - tolerance.
  double tolerance = 1e-9;
};

enum class Verdict { kHolds, kViolated };

struct Witness {
  double z = 0.0;
  double value = 0.0;
};

struct VerifyOutcome {
  Verdict verdict = Verdict::kHolds;
  // Present iff Violated; value < m and z inside the query interval.
  std::optional<Witness> witness;
  // When Holds: a certified lower bound on min f over the interval, at least
  // m - tolerance.
  double certified_lower = 0.0;
  std::int64_t subdivisions = 0;

  bool holds() const { return verdict == Verdict::kHolds; }
};

// Decides "for all z in interval: net(z) >= m" by best-first interval
// branch-and-bound: the subinterval with the smallest IBP lower bound is
// expanded first; a midpoint value below m is a counterexample; the query holds
// once every open subinterval has IBP lower bound >= m - tolerance.
// Throws BudgetExceededError after budget.max_subdivisions splits.
VerifyOutcome verify_ge(const UnivariateNet& net, const Interval& interval,
                        double m, const VerifyBudget& budget = {});

struct MinBound {
  // Certified: lower <= min f <= best.value, best.value - lower <= tolerance.
  double lower = 0.0;
  Witness best;
  std::int64_t subdivisions = 0;
};

// Branch-and-bound run to convergence.
MinBound min_lower_bound(const UnivariateNet& net, const Interval& interval,
                         const VerifyBudget& budget = {});

}  // namespace namc

#endif  // NAMC_VERIFIER_H_
