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

#include "namc/importance.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "namc/errors.h"

namespace namc {

const char* OrientationName(Orientation o) {
  return o == Orientation::kMinimize ? "minimize" : "maximize";
}

bool Separated(const ImportanceInterval& a, const ImportanceInterval& b) {
  return a.deviation_lo() >= b.deviation_hi() ||
         b.deviation_lo() >= a.deviation_hi();
}

std::vector<int> ImportanceOrder::removal_order() const {
  return {order.rbegin(), order.rend()};
}

ImportanceInterval InitialInterval(int feature, const UnivariateNet& oriented,
                                   const Interval& box, double x) {
  ImportanceInterval s;
  s.feature = feature;
  s.value_at_x = oriented(x);
  const IbpBounds ibp = ibp_bounds(oriented, box);
  s.ibp_alpha = ibp.lower;
  s.ibp_beta = ibp.upper;
  // The minimum over the box can never exceed the unperturbed value.
  s.u = std::min(ibp.upper, s.value_at_x);
  s.l = std::min(ibp.lower, s.u);
  return s;
}

void apply_counterexample_tightening(ImportanceInterval& state, double m,
                                     const Witness& witness) {
  state.u = std::min(state.u, std::min(witness.value, m));
  state.l = std::min(state.l, state.u);
}

namespace {

// Holds at m: the bound proven by the verifier, never above m.
void RaiseLower(ImportanceInterval& state, double m,
                const VerifyOutcome& outcome) {
  state.l = std::max(state.l, std::min(m, outcome.certified_lower));
  state.l = std::min(state.l, state.u);
}

void LowerUpper(ImportanceInterval& state, double m,
                const VerifyOutcome& outcome, const SortConfig& config) {
  if (config.counterexample_tightening) {
    apply_counterexample_tightening(state, m, *outcome.witness);
  } else {
    state.u = std::min(state.u, m);
    state.l = std::min(state.l, state.u);
  }
}

VerifyOutcome Query(ImportanceInterval& state, const UnivariateNet& net,
                    const Interval& box, double m, const SortConfig& config) {
  try {
    VerifyOutcome out = verify_ge(net, box, m, config.verify);
    ++state.verify_calls;
    return out;
  } catch (const BudgetExceededError& e) {
    throw FeatureBudgetError(state.feature, e.what());
  }
}

}  // namespace

VerifyOutcome probe_near_upper_bound(ImportanceInterval& state,
                                     const UnivariateNet& oriented,
                                     const Interval& box, double delta,
                                     const SortConfig& config) {
  const double m = state.u - delta;
  VerifyOutcome out = Query(state, oriented, box, m, config);
  ++state.probes;
  if (out.holds()) {
    RaiseLower(state, m, out);
  } else {
    LowerUpper(state, m, out, config);
  }
  return out;
}

void RefineOnce(ImportanceInterval& state, const UnivariateNet& oriented,
                const Interval& box, const SortConfig& config) {
  const double m = state.l + 0.5 * (state.u - state.l);
  if (!(m > state.l && m < state.u)) {
    // Interval is as narrow as floating point allows.
    state.converged = true;
    return;
  }
  ++state.refinements;
  const VerifyOutcome out = Query(state, oriented, box, m, config);
  if (!out.holds()) {
    LowerUpper(state, m, out, config);
    return;
  }
  RaiseLower(state, m, out);
  const double narrow = std::max(config.tie_threshold, 2.0 * config.probe_offset);
  if (config.probe_near_upper && state.refinements >= config.probe_after &&
      state.width() > narrow) {
    probe_near_upper_bound(state, oriented, box, config.probe_offset, config);
  }
}

namespace {

int Find(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

// Groups of mutually overlapping intervals (connected components), ordered by
// descending deviation; members in ascending index.
std::vector<std::vector<int>> OverlapGroups(
    const std::vector<ImportanceInterval>& s) {
  const int n = static_cast<int>(s.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!Separated(s[i], s[j])) parent[Find(parent, i)] = Find(parent, j);
    }
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> group_of(n, -1);
  for (int i = 0; i < n; ++i) {
    const int root = Find(parent, i);
    if (group_of[root] < 0) {
      group_of[root] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[group_of[root]].push_back(i);
  }
  const auto key = [&](const std::vector<int>& g) {
    double lo = s[g[0]].deviation_lo();
    double hi = s[g[0]].deviation_hi();
    for (int i : g) {
      lo = std::min(lo, s[i].deviation_lo());
      hi = std::max(hi, s[i].deviation_hi());
    }
    return lo + 0.5 * (hi - lo);
  };
  std::stable_sort(groups.begin(), groups.end(),
                   [&](const std::vector<int>& a, const std::vector<int>& b) {
                     return key(a) > key(b);
                   });
  return groups;
}

}  // namespace

ImportanceOrder SortOrientedComponents(std::span<const UnivariateNet> oriented,
                                       std::span<const Interval> boxes,
                                       std::span<const double> x,
                                       Orientation orientation,
                                       const SortConfig& config) {
  const int n = static_cast<int>(oriented.size());
  if (n < 1 || boxes.size() != oriented.size() || x.size() != oriented.size()) {
    throw InvalidArgumentError("sort: inconsistent feature counts");
  }
  if (config.processors < 1) {
    throw InvalidArgumentError("sort: processors must be >= 1");
  }
  Stopwatch clock;
  ImportanceOrder result;
  result.orientation = orientation;
  std::vector<ImportanceInterval>& state = result.intervals;
  state.resize(n);
  const int workers = EffectiveWorkers(config.processors);
  ParallelFor(n, workers, [&](int i) {
    state[i] = InitialInterval(i, oriented[i], boxes[i], x[i]);
  });

  // Marks finished features against a snapshot of all intervals. Returns
  // the indices still to refine.
  const auto settle = [&]() {
    const std::vector<ImportanceInterval> snapshot = state;
    std::vector<int> active;
    for (int i = 0; i < n; ++i) {
      if (state[i].converged) continue;
      bool separated = true;
      for (int j = 0; j < n && separated; ++j) {
        if (j != i && !Separated(snapshot[i], snapshot[j])) separated = false;
      }
      if (separated || snapshot[i].width() <= config.tie_threshold) {
        state[i].converged = true;
        continue;
      }
      if (state[i].refinements >= config.max_refinements) {
        throw InternalError("sort: feature " + std::to_string(i) +
                            " neither separated nor converged after " +
                            std::to_string(config.max_refinements) +
                            " refinements");
      }
      active.push_back(i);
    }
    return active;
  };

  std::vector<int> active = settle();
  result.trace.push_back({clock.elapsed_ms(), n - static_cast<int>(active.size())});
  while (!active.empty()) {
    config.deadline.Check("importance sort");
    ParallelFor(static_cast<int>(active.size()), workers, [&](int k) {
      const int i = active[k];
      RefineOnce(state[i], oriented[i], boxes[i], config);
    });
    ++result.rounds;
    active = settle();
    result.trace.push_back(
        {clock.elapsed_ms(), n - static_cast<int>(active.size())});
  }

  for (const ImportanceInterval& s : state) result.verify_calls += s.verify_calls;
  for (const std::vector<int>& group : OverlapGroups(state)) {
    result.order.insert(result.order.end(), group.begin(), group.end());
    if (group.size() > 1) result.tie_groups.push_back(group);
  }

  result.xi.assign(n, std::nullopt);
  for (int k = 0; k < n; ++k) {
    const ImportanceInterval& self = state[result.order[k]];
    std::optional<double> xi;
    if (k > 0) {
      const ImportanceInterval& above = state[result.order[k - 1]];
      xi = std::abs(above.deviation_hi() - self.deviation_lo());
    }
    if (k + 1 < n) {
      const ImportanceInterval& below = state[result.order[k + 1]];
      const double gap = std::abs(self.deviation_hi() - below.deviation_lo());
      xi = xi ? std::min(*xi, gap) : gap;
    }
    result.xi[result.order[k]] = xi;
  }
  result.elapsed_ms = clock.elapsed_ms();
  return result;
}

ImportanceOrder sort_features(const NamModel& model, std::span<const double> x,
                              const PerturbationSpec& spec,
                              const SortConfig& config,
                              std::optional<Orientation> orientation) {
  if (model.n_outputs() != 1) {
    throw InvalidArgumentError(
        "sort_features needs a single-output model; reduce multiclass first");
  }
  ValidateInstance(model, x);
  if (!orientation) {
    if (model.task() != Task::kBinary) {
      throw InvalidArgumentError(
          "sort_features: orientation required for regression models");
    }
    orientation = predict(model, x).label == 1 ? Orientation::kMinimize
                                               : Orientation::kMaximize;
  }
  std::vector<UnivariateNet> oriented;
  for (int i = 0; i < model.n_features(); ++i) {
    const UnivariateNet& f = model.component(0, i);
    oriented.push_back(*orientation == Orientation::kMinimize ? f : f.Negated());
  }
  const std::vector<Interval> boxes = PerturbationBox(model, x, spec);
  return SortOrientedComponents(oriented, boxes, x, *orientation, config);
}

}  // namespace namc
