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

#include "namc/explain.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>
#include <utility>

#include "namc/errors.h"
#include "namc/runtime.h"

namespace namc {

const char* MinimalityName(Minimality m) {
  switch (m) {
    case Minimality::kSubsetMinimal:
      return "subset-minimal";
    case Minimality::kCardinallyMinimal:
      return "cardinally-minimal";
    case Minimality::kNone:
      return "none";
  }
  return "?";
}

const char* MethodName(Method method) {
  switch (method) {
    case Method::kOurs:
      return "ours";
    case Method::kOursLinear:
      return "ours-linear";
    case Method::kLexicographic:
      return "lexicographic";
    case Method::kSensitivity:
      return "sensitivity";
    case Method::kSampling:
      return "sampling";
    case Method::kBruteForce:
      return "brute-force";
  }
  return "?";
}

std::optional<Method> ParseMethod(const std::string& name) {
  for (Method m : {Method::kOurs, Method::kOursLinear, Method::kLexicographic,
                   Method::kSensitivity, Method::kSampling,
                   Method::kBruteForce}) {
    if (name == MethodName(m)) return m;
  }
  return std::nullopt;
}

namespace {

void CheckPermutation(std::span<const int> order, int n) {
  std::vector<bool> seen(n, false);
  bool ok = static_cast<int>(order.size()) == n;
  for (int i : order) {
    if (!ok) break;
    ok = i >= 0 && i < n && !seen[i];
    if (ok) seen[i] = true;
  }
  if (!ok) {
    throw InvalidArgumentError("feature order is not a permutation of [n]");
  }
}

std::vector<int> Sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Indices sorted by key (descending or ascending), ties by index.
std::vector<int> OrderByKey(const std::vector<double>& key, bool descending) {
  std::vector<int> order(key.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return descending ? key[a] > key[b] : key[a] < key[b];
  });
  return order;
}

}  // namespace

ExplanationResult GreedyRemovalSearch(SufficiencyOracle& oracle,
                                      std::span<const int> removal_order,
                                      Minimality claim, std::string ordering) {
  const int n = oracle.n_features();
  CheckPermutation(removal_order, n);
  Stopwatch clock;
  ExplanationResult r;
  r.minimality = claim;
  r.ordering = std::move(ordering);
  r.order.assign(removal_order.begin(), removal_order.end());
  const std::int64_t calls0 = oracle.calls();
  const std::int64_t verifier0 = oracle.verifier_calls();

  std::vector<bool> kept(n, true);
  r.certificate = oracle.FullSet();
  r.trace.push_back({0.0, n});
  int size = n;
  for (int i : removal_order) {
    kept[i] = false;
    std::vector<int> subset;
    for (int j = 0; j < n; ++j) {
      if (kept[j]) subset.push_back(j);
    }
    SuffCertificate c = oracle.Check(subset);
    if (c.sufficient) {
      --size;
      r.certificate = std::move(c);
    } else {
      kept[i] = true;
    }
    r.trace.push_back({clock.elapsed_ms(), size});
  }
  for (int j = 0; j < n; ++j) {
    if (kept[j]) r.subset.push_back(j);
  }
  r.suff_calls = oracle.calls() - calls0;
  r.verifier_calls = oracle.verifier_calls() - verifier0;
  r.search_ms = clock.elapsed_ms();
  return r;
}

ExplanationResult PrefixSearch(SufficiencyOracle& oracle,
                               std::span<const int> descending_order,
                               Minimality claim, std::string ordering) {
  const int n = oracle.n_features();
  CheckPermutation(descending_order, n);
  Stopwatch clock;
  ExplanationResult r;
  r.minimality = claim;
  r.ordering = std::move(ordering);
  r.order.assign(descending_order.begin(), descending_order.end());
  const std::int64_t calls0 = oracle.calls();
  const std::int64_t verifier0 = oracle.verifier_calls();

  // Invariant: the prefix of size hi is sufficient; sizes below lo are not.
  int lo = 0;
  int hi = n;
  r.certificate = oracle.FullSet();
  r.trace.push_back({0.0, n});
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    const std::span<const int> prefix = descending_order.first(mid);
    SuffCertificate c = oracle.Check(prefix);
    if (c.sufficient) {
      hi = mid;
      r.certificate = std::move(c);
    } else {
      lo = mid + 1;
    }
    r.trace.push_back({clock.elapsed_ms(), hi});
  }
  r.subset = Sorted({descending_order.begin(), descending_order.begin() + hi});
  r.suff_calls = oracle.calls() - calls0;
  r.verifier_calls = oracle.verifier_calls() - verifier0;
  r.search_ms = clock.elapsed_ms();
  return r;
}

BruteForceResult BruteForceSearch(SufficiencyOracle& oracle) {
  const int n = oracle.n_features();
  if (n > kBruteForceMaxFeatures) {
    throw InvalidArgumentError("brute force limited to " +
                               std::to_string(kBruteForceMaxFeatures) +
                               " features");
  }
  const std::int64_t calls0 = oracle.calls();
  BruteForceResult r;
  for (int k = 0; k <= n; ++k) {
    std::vector<int> comb(k);
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      const bool sufficient =
          k == n ? oracle.FullSet().sufficient : oracle.Check(comb).sufficient;
      if (sufficient) {
        r.size = k;
        r.subset = comb;
        r.suff_calls = oracle.calls() - calls0;
        return r;
      }
      // Next combination in lexicographic order.
      int pos = k - 1;
      while (pos >= 0 && comb[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++comb[pos];
      for (int j = pos + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  throw InternalError("brute force: full feature set not sufficient");
}

QueryMode ResolveMode(const NamModel& model, std::span<const double> x,
                      const ExplainConfig& config) {
  if (model.n_outputs() != 1) {
    throw InvalidArgumentError(
        "single-output model required; reduce multiclass models first");
  }
  const bool regression = model.task() == Task::kRegression;
  if (config.mode) {
    const bool regression_mode = *config.mode != QueryMode::kClass1 &&
                                 *config.mode != QueryMode::kClass0;
    if (regression != regression_mode) {
      throw InvalidArgumentError(std::string("query mode ") +
                                 QueryModeName(*config.mode) +
                                 " does not match a " + TaskName(model.task()) +
                                 " model");
    }
    return *config.mode;
  }
  if (regression) return QueryMode::kRegressionTwoSided;
  return predict(model, x).label == 1 ? QueryMode::kClass1 : QueryMode::kClass0;
}

std::vector<double> Sensitivities(const NamModel& model, int output,
                                  std::span<const double> x,
                                  const PerturbationSpec& spec, int samples) {
  if (samples < 2) {
    throw InvalidArgumentError("sensitivity needs at least 2 samples");
  }
  ValidateInstance(model, x);
  const std::vector<Interval> boxes = PerturbationBox(model, x, spec);
  std::vector<double> s(model.n_features(), 0.0);
  for (int i = 0; i < model.n_features(); ++i) {
    const UnivariateNet& f = model.component(output, i);
    const double at_x = f(x[i]);
    const Interval& box = boxes[i];
    const double step = box.width() / (samples - 1);
    for (int j = 0; j < samples; ++j) {
      const double z = j == samples - 1 ? box.hi : box.lo + j * step;
      s[i] = std::max(s[i], std::abs(f(z) - at_x));
    }
  }
  return s;
}

std::vector<int> sensitivity_order(const NamModel& model,
                                   std::span<const double> x,
                                   const PerturbationSpec& spec, int samples) {
  if (model.n_outputs() != 1) {
    throw InvalidArgumentError("sensitivity_order: single-output model");
  }
  return OrderByKey(Sensitivities(model, 0, x, spec, samples), false);
}

namespace {

SuffConfig WithBackend(SuffConfig config, Backend backend) {
  config.backend = backend;
  return config;
}

void CheckOneSided(QueryMode mode, const ImportanceOrder& order) {
  const std::optional<Orientation> o = ModeOrientation(mode);
  if (!o) {
    throw InvalidArgumentError(
        "cardinal search needs a one-sided query; two-sided regression uses "
        "the greedy search");
  }
  if (*o != order.orientation) {
    throw InvalidArgumentError(
        "importance order orientation does not match the query mode");
  }
}

void AttachSort(ExplanationResult& r, const ImportanceOrder& order) {
  r.sort_ms = order.elapsed_ms;
  r.verifier_calls += order.verify_calls;
  for (TracePoint& p : r.trace) p.t_ms += order.elapsed_ms;
  r.importance = order;
}

// Deviation key per feature toward the deciding side(s).
std::vector<double> DeviationKeys(ComponentBounds& bounds, QueryMode mode) {
  bounds.PrefetchAll();
  std::vector<double> key(bounds.n_features());
  const std::optional<Orientation> o = ModeOrientation(mode);
  for (int i = 0; i < bounds.n_features(); ++i) {
    const FeatureExtrema& e = bounds.Get(i);
    key[i] = o ? Deviation(e, *o)
               : std::max(Deviation(e, Orientation::kMinimize),
                          Deviation(e, Orientation::kMaximize));
  }
  return key;
}

std::vector<double> ConjunctionKeys(ConjunctionOracle& oracle) {
  std::vector<double> key(oracle.n_features(), -INFINITY);
  for (std::size_t k = 0; k < oracle.rivals().size(); ++k) {
    const std::vector<double> pair =
        DeviationKeys(oracle.pairwise(static_cast<int>(k)).bounds(),
                      QueryMode::kClass1);
    for (std::size_t i = 0; i < key.size(); ++i) {
      key[i] = std::max(key[i], pair[i]);
    }
  }
  return key;
}

ExplanationResult FromBruteForce(SufficiencyOracle& oracle) {
  Stopwatch clock;
  const std::int64_t verifier0 = oracle.verifier_calls();
  const BruteForceResult b = BruteForceSearch(oracle);
  ExplanationResult r;
  r.subset = b.subset;
  r.minimality = Minimality::kCardinallyMinimal;
  r.ordering = "enumeration";
  r.suff_calls = b.suff_calls;
  r.verifier_calls = oracle.verifier_calls() - verifier0;
  r.certificate = static_cast<int>(b.subset.size()) == oracle.n_features()
                      ? oracle.FullSet()
                      : oracle.Check(b.subset);
  // The re-check is bookkeeping, not part of the search.
  r.search_ms = clock.elapsed_ms();
  r.trace = {{0.0, oracle.n_features()}, {r.search_ms, b.size}};
  return r;
}

}  // namespace

ExplanationResult explain_subset_minimal(const NamModel& model,
                                         std::span<const double> x,
                                         const PerturbationSpec& spec,
                                         Ordering ordering,
                                         const ExplainConfig& config) {
  const QueryMode mode = ResolveMode(model, x, config);
  AdditiveOracle oracle(model, x, spec, mode, config.delta, config.suff);
  std::vector<int> order(model.n_features());
  std::iota(order.begin(), order.end(), 0);
  if (ordering == Ordering::kSensitivity) {
    order = sensitivity_order(model, x, spec, config.sensitivity_samples);
  }
  ExplanationResult r = GreedyRemovalSearch(
      oracle, order, Minimality::kSubsetMinimal,
      ordering == Ordering::kSensitivity ? "sensitivity" : "lexicographic");
  r.mode = mode;
  return r;
}

ExplanationResult explain_cardinal_linear(const NamModel& model,
                                          std::span<const double> x,
                                          const PerturbationSpec& spec,
                                          const ImportanceOrder& order,
                                          const ExplainConfig& config) {
  const QueryMode mode = ResolveMode(model, x, config);
  CheckOneSided(mode, order);
  AdditiveOracle oracle(model, x, spec, mode, config.delta, config.suff);
  ExplanationResult r =
      GreedyRemovalSearch(oracle, order.removal_order(),
                          Minimality::kCardinallyMinimal, "importance");
  r.mode = mode;
  AttachSort(r, order);
  return r;
}

ExplanationResult explain_cardinal_log(const NamModel& model,
                                       std::span<const double> x,
                                       const PerturbationSpec& spec,
                                       const ImportanceOrder& order,
                                       const ExplainConfig& config) {
  const QueryMode mode = ResolveMode(model, x, config);
  CheckOneSided(mode, order);
  AdditiveOracle oracle(model, x, spec, mode, config.delta, config.suff);
  ExplanationResult r = PrefixSearch(
      oracle, order.order, Minimality::kCardinallyMinimal, "importance");
  r.mode = mode;
  AttachSort(r, order);
  return r;
}

ExplanationResult explain_sampling(const NamModel& model,
                                   std::span<const double> x,
                                   const PerturbationSpec& spec,
                                   const ExplainConfig& config) {
  const QueryMode mode = ResolveMode(model, x, config);
  SuffConfig sampling = WithBackend(config.suff, Backend::kSampling);
  sampling.sampling_grid = config.sampling_grid;
  AdditiveOracle oracle(model, x, spec, mode, config.delta, sampling);
  Stopwatch clock;
  const std::vector<int> order =
      OrderByKey(DeviationKeys(oracle.bounds(), mode), true);
  const double order_ms = clock.elapsed_ms();
  ExplanationResult r = PrefixSearch(oracle, order, Minimality::kNone,
                                     "sampled-importance");
  r.mode = mode;
  r.sort_ms = order_ms;
  for (TracePoint& p : r.trace) p.t_ms += order_ms;
  r.verifier_calls = oracle.verifier_calls();
  AdditiveOracle exact(model, x, spec, mode, config.delta,
                       WithBackend(config.suff, Backend::kExactPwl));
  r.certified_sufficient = exact.Check(r.subset).sufficient;
  return r;
}

BruteForceResult brute_force_min(const NamModel& model,
                                 std::span<const double> x,
                                 const PerturbationSpec& spec,
                                 const ExplainConfig& config) {
  const QueryMode mode = ResolveMode(model, x, config);
  AdditiveOracle oracle(model, x, spec, mode, config.delta, config.suff);
  return BruteForceSearch(oracle);
}

namespace {

ExplanationResult ExplainSingleOutput(const NamModel& model,
                                      std::span<const double> x,
                                      const PerturbationSpec& spec,
                                      Method method,
                                      const ExplainConfig& config) {
  const QueryMode mode = ResolveMode(model, x, config);
  const std::optional<Orientation> orientation = ModeOrientation(mode);
  switch (method) {
    case Method::kLexicographic:
      return explain_subset_minimal(model, x, spec, Ordering::kLexicographic,
                                    config);
    case Method::kSensitivity:
      return explain_subset_minimal(model, x, spec, Ordering::kSensitivity,
                                    config);
    case Method::kSampling:
      return explain_sampling(model, x, spec, config);
    case Method::kBruteForce: {
      AdditiveOracle oracle(model, x, spec, mode, config.delta, config.suff);
      ExplanationResult r = FromBruteForce(oracle);
      r.mode = mode;
      return r;
    }
    case Method::kOurs:
    case Method::kOursLinear:
      break;
  }
  if (orientation) {
    const ImportanceOrder order =
        sort_features(model, x, spec, config.sort, orientation);
    return method == Method::kOurs
               ? explain_cardinal_log(model, x, spec, order, config)
               : explain_cardinal_linear(model, x, spec, order, config);
  }
  // Two-sided: no single ordering is cardinally optimal.
  AdditiveOracle oracle(model, x, spec, mode, config.delta, config.suff);
  Stopwatch clock;
  const std::vector<int> removal =
      OrderByKey(DeviationKeys(oracle.bounds(), mode), false);
  const double order_ms = clock.elapsed_ms();
  ExplanationResult r = GreedyRemovalSearch(
      oracle, removal, Minimality::kSubsetMinimal, "max-deviation");
  r.mode = mode;
  r.sort_ms = order_ms;
  r.verifier_calls = oracle.verifier_calls();
  for (TracePoint& p : r.trace) p.t_ms += order_ms;
  return r;
}

ExplanationResult ExplainWinnerVsAll(const NamModel& model,
                                     std::span<const double> x,
                                     const PerturbationSpec& spec,
                                     Method method,
                                     const ExplainConfig& config) {
  const int winner = predict(model, x).label;
  const int n = model.n_features();
  const Backend backend =
      method == Method::kSampling ? Backend::kSampling : config.suff.backend;
  SuffConfig suff_config = WithBackend(config.suff, backend);
  suff_config.sampling_grid = config.sampling_grid;
  ConjunctionOracle oracle(model, x, spec, winner, suff_config);

  ExplanationResult r;
  Stopwatch clock;
  switch (method) {
    case Method::kBruteForce:
      r = FromBruteForce(oracle);
      break;
    case Method::kLexicographic: {
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      r = GreedyRemovalSearch(oracle, order, Minimality::kSubsetMinimal,
                              "lexicographic");
      break;
    }
    case Method::kSensitivity: {
      std::vector<double> key(n, 0.0);
      for (int j : oracle.rivals()) {
        const NamModel pair = reduce_pairwise(model, winner, j);
        const std::vector<double> s =
            Sensitivities(pair, 0, x, spec, config.sensitivity_samples);
        for (int i = 0; i < n; ++i) key[i] = std::max(key[i], s[i]);
      }
      r = GreedyRemovalSearch(oracle, OrderByKey(key, false),
                              Minimality::kSubsetMinimal, "sensitivity");
      break;
    }
    case Method::kSampling:
    case Method::kOurs:
    case Method::kOursLinear: {
      const std::vector<double> key = ConjunctionKeys(oracle);
      const double order_ms = clock.elapsed_ms();
      if (method == Method::kSampling) {
        r = PrefixSearch(oracle, OrderByKey(key, true), Minimality::kNone,
                         "sampled-importance");
        ConjunctionOracle exact(model, x, spec, winner,
                                WithBackend(config.suff, Backend::kExactPwl));
        r.certified_sufficient = exact.Check(r.subset).sufficient;
      } else {
        r = GreedyRemovalSearch(oracle, OrderByKey(key, false),
                                Minimality::kSubsetMinimal, "max-deviation");
      }
      r.sort_ms = order_ms;
      for (TracePoint& p : r.trace) p.t_ms += order_ms;
      break;
    }
  }
  r.verifier_calls = oracle.verifier_calls();
  r.mode = QueryMode::kClass1;
  return r;
}

}  // namespace

ExplanationResult explain_instance(const NamModel& model,
                                   std::span<const double> x,
                                   const PerturbationSpec& spec, Method method,
                                   const ExplainConfig& config,
                                   std::optional<int> rival) {
  ValidateInstance(model, x);
  if (model.task() != Task::kMulticlass) {
    if (rival) {
      throw InvalidArgumentError("--rival applies to multiclass models only");
    }
    return ExplainSingleOutput(model, x, spec, method, config);
  }
  const int winner = predict(model, x).label;
  if (!rival && model.n_outputs() == 2) rival = 1 - winner;
  if (!rival) return ExplainWinnerVsAll(model, x, spec, method, config);
  const NamModel pair = reduce_pairwise(model, winner, *rival);
  ExplainConfig pair_config = config;
  pair_config.mode = QueryMode::kClass1;
  return ExplainSingleOutput(pair, x, spec, method, pair_config);
}

}  // namespace namc
