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

#include "namc/sufficiency.h"

#include <algorithm>
#include <string>
#include <utility>

#include "namc/errors.h"
#include "namc/runtime.h"

namespace namc {

const char* QueryModeName(QueryMode mode) {
  switch (mode) {
    case QueryMode::kClass1:
      return "class1";
    case QueryMode::kClass0:
      return "class0";
    case QueryMode::kRegressionLower:
      return "regression-lower";
    case QueryMode::kRegressionUpper:
      return "regression-upper";
    case QueryMode::kRegressionTwoSided:
      return "regression-two-sided";
  }
  return "?";
}

std::optional<QueryMode> ParseQueryMode(const std::string& name) {
  for (QueryMode m : {QueryMode::kClass1, QueryMode::kClass0,
                      QueryMode::kRegressionLower, QueryMode::kRegressionUpper,
                      QueryMode::kRegressionTwoSided}) {
    if (name == QueryModeName(m)) return m;
  }
  return std::nullopt;
}

std::optional<Orientation> ModeOrientation(QueryMode mode) {
  switch (mode) {
    case QueryMode::kClass1:
    case QueryMode::kRegressionLower:
      return Orientation::kMinimize;
    case QueryMode::kClass0:
    case QueryMode::kRegressionUpper:
      return Orientation::kMaximize;
    case QueryMode::kRegressionTwoSided:
      return std::nullopt;
  }
  return std::nullopt;
}

const char* BackendName(Backend backend) {
  switch (backend) {
    case Backend::kExactPwl:
      return "exact-pwl";
    case Backend::kVerifier:
      return "verifier";
    case Backend::kSampling:
      return "sampling";
  }
  return "?";
}

std::optional<Backend> ParseBackend(const std::string& name) {
  for (Backend b : {Backend::kExactPwl, Backend::kVerifier, Backend::kSampling}) {
    if (name == BackendName(b)) return b;
  }
  return std::nullopt;
}

double Deviation(const FeatureExtrema& e, Orientation orientation) {
  return orientation == Orientation::kMinimize ? e.at_x - e.min
                                               : e.max - e.at_x;
}

ComponentBounds::ComponentBounds(const NamModel& model,
                                 std::span<const double> x,
                                 const PerturbationSpec& spec,
                                 const SuffConfig& config)
    : model_(&model), config_(config) {
  if (model.n_outputs() != 1) {
    throw InvalidArgumentError("ComponentBounds: single-output model required");
  }
  if (config.sampling_grid < 2) {
    throw InvalidArgumentError("sampling grid must have at least 2 points");
  }
  ValidateInstance(model, x);
  boxes_ = PerturbationBox(model, x, spec);
  x_.assign(x.begin(), x.end());
  for (int i = 0; i < model.n_features(); ++i) {
    at_x_.push_back(model.component(0, i)(x[i]));
  }
  cache_.resize(boxes_.size());
}

FeatureExtrema ComponentBounds::Compute(int feature) const {
  const UnivariateNet& net = model_->component(0, feature);
  const Interval& box = boxes_[feature];
  FeatureExtrema e;
  e.at_x = at_x_[feature];
  switch (config_.backend) {
    case Backend::kExactPwl: {
      const Extrema ex = exact_extrema(propagate(net, box, config_.pwl));
      e.min = ex.min;
      e.argmin = ex.argmin;
      e.max = ex.max;
      e.argmax = ex.argmax;
      break;
    }
    case Backend::kVerifier: {
      try {
        const MinBound lo = min_lower_bound(net, box, config_.verify);
        const MinBound hi = min_lower_bound(net.Negated(), box, config_.verify);
        e.min = lo.lower;
        e.argmin = lo.best.z;
        e.max = -hi.lower;
        e.argmax = hi.best.z;
      } catch (const BudgetExceededError& err) {
        throw FeatureBudgetError(feature, err.what());
      }
      break;
    }
    case Backend::kSampling: {
      const int k = config_.sampling_grid;
      const double step = box.width() / (k - 1);
      e.min = e.max = net(box.lo);
      e.argmin = e.argmax = box.lo;
      for (int j = 1; j < k; ++j) {
        const double z = j == k - 1 ? box.hi : box.lo + j * step;
        const double v = net(z);
        if (v < e.min) {
          e.min = v;
          e.argmin = z;
        }
        if (v > e.max) {
          e.max = v;
          e.argmax = z;
        }
      }
      break;
    }
  }
  // The unperturbed point is always in the region.
  if (e.at_x < e.min) {
    e.min = e.at_x;
    e.argmin = x_[feature];
  }
  if (e.at_x > e.max) {
    e.max = e.at_x;
    e.argmax = x_[feature];
  }
  return e;
}

const FeatureExtrema& ComponentBounds::Get(int feature) {
  if (!cache_[feature]) {
    cache_[feature] = Compute(feature);
    verifier_calls_ += 2;
  }
  return *cache_[feature];
}

void ComponentBounds::Prefetch(std::span<const int> features) {
  std::vector<int> missing;
  for (int i : features) {
    if (!cache_[i]) missing.push_back(i);
  }
  if (missing.empty()) return;
  ParallelFor(static_cast<int>(missing.size()),
              EffectiveWorkers(config_.processors),
              [&](int k) { cache_[missing[k]] = Compute(missing[k]); });
  verifier_calls_ += 2 * static_cast<std::int64_t>(missing.size());
}

void ComponentBounds::PrefetchAll() {
  std::vector<int> all(boxes_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  Prefetch(all);
}

SuffCertificate SufficiencyOracle::Check(std::span<const int> subset) {
  std::vector<bool> fixed(n_features(), false);
  for (int i : subset) {
    if (i < 0 || i >= n_features()) {
      throw InvalidArgumentError("subset index " + std::to_string(i) +
                                 " out of range");
    }
    if (fixed[i]) {
      throw InvalidArgumentError("duplicate subset index " +
                                 std::to_string(i));
    }
    fixed[i] = true;
  }
  ++calls_;
  return DoCheck(fixed);
}

AdditiveOracle::AdditiveOracle(const NamModel& model,
                               std::span<const double> x,
                               const PerturbationSpec& spec, QueryMode mode,
                               double delta, const SuffConfig& config)
    : model_(&model),
      x_(x.begin(), x.end()),
      mode_(mode),
      delta_(delta),
      tolerance_(config.tolerance),
      reference_(0.0),
      bounds_(model, x, spec, config) {
  if (!(delta >= 0.0)) {
    throw InvalidArgumentError("delta must be >= 0");
  }
  if (!(spec.epsilon >= 0.0)) {
    throw InvalidArgumentError("epsilon must be >= 0");
  }
  reference_ = model.output(0, x_);
}

bool AdditiveOracle::Violates(double output) const {
  switch (mode_) {
    case QueryMode::kClass1:
      return output < 0.0;
    case QueryMode::kClass0:
      return output >= 0.0;
    case QueryMode::kRegressionLower:
      return output < reference_ - delta_;
    case QueryMode::kRegressionUpper:
      return output > reference_ + delta_;
    case QueryMode::kRegressionTwoSided:
      return output < reference_ - delta_ || output > reference_ + delta_;
  }
  return false;
}

SuffCertificate AdditiveOracle::FullSet() const {
  SuffCertificate c;
  c.sufficient = true;
  c.lower_bound = reference_;
  c.upper_bound = reference_;
  c.margin_bound = reference_;
  for (int i = 0; i < n_features(); ++i) {
    c.extremal_values.push_back(bounds_.at_x(i));
  }
  return c;
}

SuffCertificate AdditiveOracle::DoCheck(const std::vector<bool>& fixed) {
  const int n = n_features();
  std::vector<int> free;
  for (int i = 0; i < n; ++i) {
    if (!fixed[i]) free.push_back(i);
  }
  if (free.empty()) return FullSet();
  bounds_.Prefetch(free);

  const bool want_lower = mode_ != QueryMode::kClass0 &&
                          mode_ != QueryMode::kRegressionUpper;
  const bool want_upper = mode_ != QueryMode::kClass1 &&
                          mode_ != QueryMode::kRegressionLower;
  double lower = model_->intercept(0);
  double upper = model_->intercept(0);
  for (int i = 0; i < n; ++i) {
    if (fixed[i]) {
      lower += bounds_.at_x(i);
      upper += bounds_.at_x(i);
    } else {
      const FeatureExtrema& e = bounds_.Get(i);
      lower += e.min;
      upper += e.max;
    }
  }

  bool lower_ok = true;
  bool upper_ok = true;
  switch (mode_) {
    case QueryMode::kClass1:
      lower_ok = lower >= tolerance_;
      break;
    case QueryMode::kClass0:
      upper_ok = upper + tolerance_ < 0.0;
      break;
    case QueryMode::kRegressionLower:
      lower_ok = lower >= reference_ - delta_ + tolerance_;
      break;
    case QueryMode::kRegressionUpper:
      upper_ok = upper <= reference_ + delta_ - tolerance_;
      break;
    case QueryMode::kRegressionTwoSided:
      lower_ok = lower >= reference_ - delta_ + tolerance_;
      upper_ok = upper <= reference_ + delta_ - tolerance_;
      break;
  }

  SuffCertificate c;
  c.sufficient = lower_ok && upper_ok;
  if (want_lower) c.lower_bound = lower;
  if (want_upper) c.upper_bound = upper;
  // The deciding side: the failing one, else the lower side when present.
  const bool use_lower = !lower_ok || (upper_ok && want_lower);
  c.margin_bound = use_lower ? lower : upper;
  c.extremal_values.resize(n);
  for (int i = 0; i < n; ++i) {
    if (fixed[i]) {
      c.extremal_values[i] = bounds_.at_x(i);
    } else {
      const FeatureExtrema& e = bounds_.Get(i);
      c.extremal_values[i] = use_lower ? e.min : e.max;
    }
  }
  if (!c.sufficient) {
    std::vector<double> z = x_;
    for (int i : free) {
      const FeatureExtrema& e = bounds_.Get(i);
      z[i] = use_lower ? e.argmin : e.argmax;
    }
    c.counterexample_confirmed = Violates(model_->output(0, z));
    c.counterexample = std::move(z);
  }
  return c;
}

ConjunctionOracle::ConjunctionOracle(const NamModel& model,
                                     std::span<const double> x,
                                     const PerturbationSpec& spec, int winner,
                                     const SuffConfig& config)
    : model_(&model),
      x_(x.begin(), x.end()),
      winner_(winner),
      n_features_(model.n_features()) {
  if (model.task() != Task::kMulticlass) {
    throw InvalidArgumentError("ConjunctionOracle needs a multiclass model");
  }
  if (winner < 0 || winner >= model.n_outputs()) {
    throw InvalidArgumentError("winner class out of range");
  }
  // Oracles keep pointers into reduced_, so it must not reallocate.
  reduced_.reserve(model.n_outputs() - 1);
  for (int j = 0; j < model.n_outputs(); ++j) {
    if (j == winner) continue;
    rivals_.push_back(j);
    reduced_.push_back(reduce_pairwise(model, winner, j));
    pairs_.push_back(std::make_unique<AdditiveOracle>(
        reduced_.back(), x, spec, QueryMode::kClass1, 0.0, config));
  }
}

std::int64_t ConjunctionOracle::verifier_calls() const {
  std::int64_t total = 0;
  for (const auto& p : pairs_) total += p->verifier_calls();
  return total;
}

SuffCertificate ConjunctionOracle::FullSet() const {
  SuffCertificate best = pairs_.front()->FullSet();
  for (const auto& p : pairs_) {
    SuffCertificate c = p->FullSet();
    if (c.margin_bound < best.margin_bound) best = std::move(c);
  }
  return best;
}

SuffCertificate ConjunctionOracle::DoCheck(const std::vector<bool>& fixed) {
  std::vector<int> subset;
  for (int i = 0; i < n_features_; ++i) {
    if (fixed[i]) subset.push_back(i);
  }
  std::optional<SuffCertificate> tightest;
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    SuffCertificate c = pairs_[k]->Check(subset);
    c.rival = rivals_[k];
    if (!c.sufficient) {
      if (c.counterexample) {
        c.counterexample_confirmed =
            predict(*model_, *c.counterexample).label != winner_;
      }
      return c;
    }
    if (!tightest || c.margin_bound < tightest->margin_bound) {
      tightest = std::move(c);
    }
  }
  return *tightest;
}

SuffCertificate suff(const SufficiencyQuery& query, const SuffConfig& config) {
  if (query.model == nullptr) {
    throw InvalidArgumentError("suff: no model");
  }
  AdditiveOracle oracle(*query.model, query.x, query.spec, query.mode,
                        query.delta, config);
  return oracle.Check(query.subset);
}

}  // namespace namc
