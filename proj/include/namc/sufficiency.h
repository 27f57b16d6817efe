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

#ifndef NAMC_SUFFICIENCY_H_
#define NAMC_SUFFICIENCY_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "namc/exact_pwl.h"
#include "namc/importance.h"
#include "namc/nam_model.h"
#include "namc/verifier.h"

namespace namc {

// What "the prediction is unchanged" means for a query.
//   kClass1:            lower bound on the margin stays >= 0
//   kClass0:            upper bound on the margin stays < 0
//   kRegressionLower:   lower bound stays >= f(x) - delta
//   kRegressionUpper:   upper bound stays <= f(x) + delta
//   kRegressionTwoSided both of the above
enum class QueryMode {
  kClass1,
  kClass0,
  kRegressionLower,
  kRegressionUpper,
  kRegressionTwoSided,
};

const char* QueryModeName(QueryMode mode);
std::optional<QueryMode> ParseQueryMode(const std::string& name);

// The component extremum a one-sided mode pushes toward. Two-sided queries
// have none.
std::optional<Orientation> ModeOrientation(QueryMode mode);

// Source of per-feature extrema inside suff.
enum class Backend {
  kExactPwl,  // exact piecewise-linear propagation
  kVerifier,  // branch-and-bound run to convergence (certified lower bound)
  kSampling,  // evenly spaced grid, endpoints included; not certified
};

const char* BackendName(Backend backend);
std::optional<Backend> ParseBackend(const std::string& name);

struct SuffConfig {
  Backend backend = Backend::kExactPwl;
  // Verdicts require the bound to clear the threshold by this much, so that
  // a Sufficient verdict survives floating-point roundoff.
  double tolerance = 1e-9;
  VerifyBudget verify;
  PwlOptions pwl;
  int sampling_grid = 1000;
  // Workers for computing missing extrema within one call.
  int processors = 1;
};

// Extremal values of one component over its perturbation interval. min and
// max always include the unperturbed value f_i(x_i).
struct FeatureExtrema {
  double at_x = 0.0;
  double min = 0.0;
  double argmin = 0.0;
  double max = 0.0;
  double argmax = 0.0;
};

// f_i(x_i) - min f_i (kMinimize) or max f_i - f_i(x_i) (kMaximize).
double Deviation(const FeatureExtrema& e, Orientation orientation);

// Lazily computed, cached extrema for every feature of one single-output
// model.
class ComponentBounds {
 public:
  ComponentBounds(const NamModel& model, std::span<const double> x,
                  const PerturbationSpec& spec, const SuffConfig& config);

  int n_features() const { return static_cast<int>(boxes_.size()); }
  const Interval& box(int feature) const { return boxes_[feature]; }
  double at_x(int feature) const { return at_x_[feature]; }

  const FeatureExtrema& Get(int feature);
  // Computes every missing entry among `features`, in parallel.
  void Prefetch(std::span<const int> features);
  void PrefetchAll();

  // Univariate extremum queries issued so far (one per computed min or max).
  std::int64_t verifier_calls() const { return verifier_calls_; }

 private:
  FeatureExtrema Compute(int feature) const;

  const NamModel* model_;
  SuffConfig config_;
  std::vector<double> x_;
  std::vector<Interval> boxes_;
  std::vector<double> at_x_;
  std::vector<std::optional<FeatureExtrema>> cache_;
  std::int64_t verifier_calls_ = 0;
};

struct SuffCertificate {
  bool sufficient = true;
  // Bounds on the output over the free region, summed left to right.
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
  // The bound that decided the verdict.
  double margin_bound = 0.0;
  // Per feature: x_i when fixed, otherwise the extremum used on the deciding
  // side.
  std::vector<double> extremal_values;
  // Free features at their extremizers, fixed features at x. Present iff
  // Insufficient.
  std::optional<std::vector<double>> counterexample;
  // The counterexample changes the prediction when re-evaluated (false only
  // for bounds within the tolerance of the threshold).
  bool counterexample_confirmed = false;
  // Winner-vs-all queries: the first rival that was not excluded.
  std::optional<int> rival;
};

// Sufficiency decision over feature subsets. Every Check counts as one call.
class SufficiencyOracle {
 public:
  virtual ~SufficiencyOracle() = default;

  virtual int n_features() const = 0;
  SuffCertificate Check(std::span<const int> subset);
  // Certificate for the full feature set. Not counted.
  virtual SuffCertificate FullSet() const = 0;
  virtual std::int64_t verifier_calls() const = 0;
  std::int64_t calls() const { return calls_; }

 protected:
  virtual SuffCertificate DoCheck(const std::vector<bool>& fixed) = 0;

 private:
  std::int64_t calls_ = 0;
};

// Exact additive decomposition for a single-output model.
class AdditiveOracle : public SufficiencyOracle {
 public:
  AdditiveOracle(const NamModel& model, std::span<const double> x,
                 const PerturbationSpec& spec, QueryMode mode, double delta,
                 const SuffConfig& config = {});

  int n_features() const override { return bounds_.n_features(); }
  SuffCertificate FullSet() const override;
  std::int64_t verifier_calls() const override {
    return bounds_.verifier_calls();
  }

  QueryMode mode() const { return mode_; }
  // f(x).
  double reference() const { return reference_; }
  ComponentBounds& bounds() { return bounds_; }

 protected:
  SuffCertificate DoCheck(const std::vector<bool>& fixed) override;

 private:
  bool Violates(double output) const;

  const NamModel* model_;
  std::vector<double> x_;
  QueryMode mode_;
  double delta_;
  double tolerance_;
  double reference_;
  ComponentBounds bounds_;
};

// Winner-vs-all multiclass sufficiency: the conjunction of the pairwise
// class-1 queries "winner beats rival" over every rival.
class ConjunctionOracle : public SufficiencyOracle {
 public:
  ConjunctionOracle(const NamModel& model, std::span<const double> x,
                    const PerturbationSpec& spec, int winner,
                    const SuffConfig& config = {});

  int n_features() const override { return n_features_; }
  SuffCertificate FullSet() const override;
  std::int64_t verifier_calls() const override;

  int winner() const { return winner_; }
  const std::vector<int>& rivals() const { return rivals_; }
  AdditiveOracle& pairwise(int k) { return *pairs_[k]; }

 protected:
  SuffCertificate DoCheck(const std::vector<bool>& fixed) override;

 private:
  const NamModel* model_;
  std::vector<double> x_;
  int winner_;
  int n_features_;
  std::vector<int> rivals_;
  std::vector<NamModel> reduced_;
  std::vector<std::unique_ptr<AdditiveOracle>> pairs_;
};

struct SufficiencyQuery {
  const NamModel* model = nullptr;  // single-output
  std::vector<double> x;
  PerturbationSpec spec;
  std::vector<int> subset;
  QueryMode mode = QueryMode::kClass1;
  double delta = 0.0;
};

// One-shot sufficiency check.
SuffCertificate suff(const SufficiencyQuery& query,
                     const SuffConfig& config = {});

}  // namespace namc

#endif  // NAMC_SUFFICIENCY_H_
