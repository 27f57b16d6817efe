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

#ifndef NAMC_NAM_MODEL_H_
#define NAMC_NAM_MODEL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace namc {

// Closed scalar interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double midpoint() const { return lo + 0.5 * (hi - lo); }
  bool contains(double z) const { return lo <= z && z <= hi; }
  bool operator==(const Interval&) const = default;
};

// Affine map R^in -> R^out. Weights are stored row-major as [out][in].
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  double weight(int o, int i) const { return weights[o * in + i]; }
  bool operator==(const DenseLayer&) const = default;
};

// Scalar-to-scalar ReLU network: affine layers with a rectifier after every
// layer except the last.
class UnivariateNet {
 public:
  // The identity map (one 1x1 layer, weight 1, bias 0).
  UnivariateNet();

  // Throws ShapeMismatchError when shapes do not compose or the net is not
  // 1 -> 1, NonFiniteError on NaN/Inf parameters. Messages name the layer.
  explicit UnivariateNet(std::vector<DenseLayer> layers);

  static UnivariateNet Affine(double weight, double bias);

  // Net computing a(z) - b(z). Both nets are stacked side by side; the
  // shallower one is padded with rectified pass-through layers.
  static UnivariateNet Difference(const UnivariateNet& a,
                                  const UnivariateNet& b);

  // Net computing -f(z) (last layer negated).
  UnivariateNet Negated() const;

  double operator()(double z) const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  int depth() const { return static_cast<int>(layers_.size()); }
  int max_width() const { return max_width_; }
  std::size_t parameter_count() const;

  bool operator==(const UnivariateNet& other) const {
    return layers_ == other.layers_;
  }

 private:
  std::vector<DenseLayer> layers_;
  int max_width_ = 1;
};

// Exact forward pass. Each unit accumulates bias first, then inputs in
// ascending order.
double forward_component(const UnivariateNet& net, double z);

enum class Task { kBinary, kMulticlass, kRegression };

const char* TaskName(Task task);
std::optional<Task> ParseTask(const std::string& name);

struct FeatureNormalization {
  double min = 0.0;
  double max = 1.0;
  bool zero_range = false;

  bool operator==(const FeatureNormalization&) const = default;
};

struct FeatureMeta {
  std::vector<std::string> names;
  std::vector<Interval> domains;
  // Empty when the model was not fit on normalized data.
  std::vector<FeatureNormalization> normalization;

  bool operator==(const FeatureMeta&) const = default;
};

// beta_o + sum_i f_{o,i}(x_i) per output o. Binary and regression models have
// a single output; multiclass models have one output (logit) per class.
class NamModel {
 public:
  // Missing feature metadata is filled with names "x<i>" and domain [0, 1].
  NamModel(Task task, std::vector<double> intercepts,
           std::vector<std::vector<UnivariateNet>> components,
           FeatureMeta meta = {});

  Task task() const { return task_; }
  int n_features() const { return n_features_; }
  int n_outputs() const { return static_cast<int>(intercepts_.size()); }
  // 2 for binary, c for multiclass, 1 for regression.
  int n_classes() const;

  double intercept(int output) const { return intercepts_[output]; }
  const std::vector<double>& intercepts() const { return intercepts_; }
  const UnivariateNet& component(int output, int feature) const {
    return components_[output][feature];
  }
  const std::vector<std::vector<UnivariateNet>>& components() const {
    return components_;
  }
  const FeatureMeta& meta() const { return meta_; }
  const Interval& domain(int feature) const { return meta_.domains[feature]; }

  // beta_o + f_{o,0}(x_0) + f_{o,1}(x_1) + ..., summed left to right.
  double output(int output, std::span<const double> x) const;

  NamModel WithIntercepts(std::vector<double> intercepts) const;

  bool operator==(const NamModel&) const = default;

 private:
  Task task_;
  int n_features_;
  std::vector<double> intercepts_;
  std::vector<std::vector<UnivariateNet>> components_;
  FeatureMeta meta_;
};

struct Instance {
  std::vector<double> values;
  std::optional<double> label;
};

// Throws InvalidArgumentError if the length is wrong or a value lies outside
// its feature domain.
void ValidateInstance(const NamModel& model, std::span<const double> x);

struct Prediction {
  Task task = Task::kBinary;
  // Binary: 0/1. Multiclass: argmax (lowest index on ties). Regression: -1.
  int label = -1;
  // One entry per model output (the binary margin, the logits, or the
  // regression value).
  std::vector<double> outputs;

  double margin() const { return outputs.front(); }
};

// Binary: class 1 iff margin >= 0.
Prediction predict(const NamModel& model, std::span<const double> x);

// Binary model with components f_{winner,i} - f_{rival,i} and intercept
// beta_winner - beta_rival. Class 1 of the result means "winner beats rival".
NamModel reduce_pairwise(const NamModel& model, int winner, int rival);

// Per-coordinate (l-infinity) perturbation ball.
struct PerturbationSpec {
  double epsilon = 0.0;
  bool clamp_to_domain = true;

  // [x - eps, x + eps], intersected with `domain` when clamping is on.
  Interval FeatureInterval(double x, const Interval& domain) const;
};

std::vector<Interval> PerturbationBox(const NamModel& model,
                                      std::span<const double> x,
                                      const PerturbationSpec& spec);

}  // namespace namc

#endif  // NAMC_NAM_MODEL_H_
