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

#include "namc/nam_model.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "namc/errors.h"

namespace namc {

namespace {

std::string LayerWhere(std::size_t k) { return "layer " + std::to_string(k); }

void CheckLayer(const DenseLayer& layer, std::size_t k) {
  if (layer.in < 1 || layer.out < 1) {
    throw ShapeMismatchError(LayerWhere(k) + ": empty layer");
  }
  if (layer.weights.size() != static_cast<std::size_t>(layer.in) * layer.out) {
    throw ShapeMismatchError(LayerWhere(k) + ": weight count " +
                             std::to_string(layer.weights.size()) +
                             " does not match shape " +
                             std::to_string(layer.out) + "x" +
                             std::to_string(layer.in));
  }
  if (layer.bias.size() != static_cast<std::size_t>(layer.out)) {
    throw ShapeMismatchError(LayerWhere(k) + ": bias length " +
                             std::to_string(layer.bias.size()) +
                             " != out width " + std::to_string(layer.out));
  }
  for (double w : layer.weights) {
    if (!std::isfinite(w)) {
      throw NonFiniteError(LayerWhere(k) + ": non-finite weight");
    }
  }
  for (double b : layer.bias) {
    if (!std::isfinite(b)) {
      throw NonFiniteError(LayerWhere(k) + ": non-finite bias");
    }
  }
}

// Re-expresses `net` with exactly `depth` layers without changing the
// function it computes. The output y is split into ReLU(y) and ReLU(-y),
// carried through identity layers, and recombined as ReLU(y) - ReLU(-y).
std::vector<DenseLayer> PadToDepth(const UnivariateNet& net, int depth) {
  std::vector<DenseLayer> layers = net.layers();
  const int extra = depth - net.depth();
  if (extra <= 0) return layers;
  DenseLayer last = layers.back();
  layers.pop_back();
  DenseLayer split{last.in, 2, {}, {last.bias[0], -last.bias[0]}};
  split.weights = last.weights;
  for (double w : last.weights) split.weights.push_back(-w);
  layers.push_back(std::move(split));
  for (int k = 0; k + 1 < extra; ++k) {
    layers.push_back(DenseLayer{2, 2, {1.0, 0.0, 0.0, 1.0}, {0.0, 0.0}});
  }
  layers.push_back(DenseLayer{2, 1, {1.0, -1.0}, {0.0}});
  return layers;
}

}  // namespace

UnivariateNet::UnivariateNet() : UnivariateNet(std::vector<DenseLayer>{
                                     DenseLayer{1, 1, {1.0}, {0.0}}}) {}

UnivariateNet::UnivariateNet(std::vector<DenseLayer> layers)
    : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeMismatchError("network has no layers");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    CheckLayer(layers_[k], k);
    if (k > 0 && layers_[k].in != layers_[k - 1].out) {
      throw ShapeMismatchError(
          LayerWhere(k) + ": in width " + std::to_string(layers_[k].in) +
          " != previous out width " + std::to_string(layers_[k - 1].out));
    }
    max_width_ = std::max({max_width_, layers_[k].in, layers_[k].out});
  }
  if (layers_.front().in != 1) {
    throw ShapeMismatchError(LayerWhere(0) + ": input width must be 1");
  }
  if (layers_.back().out != 1) {
    throw ShapeMismatchError(LayerWhere(layers_.size() - 1) +
                             ": output width must be 1");
  }
}

UnivariateNet UnivariateNet::Affine(double weight, double bias) {
  return UnivariateNet({DenseLayer{1, 1, {weight}, {bias}}});
}

UnivariateNet UnivariateNet::Difference(const UnivariateNet& a,
                                        const UnivariateNet& b) {
  const int depth = std::max(a.depth(), b.depth());
  const std::vector<DenseLayer> la = PadToDepth(a, depth);
  const std::vector<DenseLayer> lb = PadToDepth(b, depth);
  std::vector<DenseLayer> out;
  if (depth == 1) {
    out.push_back(DenseLayer{1, 1, {la[0].weights[0] - lb[0].weights[0]},
                             {la[0].bias[0] - lb[0].bias[0]}});
    return UnivariateNet(std::move(out));
  }
  for (int k = 0; k < depth; ++k) {
    const DenseLayer& x = la[k];
    const DenseLayer& y = lb[k];
    const bool first = k == 0;
    const bool last = k == depth - 1;
    DenseLayer layer;
    layer.in = first ? 1 : x.in + y.in;
    layer.out = last ? 1 : x.out + y.out;
    layer.weights.assign(static_cast<std::size_t>(layer.in) * layer.out, 0.0);
    if (last) {
      for (int i = 0; i < x.in; ++i) layer.weights[i] = x.weight(0, i);
      for (int i = 0; i < y.in; ++i) layer.weights[x.in + i] = -y.weight(0, i);
      layer.bias = {x.bias[0] - y.bias[0]};
    } else {
      const int y_col = first ? 0 : x.in;
      for (int o = 0; o < x.out; ++o) {
        for (int i = 0; i < x.in; ++i) {
          layer.weights[o * layer.in + i] = x.weight(o, i);
        }
      }
      for (int o = 0; o < y.out; ++o) {
        for (int i = 0; i < y.in; ++i) {
          layer.weights[(x.out + o) * layer.in + y_col + i] = y.weight(o, i);
        }
      }
      layer.bias = x.bias;
      layer.bias.insert(layer.bias.end(), y.bias.begin(), y.bias.end());
    }
    out.push_back(std::move(layer));
  }
  return UnivariateNet(std::move(out));
}

UnivariateNet UnivariateNet::Negated() const {
  std::vector<DenseLayer> layers = layers_;
  for (double& w : layers.back().weights) w = -w;
  for (double& b : layers.back().bias) b = -b;
  return UnivariateNet(std::move(layers));
}

double UnivariateNet::operator()(double z) const {
  std::vector<double> cur(max_width_), next(max_width_);
  cur[0] = z;
  const std::size_t last = layers_.size() - 1;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const DenseLayer& layer = layers_[k];
    for (int o = 0; o < layer.out; ++o) {
      const double* row = layer.weights.data() + o * layer.in;
      double acc = layer.bias[o];
      for (int i = 0; i < layer.in; ++i) acc += row[i] * cur[i];
      next[o] = (k == last || acc > 0.0) ? acc : 0.0;
    }
    std::swap(cur, next);
  }
  return cur[0];
}

std::size_t UnivariateNet::parameter_count() const {
  std::size_t count = 0;
  for (const DenseLayer& layer : layers_) {
    count += layer.weights.size() + layer.bias.size();
  }
  return count;
}

double forward_component(const UnivariateNet& net, double z) { return net(z); }

const char* TaskName(Task task) {
  switch (task) {
    case Task::kBinary:
      return "binary";
    case Task::kMulticlass:
      return "multiclass";
    case Task::kRegression:
      return "regression";
  }
  return "?";
}

std::optional<Task> ParseTask(const std::string& name) {
  if (name == "binary") return Task::kBinary;
  if (name == "multiclass") return Task::kMulticlass;
  if (name == "regression") return Task::kRegression;
  return std::nullopt;
}

NamModel::NamModel(Task task, std::vector<double> intercepts,
                   std::vector<std::vector<UnivariateNet>> components,
                   FeatureMeta meta)
    : task_(task),
      n_features_(0),
      intercepts_(std::move(intercepts)),
      components_(std::move(components)),
      meta_(std::move(meta)) {
  if (intercepts_.size() != components_.size()) {
    throw ShapeMismatchError("intercepts: " +
                             std::to_string(intercepts_.size()) +
                             " intercepts for " +
                             std::to_string(components_.size()) + " outputs");
  }
  if (task_ == Task::kMulticlass) {
    if (components_.size() < 2) {
      throw ShapeMismatchError("components: multiclass needs >= 2 classes");
    }
  } else if (components_.size() != 1) {
    throw ShapeMismatchError(std::string("components: ") + TaskName(task_) +
                             " model needs exactly one output");
  }
  for (double b : intercepts_) {
    if (!std::isfinite(b)) throw NonFiniteError("intercepts: non-finite value");
  }
  n_features_ = static_cast<int>(components_.front().size());
  if (n_features_ < 1) throw ShapeMismatchError("components: no features");
  for (std::size_t o = 0; o < components_.size(); ++o) {
    if (static_cast<int>(components_[o].size()) != n_features_) {
      throw ShapeMismatchError("components[" + std::to_string(o) + "]: " +
                               std::to_string(components_[o].size()) +
                               " components, expected " +
                               std::to_string(n_features_));
    }
  }
  if (meta_.names.empty()) {
    for (int i = 0; i < n_features_; ++i) {
      meta_.names.push_back("x" + std::to_string(i));
    }
  }
  if (meta_.domains.empty()) meta_.domains.assign(n_features_, {0.0, 1.0});
  if (static_cast<int>(meta_.names.size()) != n_features_ ||
      static_cast<int>(meta_.domains.size()) != n_features_) {
    throw ShapeMismatchError("feature_meta: length != n_features");
  }
  if (!meta_.normalization.empty() &&
      static_cast<int>(meta_.normalization.size()) != n_features_) {
    throw ShapeMismatchError("feature_meta.normalization: length != n_features");
  }
  for (int i = 0; i < n_features_; ++i) {
    const Interval& d = meta_.domains[i];
    if (!std::isfinite(d.lo) || !std::isfinite(d.hi) || d.lo > d.hi) {
      throw SchemaError("feature_meta.domains[" + std::to_string(i) +
                        "]: invalid domain");
    }
  }
}

int NamModel::n_classes() const {
  switch (task_) {
    case Task::kBinary:
      return 2;
    case Task::kMulticlass:
      return n_outputs();
    case Task::kRegression:
      return 1;
  }
  return 0;
}

double NamModel::output(int output, std::span<const double> x) const {
  double acc = intercepts_[output];
  const std::vector<UnivariateNet>& nets = components_[output];
  for (int i = 0; i < n_features_; ++i) acc += nets[i](x[i]);
  return acc;
}

NamModel NamModel::WithIntercepts(std::vector<double> intercepts) const {
  return NamModel(task_, std::move(intercepts), components_, meta_);
}

void ValidateInstance(const NamModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.n_features()) {
    throw InvalidArgumentError("instance has " + std::to_string(x.size()) +
                               " values, model expects " +
                               std::to_string(model.n_features()));
  }
  for (int i = 0; i < model.n_features(); ++i) {
    if (!std::isfinite(x[i]) || !model.domain(i).contains(x[i])) {
      throw InvalidArgumentError("instance value " + std::to_string(x[i]) +
                                 " of feature " + std::to_string(i) +
                                 " lies outside its domain");
    }
  }
}

Prediction predict(const NamModel& model, std::span<const double> x) {
  Prediction p;
  p.task = model.task();
  for (int o = 0; o < model.n_outputs(); ++o) {
    p.outputs.push_back(model.output(o, x));
  }
  switch (model.task()) {
    case Task::kBinary:
      p.label = p.outputs[0] >= 0.0 ? 1 : 0;
      break;
    case Task::kMulticlass:
      p.label = static_cast<int>(
          std::max_element(p.outputs.begin(), p.outputs.end()) -
          p.outputs.begin());
      break;
    case Task::kRegression:
      p.label = -1;
      break;
  }
  return p;
}

NamModel reduce_pairwise(const NamModel& model, int winner, int rival) {
  if (model.task() != Task::kMulticlass) {
    throw InvalidArgumentError("reduce_pairwise needs a multiclass model");
  }
  const int c = model.n_outputs();
  if (winner < 0 || winner >= c || rival < 0 || rival >= c) {
    throw InvalidArgumentError("class index out of range");
  }
  if (winner == rival) {
    throw InvalidArgumentError("winner and rival must differ");
  }
  std::vector<UnivariateNet> nets;
  for (int i = 0; i < model.n_features(); ++i) {
    nets.push_back(UnivariateNet::Difference(model.component(winner, i),
                                             model.component(rival, i)));
  }
  return NamModel(Task::kBinary,
                  {model.intercept(winner) - model.intercept(rival)},
                  {std::move(nets)}, model.meta());
}

Interval PerturbationSpec::FeatureInterval(double x,
                                           const Interval& domain) const {
  if (!(epsilon >= 0.0)) {
    throw InvalidArgumentError("perturbation radius must be >= 0");
  }
  Interval box{x - epsilon, x + epsilon};
  if (clamp_to_domain) {
    box.lo = std::max(box.lo, domain.lo);
    box.hi = std::min(box.hi, domain.hi);
    if (box.lo > box.hi) {
      throw InvalidArgumentError("perturbation interval is empty");
    }
  }
  return box;
}

std::vector<Interval> PerturbationBox(const NamModel& model,
                                      std::span<const double> x,
                                      const PerturbationSpec& spec) {
  std::vector<Interval> box;
  box.reserve(model.n_features());
  for (int i = 0; i < model.n_features(); ++i) {
    box.push_back(spec.FeatureInterval(x[i], model.domain(i)));
  }
  return box;
}

}  // namespace namc
