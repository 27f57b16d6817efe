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

#include "namc/synthetic.h"

#include <cmath>
#include <numbers>
#include <utility>

#include "namc/errors.h"
#include "namc/exact_pwl.h"

namespace namc {

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::Normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

int Rng::UniformInt(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(engine_() % span);
}

UnivariateNet RandomNet(Rng& rng, const std::vector<int>& hidden) {
  std::vector<DenseLayer> layers;
  int in = 1;
  std::vector<int> widths = hidden;
  widths.push_back(1);
  for (std::size_t k = 0; k < widths.size(); ++k) {
    DenseLayer layer;
    layer.in = in;
    layer.out = widths[k];
    const double sd = std::sqrt(2.0 / in);
    for (int o = 0; o < layer.out; ++o) {
      for (int i = 0; i < in; ++i) layer.weights.push_back(sd * rng.Normal());
    }
    for (int o = 0; o < layer.out; ++o) {
      if (k == 0) {
        // Kink of unit o at a uniform point of [0, 1].
        layer.bias.push_back(-layer.weights[o] * rng.Uniform());
      } else if (k + 1 < widths.size()) {
        layer.bias.push_back(0.1 * rng.Normal());
      } else {
        layer.bias.push_back(0.0);
      }
    }
    layers.push_back(std::move(layer));
    in = widths[k];
  }
  return UnivariateNet(std::move(layers));
}

UnivariateNet SpikeNet(double center, double width, double depth) {
  if (!(width > 0.0)) throw InvalidArgumentError("spike width must be > 0");
  DenseLayer hidden{1, 3, {1.0, 1.0, 1.0},
                    {-(center - width), -center, -(center + width)}};
  const double s = -depth / width;
  DenseLayer out{3, 1, {s, -2.0 * s, s}, {0.0}};
  return UnivariateNet({hidden, out});
}

SpikePlacement PlaceSpike(const Interval& box, double x, int grid) {
  if (grid < 2) throw InvalidArgumentError("spike grid must be >= 2");
  if (!(box.width() > 0.0)) {
    throw InvalidArgumentError("spike needs a non-degenerate interval");
  }
  const double spacing = box.width() / (grid - 1);
  const double width = spacing / 8.0;
  // Cell k spans grid points k and k + 1; prefer cells away from x.
  for (int k : {(grid - 1) / 4, 3 * (grid - 1) / 4, 0, grid - 2}) {
    const double center = box.lo + (k + 0.5) * spacing;
    if (std::abs(center - x) > 2.0 * width) return {center, width};
  }
  throw InternalError("no spike cell clear of x");
}

std::vector<double> RandomInstance(Rng& rng, int n_features) {
  std::vector<double> x(n_features);
  for (double& v : x) v = rng.Uniform();
  return x;
}

NamModel WithSlack(const NamModel& model, std::span<const double> x,
                   Orientation orientation, double slack) {
  if (model.n_outputs() != 1) {
    throw InvalidArgumentError("WithSlack: single-output model");
  }
  const double rest = model.output(0, x) - model.intercept(0);
  const double target = orientation == Orientation::kMinimize ? slack : -slack;
  return model.WithIntercepts({target - rest});
}

double TotalDeviation(const NamModel& model, std::span<const double> x,
                      const PerturbationSpec& spec, Orientation orientation) {
  const std::vector<Interval> boxes = PerturbationBox(model, x, spec);
  double total = 0.0;
  for (int i = 0; i < model.n_features(); ++i) {
    const UnivariateNet& f = model.component(0, i);
    const Extrema e = exact_extrema(propagate(f, boxes[i]));
    const double at_x = f(x[i]);
    total += orientation == Orientation::kMinimize ? at_x - e.min
                                                   : e.max - at_x;
  }
  return total;
}

namespace {

// Rectified head ReLU(a g(z) + shift): g's output layer scaled by a and
// turned into a hidden unit, followed by a unit output layer.
UnivariateNet RectifiedHead(const UnivariateNet& g, double a, double shift) {
  std::vector<DenseLayer> layers = g.layers();
  DenseLayer& last = layers.back();
  for (double& w : last.weights) w *= a;
  last.bias[0] = a * last.bias[0] + shift;
  layers.push_back(DenseLayer{1, 1, {1.0}, {0.0}});
  return UnivariateNet(std::move(layers));
}

// f_0 = ReLU(g - c), f_1 = ReLU(g - c + shift), with g rescaled so that
// g(0.5) - min g = 4 on [0, 1] and c = min g + 1.5. At x = 0.5 the exact
// deviations are 2.5 and 2.5 + shift (shift <= 1.5).
std::pair<UnivariateNet, UnivariateNet> NearIdenticalPair(
    Rng& rng, const std::vector<int>& hidden, double shift) {
  if (!(shift >= 0.0 && shift <= 1.5)) {
    throw InvalidArgumentError("near-identical shift must lie in [0, 1.5]");
  }
  for (int attempt = 0; attempt < 100; ++attempt) {
    UnivariateNet g = RandomNet(rng, hidden);
    for (int sign = 0; sign < 2; ++sign) {
      if (sign == 1) g = g.Negated();
      const Extrema e = exact_extrema(propagate(g, {0.0, 1.0}));
      const double drop = g(0.5) - e.min;
      if (!(drop > 1e-3 * (1.0 + std::abs(e.min)))) continue;
      const double a = 4.0 / drop;
      const double c = a * e.min + 1.5;
      return {RectifiedHead(g, a, -c), RectifiedHead(g, a, -c + shift)};
    }
  }
  throw InternalError("could not draw a non-degenerate base network");
}

NamModel AttachSpike(const NamModel& model, std::span<const double> x,
                     double epsilon, int grid) {
  const int last = model.n_features() - 1;
  const PerturbationSpec spec{epsilon, true};
  const Interval box = spec.FeatureInterval(x[last], model.domain(last));
  const SpikePlacement p = PlaceSpike(box, x[last], grid);
  std::vector<std::vector<UnivariateNet>> comps = model.components();
  const double rest =
      model.output(0, x) - model.component(0, last)(x[last]);
  const double depth = 2.0 * std::abs(rest) + 1.0;
  UnivariateNet spike = SpikeNet(p.center, p.width, depth);
  // Class 0 at x: the spike must push the margin up instead.
  if (rest < 0.0) spike = spike.Negated();
  comps[0][last] = std::move(spike);
  return NamModel(model.task(), model.intercepts(), std::move(comps),
                  model.meta());
}

}  // namespace

NamModel GenerateModel(const SyntheticSpec& spec) {
  if (spec.linear_preset) return LinearFixture().model;
  if (spec.n_features < 1) {
    throw InvalidArgumentError("n_features must be >= 1");
  }
  for (int h : spec.hidden) {
    if (h < 1) throw InvalidArgumentError("hidden widths must be >= 1");
  }
  const int outputs = spec.task == Task::kMulticlass ? spec.n_classes : 1;
  if (spec.task == Task::kMulticlass && spec.n_classes < 2) {
    throw InvalidArgumentError("multiclass needs n_classes >= 2");
  }
  if ((spec.near_identical_shift || spec.spike) &&
      spec.task == Task::kMulticlass) {
    throw InvalidArgumentError(
        "near-identical and spike options need a single-output task");
  }
  Rng rng(spec.seed);
  std::vector<std::vector<UnivariateNet>> comps(outputs);
  std::vector<double> intercepts(outputs);
  for (int o = 0; o < outputs; ++o) {
    for (int i = 0; i < spec.n_features; ++i) {
      comps[o].push_back(RandomNet(rng, spec.hidden));
    }
    intercepts[o] = rng.Normal();
  }
  if (spec.near_identical_shift) {
    if (spec.n_features < 2) {
      throw InvalidArgumentError("near-identical pair needs 2 features");
    }
    auto [a, b] = NearIdenticalPair(rng, spec.hidden, *spec.near_identical_shift);
    comps[0][0] = std::move(a);
    comps[0][1] = std::move(b);
  }
  NamModel model(spec.task, std::move(intercepts), std::move(comps));
  if (spec.spike) {
    const std::vector<double> x(spec.n_features, spec.spike_x);
    ValidateInstance(model, x);
    model = AttachSpike(model, x, spec.spike_epsilon, spec.spike_grid);
  }
  return model;
}

Fixture AdversarialOrderFixture() {
  DenseLayer hidden{1, 2, {1.0, 1.0}, {0.0, -0.5}};
  DenseLayer out{2, 1, {1.0, 4.0}, {0.0}};
  // z + 4 ReLU(z - 0.5) on z >= 0.
  const UnivariateNet kinked({hidden, out});
  std::vector<std::vector<UnivariateNet>> comps = {
      {UnivariateNet::Affine(1.5, 0.0), kinked, kinked}};
  return {NamModel(Task::kBinary, {-1.3}, std::move(comps)),
          {0.5, 0.5, 0.5},
          {0.2, true}};
}

Fixture LinearFixture() {
  std::vector<std::vector<UnivariateNet>> comps = {
      {UnivariateNet::Affine(2.0, 0.0), UnivariateNet::Affine(1.0, 0.0)}};
  return {NamModel(Task::kBinary, {-0.2}, std::move(comps)),
          {0.3, 0.1},
          {0.2, true}};
}

Fixture RandomFixture(std::uint64_t seed, int n_features,
                      const std::vector<int>& hidden, double epsilon) {
  Rng rng(seed);
  std::vector<std::vector<UnivariateNet>> comps(1);
  for (int i = 0; i < n_features; ++i) {
    comps[0].push_back(RandomNet(rng, hidden));
  }
  NamModel model(Task::kBinary, {0.0}, std::move(comps));
  std::vector<double> x = RandomInstance(rng, n_features);
  const PerturbationSpec spec{epsilon, true};
  const Orientation o =
      rng.Uniform() < 0.5 ? Orientation::kMinimize : Orientation::kMaximize;
  const double fraction = rng.Uniform();
  const double slack = fraction * TotalDeviation(model, x, spec, o);
  return {WithSlack(model, x, o, slack), std::move(x), spec};
}

}  // namespace namc
