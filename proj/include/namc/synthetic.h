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

#ifndef NAMC_SYNTHETIC_H_
#define NAMC_SYNTHETIC_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "namc/importance.h"
#include "namc/nam_model.h"

namespace namc {

// Seeded generator with platform-independent output. The std distributions
// are implementation-defined, so the transforms are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }
  // [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Box-Muller.
  double Normal();
  // Inclusive range.
  int UniformInt(int lo, int hi);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Random ReLU net 1 -> hidden... -> 1. Weights are N(0, 2 / fan_in); the
// first layer places its kinks uniformly inside [0, 1].
UnivariateNet RandomNet(Rng& rng, const std::vector<int>& hidden);

// -(depth / width) * [ReLU(z - c + w) - 2 ReLU(z - c) + ReLU(z - c - w)]:
// zero outside [c - w, c + w], reaching -depth at c.
UnivariateNet SpikeNet(double center, double width, double depth);

// Places a spike inside the perturbation interval of x, centered between two
// adjacent points of a `grid`-point evenly spaced sampling of that interval,
// with width spacing / 8, so the grid never sees it.
struct SpikePlacement {
  double center = 0.0;
  double width = 0.0;
};
SpikePlacement PlaceSpike(const Interval& box, double x, int grid);

struct SyntheticSpec {
  int n_features = 4;
  std::vector<int> hidden = {64, 64, 32};
  Task task = Task::kBinary;
  int n_classes = 2;  // multiclass only
  std::uint64_t seed = 0;
  // Features 0 and 1 become near-identical rectified heads whose deviations
  // at x = 0.5 (epsilon 0.5) differ by exactly this shift.
  std::optional<double> near_identical_shift;
  // The last feature's component is replaced by a spike invisible to a
  // `spike_grid`-point sampling of the perturbation interval around
  // spike_x (radius spike_epsilon). Its depth is 2 |f(x)| + 1 at the
  // all-spike_x instance, so freeing it alone flips the prediction.
  bool spike = false;
  double spike_x = 0.5;
  double spike_epsilon = 0.1;
  int spike_grid = 1000;
  // f_1 = 2z, f_2 = z, intercept -0.2 (n_features and hidden ignored).
  bool linear_preset = false;
};

// Deterministic in spec.seed.
NamModel GenerateModel(const SyntheticSpec& spec);

// Uniform instance in the unit box.
std::vector<double> RandomInstance(Rng& rng, int n_features);

// Sets the intercept of a single-output model so that the prediction at x
// lies `slack` beyond the decision threshold, on the side given by the
// orientation: f(x) = slack for kMinimize (class 1), f(x) = -slack for
// kMaximize (class 0).
NamModel WithSlack(const NamModel& model, std::span<const double> x,
                   Orientation orientation, double slack);

// Sum over features of the exact deviation toward the threshold.
double TotalDeviation(const NamModel& model, std::span<const double> x,
                      const PerturbationSpec& spec, Orientation orientation);

// Three features with f_0 = 1.5 z, f_1 = f_2 = z + 4 ReLU(z - 0.5),
// intercept -1.3, at x = (0.5, 0.5, 0.5), epsilon 0.2. The cardinal
// explanation is {0}; lexicographic and sensitivity orders keep two features.
struct Fixture {
  NamModel model;
  std::vector<double> x;
  PerturbationSpec spec;
};
Fixture AdversarialOrderFixture();

// f_1 = 2z, f_2 = z, intercept -0.2, x = (0.3, 0.1), epsilon 0.2.
Fixture LinearFixture();

// Random binary instance with a calibrated intercept: the slack is a uniform
// fraction of the total deviation and the class is random.
Fixture RandomFixture(std::uint64_t seed, int n_features,
                      const std::vector<int>& hidden, double epsilon);

}  // namespace namc

#endif  // NAMC_SYNTHETIC_H_
