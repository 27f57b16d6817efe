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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "namc/errors.h"
#include "namc/exact_pwl.h"
#include "namc/model_io.h"
#include "namc/sufficiency.h"

namespace namc {
namespace {

TEST(Rng, Reproducible) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.Uniform(), b.Uniform());
    EXPECT_EQ(a.Normal(), b.Normal());
  }
}

TEST(Rng, UniformIntInclusive) {
  Rng rng(1);
  bool lo = false;
  bool hi = false;
  for (int i = 0; i < 1000; ++i) {
    const int v = rng.UniformInt(3, 5);
    ASSERT_GE(v, 3);
    ASSERT_LE(v, 5);
    lo |= v == 3;
    hi |= v == 5;
  }
  EXPECT_TRUE(lo && hi);
}

TEST(Rng, NormalMoments) {
  Rng rng(2);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.Normal();
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(GenerateModel, DeterministicInSeed) {
  SyntheticSpec spec;
  spec.seed = 12;
  spec.hidden = {8, 4};
  EXPECT_EQ(DumpModel(GenerateModel(spec)), DumpModel(GenerateModel(spec)));
  SyntheticSpec other = spec;
  other.seed = 13;
  EXPECT_NE(DumpModel(GenerateModel(spec)), DumpModel(GenerateModel(other)));
}

TEST(GenerateModel, Shapes) {
  SyntheticSpec spec;
  spec.task = Task::kMulticlass;
  spec.n_classes = 4;
  spec.n_features = 3;
  spec.hidden = {5, 6, 7};
  const NamModel m = GenerateModel(spec);
  EXPECT_EQ(m.n_outputs(), 4);
  EXPECT_EQ(m.component(3, 2).depth(), 4);
  EXPECT_EQ(m.component(0, 0).max_width(), 7);
  spec.n_classes = 1;
  EXPECT_THROW(GenerateModel(spec), InvalidArgumentError);
}

TEST(GenerateModel, LinearPreset) {
  SyntheticSpec spec;
  spec.linear_preset = true;
  EXPECT_EQ(GenerateModel(spec), LinearFixture().model);
}

class NearIdentical : public ::testing::TestWithParam<int> {};

// The exact deviation gap of the pair equals the requested shift.
TEST_P(NearIdentical, ExactGap) {
  const double shift = std::pow(10.0, -GetParam());
  SyntheticSpec spec;
  spec.n_features = 2;
  spec.seed = 7;
  spec.near_identical_shift = shift;
  const NamModel m = GenerateModel(spec);
  const std::vector<double> x = {0.5, 0.5};
  ComponentBounds b(m, x, {0.5, true}, {});
  const double d0 = Deviation(b.Get(0), Orientation::kMinimize);
  const double d1 = Deviation(b.Get(1), Orientation::kMinimize);
  EXPECT_NEAR(d0, 2.5, 1e-9);
  EXPECT_NEAR(d1 - d0, shift, 1e-9 * std::max(1.0, shift));
}

INSTANTIATE_TEST_SUITE_P(Decades, NearIdentical, ::testing::Values(0, 1, 3, 6));

TEST(PlaceSpike, MissesEveryGridPoint) {
  const Interval box{0.4, 0.6};
  const int grid = 1000;
  const SpikePlacement p = PlaceSpike(box, 0.5, grid);
  const double spacing = box.width() / (grid - 1);
  for (int k = 0; k < grid; ++k) {
    const double z = box.lo + k * spacing;
    EXPECT_GE(std::abs(z - p.center), p.width);
  }
  EXPECT_GT(std::abs(p.center - 0.5), 2.0 * p.width);
}

TEST(SpikeNet, Shape) {
  const UnivariateNet s = SpikeNet(0.5, 0.01, 3.0);
  EXPECT_NEAR(s(0.5), -3.0, 1e-12);
  EXPECT_NEAR(s(0.48), 0.0, 1e-12);
  EXPECT_NEAR(s(0.52), 0.0, 1e-12);
  EXPECT_NEAR(s(0.505), -1.5, 1e-12);
  const Extrema e = exact_extrema(propagate(s, {0.0, 1.0}));
  EXPECT_NEAR(e.min, -3.0, 1e-12);
}

TEST(WithSlack, SetsMargin) {
  SyntheticSpec spec;
  spec.hidden = {8};
  const NamModel m = GenerateModel(spec);
  const std::vector<double> x(4, 0.3);
  EXPECT_NEAR(WithSlack(m, x, Orientation::kMinimize, 0.7).output(0, x), 0.7,
              1e-12);
  EXPECT_NEAR(WithSlack(m, x, Orientation::kMaximize, 0.7).output(0, x), -0.7,
              1e-12);
}

TEST(RandomFixture, SlackWithinTotalDeviation) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Fixture f = RandomFixture(seed, 5, {8, 8}, 0.2);
    const Prediction p = predict(f.model, f.x);
    const Orientation o =
        p.label == 1 ? Orientation::kMinimize : Orientation::kMaximize;
    EXPECT_LE(std::abs(p.margin()),
              TotalDeviation(f.model, f.x, f.spec, o) + 1e-12);
  }
}

TEST(AdversarialOrderFixture, Values) {
  const Fixture f = AdversarialOrderFixture();
  EXPECT_NEAR(predict(f.model, f.x).margin(), 0.45, 1e-12);
  EXPECT_NEAR(TotalDeviation(f.model, f.x, f.spec, Orientation::kMinimize), 0.7,
              1e-12);
}

}  // namespace
}  // namespace namc
