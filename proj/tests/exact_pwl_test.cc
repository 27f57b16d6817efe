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

#include "namc/exact_pwl.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "namc/errors.h"
#include "namc/synthetic.h"
#include "test_util.h"

namespace namc {
namespace {

TEST(Propagate, IdentityIsOnePiece) {
  const PwlFunction f = propagate(UnivariateNet(), {0.0, 1.0});
  EXPECT_EQ(f.pieces(), 1);
  EXPECT_EQ(f(0.25), 0.25);
  const Extrema e = exact_extrema(f);
  EXPECT_EQ(e.min, 0.0);
  EXPECT_EQ(e.argmin, 0.0);
  EXPECT_EQ(e.max, 1.0);
  EXPECT_EQ(e.argmax, 1.0);
}

TEST(Propagate, RampBreakpoints) {
  const PwlFunction f = propagate(testing::RampNet(), {0.0, 1.0});
  EXPECT_EQ(f.breakpoints(), (std::vector<double>{0.0, 0.25, 0.75, 1.0}));
  EXPECT_EQ(f(0.1), 0.0);
  EXPECT_DOUBLE_EQ(f(0.5), 0.25);
  EXPECT_DOUBLE_EQ(f(0.9), 0.5);
  const Extrema e = exact_extrema(f);
  EXPECT_EQ(e.min, 0.0);
  EXPECT_EQ(e.argmin, 0.0);  // ties go left
  EXPECT_DOUBLE_EQ(e.max, 0.5);
  EXPECT_EQ(e.argmax, 0.75);
}

TEST(Propagate, CancellingUnitsMergeToOnePiece) {
  const PwlFunction f = propagate(testing::CancelNet(), {-1.0, 1.0});
  EXPECT_EQ(f.pieces(), 1);
  EXPECT_EQ(f(-0.5), 0.0);
  EXPECT_EQ(f(0.5), 0.0);
}

TEST(Propagate, DegenerateInterval) {
  const PwlFunction f = propagate(testing::RampNet(), {0.5, 0.5});
  const Extrema e = exact_extrema(f);
  EXPECT_DOUBLE_EQ(e.min, 0.25);
  EXPECT_DOUBLE_EQ(e.max, 0.25);
}

TEST(Propagate, MatchesForwardOnRandomNets) {
  Rng rng(21);
  for (int t = 0; t < 40; ++t) {
    const UnivariateNet net = RandomNet(rng, {16, 16, 8});
    const double a = rng.Uniform(-1.0, 1.0);
    const double b = a + rng.Uniform(0.0, 1.5);
    const PwlFunction f = propagate(net, {a, b});
    EXPECT_LT(f.max_discontinuity(), 1e-9);
    double grid_min = INFINITY;
    double grid_max = -INFINITY;
    for (int k = 0; k <= 2000; ++k) {
      const double z = a + (b - a) * k / 2000.0;
      const double v = net(z);
      EXPECT_NEAR(f(z), v, 1e-9);
      grid_min = std::min(grid_min, v);
      grid_max = std::max(grid_max, v);
    }
    const Extrema e = exact_extrema(f);
    // The exact extrema are attained and dominate any sample.
    EXPECT_LE(e.min, grid_min + 1e-12);
    EXPECT_GE(e.max, grid_max - 1e-12);
    EXPECT_NEAR(net(e.argmin), e.min, 1e-9);
    EXPECT_NEAR(net(e.argmax), e.max, 1e-9);
    EXPECT_GE(e.argmin, a);
    EXPECT_LE(e.argmin, b);
  }
}

TEST(Propagate, BudgetExceeded) {
  Rng rng(2);
  const UnivariateNet net = RandomNet(rng, {32, 32});
  PwlOptions options;
  options.max_pieces = 2;
  EXPECT_THROW(propagate(net, {-5.0, 5.0}, options), BudgetExceededError);
}

TEST(PwlFunction, ClampsOutsideDomain) {
  const PwlFunction f({0.0, 1.0}, {2.0}, {1.0});
  EXPECT_EQ(f(-3.0), 1.0);
  EXPECT_EQ(f(9.0), 3.0);
}

}  // namespace
}  // namespace namc
