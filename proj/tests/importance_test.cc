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

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "namc/errors.h"
#include "namc/exact_pwl.h"
#include "namc/synthetic.h"
#include "test_util.h"

namespace namc {
namespace {

// Deviation of feature i toward the threshold, computed by exact propagation.
double ExactDeviation(const NamModel& m, const std::vector<double>& x,
                      const PerturbationSpec& spec, int i, Orientation o) {
  const Interval box = spec.FeatureInterval(x[i], m.domain(i));
  const Extrema e = exact_extrema(propagate(m.component(0, i), box));
  const double v = m.component(0, i)(x[i]);
  return o == Orientation::kMinimize ? v - std::min(e.min, v)
                                     : std::max(e.max, v) - v;
}

TEST(SortFeatures, LinearFixture) {
  const Fixture f = LinearFixture();
  const ImportanceOrder order = sort_features(f.model, f.x, f.spec);
  EXPECT_EQ(order.orientation, Orientation::kMinimize);
  EXPECT_EQ(order.order, (std::vector<int>{0, 1}));
  EXPECT_EQ(order.removal_order(), (std::vector<int>{1, 0}));
  EXPECT_TRUE(order.tie_groups.empty());
  for (const ImportanceInterval& iv : order.intervals) {
    const double dev = ExactDeviation(f.model, f.x, f.spec, iv.feature,
                                      Orientation::kMinimize);
    EXPECT_LE(iv.deviation_lo(), dev + 1e-12);
    EXPECT_GE(iv.deviation_hi(), dev - 1e-12);
  }
  ASSERT_TRUE(order.xi[0]);
  EXPECT_GT(*order.xi[0], 0.0);
}

TEST(SortFeatures, ClassZeroMaximizes) {
  Fixture f = LinearFixture();
  f.model = f.model.WithIntercepts({-2.0});
  const ImportanceOrder order = sort_features(f.model, f.x, f.spec);
  EXPECT_EQ(order.orientation, Orientation::kMaximize);
  // Upward room: f_0 gains 0.4, f_1 gains 0.2.
  EXPECT_EQ(order.order, (std::vector<int>{0, 1}));
}

TEST(SortFeatures, EqualPointIntervalsKeepIndexOrder) {
  // Deviations 0.2, 0.2 (ramp slope 1 around 0.5), 0.2. Interval arithmetic
  // is exact on these, so the intervals collapse and count as separated.
  const NamModel m = testing::Binary(
      {UnivariateNet(), testing::RampNet(), UnivariateNet()}, 0.0);
  const std::vector<double> x = {0.5, 0.5, 0.5};
  const ImportanceOrder order = sort_features(m, x, {0.2, true});
  EXPECT_EQ(order.order, (std::vector<int>{0, 1, 2}));
}

TEST(SortFeatures, DuplicatedComponentsTie) {
  Rng rng(14);
  const UnivariateNet g = RandomNet(rng, {16, 16});
  const NamModel m = testing::Binary({g, UnivariateNet::Affine(5.0, 0.0), g}, 0.0);
  const std::vector<double> x = {0.5, 0.5, 0.5};
  SortConfig config;
  config.probe_near_upper = false;
  const ImportanceOrder order = sort_features(m, x, {0.3, true}, config);
  EXPECT_EQ(order.order, (std::vector<int>{1, 0, 2}));
  ASSERT_EQ(order.tie_groups.size(), 1u);
  EXPECT_EQ(order.tie_groups[0], (std::vector<int>{0, 2}));
  EXPECT_LE(order.intervals[0].width(), 1e-9);
}

TEST(SortFeatures, ZeroDeviationFeatureLast) {
  const NamModel m = testing::Binary(
      {testing::CancelNet(), UnivariateNet::Affine(3.0, 0.0)}, 0.0);
  const std::vector<double> x = {0.5, 0.5};
  const ImportanceOrder order = sort_features(m, x, {0.1, true});
  EXPECT_EQ(order.order, (std::vector<int>{1, 0}));
}

TEST(SortFeatures, OrderConsistentWithExactDeviations) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Fixture f = RandomFixture(seed, 6, {16, 16}, 0.2);
    const ImportanceOrder order = sort_features(f.model, f.x, f.spec);
    const Orientation o = order.orientation;
    for (std::size_t k = 0; k + 1 < order.order.size(); ++k) {
      const double a = ExactDeviation(f.model, f.x, f.spec, order.order[k], o);
      const double b =
          ExactDeviation(f.model, f.x, f.spec, order.order[k + 1], o);
      EXPECT_GE(a, b - 1e-8) << "seed " << seed << " position " << k;
    }
    for (const ImportanceInterval& iv : order.intervals) {
      const double dev = ExactDeviation(f.model, f.x, f.spec, iv.feature, o);
      EXPECT_LE(iv.deviation_lo(), dev + 1e-9);
      EXPECT_GE(iv.deviation_hi(), dev - 1e-9);
    }
  }
}

TEST(SortFeatures, DeterministicAcrossProcessors) {
  const Fixture f = RandomFixture(77, 10, {16, 16}, 0.3);
  SortConfig config;
  const ImportanceOrder base = sort_features(f.model, f.x, f.spec, config);
  for (int p : {2, 4, 8}) {
    config.processors = p;
    const ImportanceOrder other = sort_features(f.model, f.x, f.spec, config);
    EXPECT_EQ(other.order, base.order) << p;
    EXPECT_EQ(other.verify_calls, base.verify_calls) << p;
    EXPECT_EQ(other.rounds, base.rounds) << p;
  }
}

TEST(SortFeatures, OptimizationsDoNotChangeOrder) {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const Fixture f = RandomFixture(seed, 5, {16, 8}, 0.2);
    SortConfig plain;
    plain.counterexample_tightening = false;
    plain.probe_near_upper = false;
    const ImportanceOrder a = sort_features(f.model, f.x, f.spec);
    const ImportanceOrder b = sort_features(f.model, f.x, f.spec, plain);
    EXPECT_EQ(a.order, b.order) << seed;
  }
}

TEST(SortFeatures, RegressionNeedsOrientation) {
  const NamModel m(Task::kRegression, {0.0}, {{UnivariateNet()}});
  const std::vector<double> x = {0.5};
  EXPECT_THROW(sort_features(m, x, {0.1, true}), InvalidArgumentError);
  EXPECT_NO_THROW(sort_features(m, x, {0.1, true}, {}, Orientation::kMaximize));
}

TEST(CounterexampleTightening, NeverIncreasesUpperBound) {
  ImportanceInterval s;
  s.l = 0.0;
  s.u = 1.0;
  apply_counterexample_tightening(s, 0.5, {0.3, 0.2});
  EXPECT_EQ(s.u, 0.2);
  apply_counterexample_tightening(s, 0.5, {0.3, 0.9});
  EXPECT_EQ(s.u, 0.2);
  apply_counterexample_tightening(s, 0.1, {0.3, 0.15});
  EXPECT_EQ(s.u, 0.1);
}

TEST(InitialInterval, BracketsMinimum) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const UnivariateNet g = RandomNet(rng, {8, 8});
    const Interval box{0.2, 0.6};
    const ImportanceInterval iv = InitialInterval(0, g, box, 0.4);
    const double min =
        std::min(exact_extrema(propagate(g, box)).min, g(0.4));
    EXPECT_LE(iv.l, min + 1e-12);
    EXPECT_GE(iv.u, min - 1e-12);
    EXPECT_LE(iv.u, g(0.4));
  }
}

TEST(ProbeNearUpperBound, CollapsesWhenUpperIsTight) {
  const UnivariateNet g = UnivariateNet();
  const Interval box{0.2, 0.6};
  ImportanceInterval s = InitialInterval(0, g, box, 0.4);
  s.u = 0.2;  // the true minimum
  SortConfig config;
  const VerifyOutcome out = probe_near_upper_bound(s, g, box, 1e-7, config);
  EXPECT_TRUE(out.holds());
  EXPECT_LE(s.width(), 1e-7 + 1e-12);
  EXPECT_LE(s.l, 0.2);
}

TEST(RefineOnce, ShrinksAndStaysSound) {
  Rng rng(13);
  const UnivariateNet g = RandomNet(rng, {16, 16});
  const Interval box{0.0, 1.0};
  ImportanceInterval s = InitialInterval(0, g, box, 0.5);
  const double min = std::min(exact_extrema(propagate(g, box)).min, g(0.5));
  SortConfig config;
  for (int k = 0; k < 30; ++k) {
    const double w = s.width();
    RefineOnce(s, g, box, config);
    EXPECT_LE(s.width(), w);
    EXPECT_LE(s.l, min + 1e-9);
    EXPECT_GE(s.u, min - 1e-12);
  }
  EXPECT_LT(s.width(), 1e-6);
}

TEST(Separated, NonStrict) {
  ImportanceInterval a;
  a.value_at_x = 1.0;
  a.l = 0.0;
  a.u = 0.5;  // deviation [0.5, 1.0]
  ImportanceInterval b;
  b.value_at_x = 1.0;
  b.l = 0.5;
  b.u = 0.8;  // deviation [0.2, 0.5]
  EXPECT_TRUE(Separated(a, b));
  b.l = 0.4;
  EXPECT_FALSE(Separated(a, b));
}

TEST(SortFeatures, DeadlineThrows) {
  const Fixture f = RandomFixture(5, 8, {32, 32}, 0.3);
  SortConfig config;
  config.deadline = Deadline::AfterSeconds(0.0);
  EXPECT_THROW(sort_features(f.model, f.x, f.spec, config), TimeoutError);
}

}  // namespace
}  // namespace namc
