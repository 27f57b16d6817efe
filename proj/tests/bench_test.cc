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

#include "namc/bench.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "namc/errors.h"
#include "namc/synthetic.h"
#include "test_util.h"

namespace namc {
namespace {

std::vector<std::vector<double>> Candidates(int n, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> out;
  for (int k = 0; k < count; ++k) out.push_back(RandomInstance(rng, n));
  return out;
}

NamModel SmallModel() {
  SyntheticSpec spec;
  spec.n_features = 5;
  spec.hidden = {8, 8};
  spec.seed = 31;
  return GenerateModel(spec);
}

TEST(Aggregate, SampleStandardDeviation) {
  std::vector<BenchRow> rows(3);
  const int sizes[] = {1, 2, 4};
  for (int k = 0; k < 3; ++k) {
    rows[k].method = "ours";
    rows[k].ok = true;
    rows[k].size = sizes[k];
    rows[k].time_ms = 10.0;
  }
  BenchRow failed;
  failed.method = "ours";
  failed.error = "timeout";
  rows.push_back(failed);
  const std::vector<MethodAggregate> a = Aggregate(rows, {"ours", "sampling"});
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].rows, 3);
  EXPECT_EQ(a[0].failures, 1);
  EXPECT_NEAR(a[0].mean_size, 7.0 / 3.0, 1e-12);
  EXPECT_NEAR(a[0].std_size, std::sqrt(7.0 / 3.0), 1e-12);
  EXPECT_EQ(a[0].std_time_ms, 0.0);
  EXPECT_FALSE(a[0].sufficiency_rate);
  EXPECT_EQ(a[1].rows, 0);
}

TEST(RunBench, SkipsTrivialAndRunsAllMethods) {
  const NamModel m = SmallModel();
  BenchConfig config;
  config.methods = {Method::kOurs, Method::kLexicographic, Method::kSampling,
                    Method::kBruteForce};
  config.spec = {0.2, true};
  config.instances = 5;
  const BenchReport r = run_bench(m, Candidates(5, 60, 1), config);
  const int used = static_cast<int>(r.rows.size()) / 4;
  EXPECT_LE(used, 5);
  EXPECT_GT(used, 0);
  for (int k = 0; k < used; ++k) {
    const BenchRow& ours = r.rows[4 * k];
    const BenchRow& bf = r.rows[4 * k + 3];
    ASSERT_TRUE(ours.ok) << ours.error;
    ASSERT_TRUE(bf.ok) << bf.error;
    EXPECT_EQ(ours.size, bf.size);
    EXPECT_GT(ours.size, 0);
    EXPECT_LT(ours.size, 5);
    EXPECT_LE(ours.size, r.rows[4 * k + 1].size);
    EXPECT_TRUE(r.rows[4 * k + 2].certified_sufficient.has_value());
  }
  EXPECT_TRUE(r.aggregates[2].sufficiency_rate.has_value());
  const std::string csv = ReportToCsv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'),
            static_cast<long>(r.rows.size()) + 1);
  const nlohmann::json j = ReportToJson(r);
  EXPECT_EQ(j["rows"].size(), r.rows.size());
}

TEST(RunBench, TimeoutIsRowFailure) {
  const NamModel m = SmallModel();
  BenchConfig config;
  config.methods = {Method::kOurs};
  config.spec = {0.2, true};
  config.instances = 2;
  config.timeout_s = 0.0;
  config.skip_trivial = false;
  const BenchReport r = run_bench(m, Candidates(5, 2, 2), config);
  ASSERT_EQ(r.rows.size(), 2u);
  for (const BenchRow& row : r.rows) {
    EXPECT_FALSE(row.ok);
    EXPECT_EQ(row.error, "timeout");
  }
  EXPECT_EQ(r.aggregates[0].failures, 2);
}

TEST(RunBench, RejectsEmptyMethods) {
  BenchConfig config;
  config.methods.clear();
  EXPECT_THROW(run_bench(SmallModel(), Candidates(5, 1, 3), config),
               InvalidArgumentError);
}

TEST(AblateProcs, IdenticalAcrossProcessors) {
  const NamModel m = SmallModel();
  BenchConfig config;
  config.spec = {0.3, true};
  const std::vector<ProcsPoint> pts =
      ablate_procs(m, Candidates(5, 4, 4), {1, 2, 4}, config);
  ASSERT_EQ(pts.size(), 3u);
  for (const ProcsPoint& p : pts) EXPECT_TRUE(p.identical);
}

TEST(AblateEpsilon, LargerRadiusNeedsNoFewerFeatures) {
  const NamModel m = SmallModel();
  BenchConfig config;
  config.methods = {Method::kOurs};
  config.skip_trivial = false;
  config.instances = 6;
  const std::vector<EpsilonPoint> pts =
      ablate_epsilon(m, Candidates(5, 6, 5), {0.05, 0.2, 0.5}, config);
  ASSERT_EQ(pts.size(), 3u);
  for (std::size_t k = 1; k < pts.size(); ++k) {
    for (std::size_t r = 0; r < pts[k].report.rows.size(); ++r) {
      EXPECT_GE(pts[k].report.rows[r].size, pts[k - 1].report.rows[r].size);
    }
  }
}

TEST(AblateXi, OrdersNearIdenticalPair) {
  const XiAblation xi = ablate_xi(4, 7, {16, 16}, {});
  ASSERT_EQ(xi.points.size(), 5u);
  for (const XiPoint& p : xi.points) {
    EXPECT_NEAR(p.exact_gap, p.shift, 1e-9) << p.decade;
    EXPECT_EQ(p.order, (std::vector<int>{1, 0})) << p.decade;
  }
  EXPECT_GT(xi.slope, 0.0);
  EXPECT_GE(xi.points.back().max_refinements,
            xi.points.front().max_refinements);
}

TEST(AblateXi, CsvHasOneLinePerDecade) {
  const std::string csv = XiCsv(ablate_xi(2, 7, {8, 8}, {}));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(csv.rfind("decade,shift,", 0), 0u);
}

TEST(Json, ResultSchema) {
  const Fixture f = LinearFixture();
  const ExplanationResult r =
      explain_instance(f.model, f.x, f.spec, Method::kOurs);
  const nlohmann::json j = ResultToJson(r);
  EXPECT_EQ(j["subset"], nlohmann::json::array({0}));
  EXPECT_EQ(j["minimality"], "cardinally-minimal");
  EXPECT_TRUE(j.contains("certificate"));
  EXPECT_TRUE(j.contains("importance"));
}

}  // namespace
}  // namespace namc
