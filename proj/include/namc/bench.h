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

#ifndef NAMC_BENCH_H_
#define NAMC_BENCH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "namc/explain.h"
#include "namc/nam_model.h"

namespace namc {

struct BenchConfig {
  std::vector<Method> methods = {Method::kOurs, Method::kLexicographic};
  PerturbationSpec spec;
  ExplainConfig explain;
  // Number of non-trivial instances to run.
  int instances = 50;
  // Per instance and method; exceeding it is a row failure.
  double timeout_s = 600.0;
  // Skip instances whose certified cardinal explanation is empty or the
  // full feature set.
  bool skip_trivial = true;
  std::uint64_t seed = 0;
};

struct BenchRow {
  int instance = 0;  // position in the candidate list
  std::string method;
  bool ok = false;
  std::string error;
  int size = 0;
  std::vector<int> subset;
  double time_ms = 0.0;  // sort + search
  double sort_ms = 0.0;
  std::int64_t suff_calls = 0;
  std::int64_t verifier_calls = 0;
  std::optional<bool> certified_sufficient;
  std::vector<TracePoint> trace;
  // Importance sort progress (ours / ours-linear only).
  std::vector<ProcessedPoint> processed;
};

struct MethodAggregate {
  std::string method;
  int rows = 0;  // successful rows
  int failures = 0;
  double mean_size = 0.0;
  double std_size = 0.0;  // sample standard deviation
  double mean_time_ms = 0.0;
  double std_time_ms = 0.0;
  // Fraction of rows whose subset passes the certified oracle; reported
  // for uncertified methods.
  std::optional<double> sufficiency_rate;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<MethodAggregate> aggregates;
  std::vector<int> skipped_trivial;
  int processors = 1;
  double epsilon = 0.0;
  double timeout_s = 0.0;
  std::int64_t max_subdivisions = 0;
  std::uint64_t seed = 0;
};

// Aggregates recomputed from the rows, one per method in `methods` order.
std::vector<MethodAggregate> Aggregate(const std::vector<BenchRow>& rows,
                                       const std::vector<std::string>& methods);

// Runs every method on the first `config.instances` non-trivial candidates.
// Failures are recorded per row and never abort the batch.
BenchReport run_bench(const NamModel& model,
                      const std::vector<std::vector<double>>& candidates,
                      const BenchConfig& config);

nlohmann::json ReportToJson(const BenchReport& report);
// One line per row.
std::string ReportToCsv(const BenchReport& report);
// method,instance,t_ms,size
std::string TracesCsv(const BenchReport& report);
// instance,t_ms,processed
std::string ProcessedCsv(const BenchReport& report);

// Mean explanation size per radius.
struct EpsilonPoint {
  double epsilon = 0.0;
  BenchReport report;
};
std::vector<EpsilonPoint> ablate_epsilon(
    const NamModel& model, const std::vector<std::vector<double>>& candidates,
    const std::vector<double>& epsilons, const BenchConfig& config);

struct ProcsPoint {
  int processors = 1;
  double sort_ms = 0.0;  // summed over instances
  double total_ms = 0.0;
  // Order and subset identical to the p = 1 run on every instance.
  bool identical = true;
  std::vector<std::vector<int>> orders;
  std::vector<std::vector<int>> subsets;
};
std::vector<ProcsPoint> ablate_procs(
    const NamModel& model, const std::vector<std::vector<double>>& instances,
    const std::vector<int>& processors, const BenchConfig& config);

struct XiPoint {
  int decade = 0;  // shift = 10^-decade
  double shift = 0.0;
  double exact_gap = 0.0;  // exact deviation difference of the pair
  int rounds = 0;
  int max_refinements = 0;
  std::int64_t verify_calls = 0;
  double sort_ms = 0.0;
  std::vector<int> order;
};

struct XiAblation {
  std::vector<XiPoint> points;
  // Least-squares slope of refinements per decade of shift.
  double slope = 0.0;
  // Largest refinement increase between consecutive decades.
  int max_step = 0;
};

// Near-identical pairs (features 0 and 1, the only features) with shifts
// 10^0 ... 10^-max_decade, sorted at x = 0.5, epsilon 0.5, with both sort
// optimizations off.
XiAblation ablate_xi(int max_decade, std::uint64_t seed,
                     const std::vector<int>& hidden, const SortConfig& sort);

nlohmann::json XiToJson(const XiAblation& xi);
nlohmann::json ProcsToJson(const std::vector<ProcsPoint>& points);
nlohmann::json EpsilonToJson(const std::vector<EpsilonPoint>& points);
// Plot-ready tables, one line per point (per method for epsilon).
std::string XiCsv(const XiAblation& xi);
std::string ProcsCsv(const std::vector<ProcsPoint>& points);
std::string EpsilonCsv(const std::vector<EpsilonPoint>& points);

// Result schema of the explain command.
nlohmann::json ResultToJson(const ExplanationResult& result);
nlohmann::json OrderToJson(const ImportanceOrder& order);
nlohmann::json CertificateToJson(const SuffCertificate& certificate);

}  // namespace namc

#endif  // NAMC_BENCH_H_
