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

#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "namc/errors.h"
#include "namc/exact_pwl.h"
#include "namc/runtime.h"
#include "namc/synthetic.h"

namespace namc {

using nlohmann::json;

namespace {

void MeanStd(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (v.empty()) return;
  for (double a : v) mean += a;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return;
  double ss = 0.0;
  for (double a : v) ss += (a - mean) * (a - mean);
  sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

BenchRow RunOne(const NamModel& model, std::span<const double> x,
                Method method, const BenchConfig& config) {
  BenchRow row;
  row.method = MethodName(method);
  ExplainConfig explain = config.explain;
  explain.sort.deadline = Deadline::AfterSeconds(config.timeout_s);
  Stopwatch clock;
  try {
    const ExplanationResult r =
        explain_instance(model, x, config.spec, method, explain);
    row.time_ms = clock.elapsed_ms();
    if (row.time_ms > config.timeout_s * 1000.0) {
      row.error = "timeout";
      return row;
    }
    row.ok = true;
    row.subset = r.subset;
    row.size = static_cast<int>(r.subset.size());
    row.sort_ms = r.sort_ms;
    row.suff_calls = r.suff_calls;
    row.verifier_calls = r.verifier_calls;
    row.certified_sufficient = r.certified_sufficient;
    row.trace = r.trace;
    if (r.importance) row.processed = r.importance->trace;
  } catch (const TimeoutError&) {
    row.time_ms = clock.elapsed_ms();
    row.error = "timeout";
  } catch (const BudgetExceededError& e) {
    row.time_ms = clock.elapsed_ms();
    row.error = std::string("budget: ") + e.what();
  } catch (const Error& e) {
    row.time_ms = clock.elapsed_ms();
    row.error = e.what();
  }
  return row;
}

bool IsTrivial(const NamModel& model, std::span<const double> x,
               const BenchConfig& config) {
  try {
    const ExplanationResult r =
        explain_instance(model, x, config.spec, Method::kOurs, config.explain);
    return r.subset.empty() ||
           static_cast<int>(r.subset.size()) == model.n_features();
  } catch (const Error&) {
    // Left to the per-method rows to report.
    return false;
  }
}

json TraceJson(const std::vector<TracePoint>& trace) {
  json t = json::array();
  for (const TracePoint& p : trace) t.push_back({p.t_ms, p.size});
  return t;
}

std::string JoinInts(const std::vector<int>& v, char sep) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += sep;
    s += std::to_string(v[k]);
  }
  return s;
}

}  // namespace

std::vector<MethodAggregate> Aggregate(
    const std::vector<BenchRow>& rows, const std::vector<std::string>& methods) {
  std::vector<MethodAggregate> out;
  for (const std::string& m : methods) {
    MethodAggregate a;
    a.method = m;
    std::vector<double> sizes, times;
    int checked = 0;
    int passed = 0;
    for (const BenchRow& r : rows) {
      if (r.method != m) continue;
      if (!r.ok) {
        ++a.failures;
        continue;
      }
      ++a.rows;
      sizes.push_back(r.size);
      times.push_back(r.time_ms);
      if (r.certified_sufficient) {
        ++checked;
        if (*r.certified_sufficient) ++passed;
      }
    }
    MeanStd(sizes, a.mean_size, a.std_size);
    MeanStd(times, a.mean_time_ms, a.std_time_ms);
    if (checked > 0) a.sufficiency_rate = static_cast<double>(passed) / checked;
    out.push_back(std::move(a));
  }
  return out;
}

BenchReport run_bench(const NamModel& model,
                      const std::vector<std::vector<double>>& candidates,
                      const BenchConfig& config) {
  if (config.instances < 1) {
    throw InvalidArgumentError("bench needs at least one instance");
  }
  if (config.methods.empty()) {
    throw InvalidArgumentError("bench needs at least one method");
  }
  BenchReport report;
  report.processors = config.explain.sort.processors;
  report.epsilon = config.spec.epsilon;
  report.timeout_s = config.timeout_s;
  report.max_subdivisions = config.explain.suff.verify.max_subdivisions;
  report.seed = config.seed;
  int used = 0;
  for (std::size_t c = 0; c < candidates.size() && used < config.instances;
       ++c) {
    const std::vector<double>& x = candidates[c];
    ValidateInstance(model, x);
    if (config.skip_trivial && IsTrivial(model, x, config)) {
      report.skipped_trivial.push_back(static_cast<int>(c));
      continue;
    }
    ++used;
    for (Method m : config.methods) {
      BenchRow row = RunOne(model, x, m, config);
      row.instance = static_cast<int>(c);
      report.rows.push_back(std::move(row));
    }
  }
  std::vector<std::string> names;
  for (Method m : config.methods) names.push_back(MethodName(m));
  report.aggregates = Aggregate(report.rows, names);
  return report;
}

json CertificateToJson(const SuffCertificate& c) {
  json j;
  j["sufficient"] = c.sufficient;
  j["margin_bound"] = c.margin_bound;
  if (c.lower_bound) j["lower_bound"] = *c.lower_bound;
  if (c.upper_bound) j["upper_bound"] = *c.upper_bound;
  if (c.counterexample) {
    j["counterexample"] = *c.counterexample;
    j["counterexample_confirmed"] = c.counterexample_confirmed;
  }
  if (c.rival) j["rival"] = *c.rival;
  return j;
}

json OrderToJson(const ImportanceOrder& order) {
  json j;
  j["orientation"] = OrientationName(order.orientation);
  j["order"] = order.order;
  j["removal_order"] = order.removal_order();
  j["rounds"] = order.rounds;
  j["verify_calls"] = order.verify_calls;
  j["elapsed_ms"] = order.elapsed_ms;
  j["tie_groups"] = order.tie_groups;
  json features = json::array();
  for (const ImportanceInterval& s : order.intervals) {
    json f;
    f["feature"] = s.feature;
    f["value_at_x"] = s.value_at_x;
    f["l"] = s.l;
    f["u"] = s.u;
    f["delta_lo"] = s.deviation_lo();
    f["delta_hi"] = s.deviation_hi();
    f["ibp"] = {s.ibp_alpha, s.ibp_beta};
    f["refinements"] = s.refinements;
    f["verify_calls"] = s.verify_calls;
    f["probes"] = s.probes;
    const std::optional<double>& xi = order.xi[s.feature];
    f["xi"] = xi ? json(*xi) : json(nullptr);
    features.push_back(std::move(f));
  }
  j["features"] = std::move(features);
  json trace = json::array();
  for (const ProcessedPoint& p : order.trace) {
    trace.push_back({p.t_ms, p.processed});
  }
  j["trace"] = std::move(trace);
  return j;
}

json ResultToJson(const ExplanationResult& r) {
  json j;
  j["subset"] = r.subset;
  j["minimality"] = MinimalityName(r.minimality);
  j["ordering"] = r.ordering;
  j["order"] = r.order;
  j["mode"] = QueryModeName(r.mode);
  j["counts"] = {{"suff_calls", r.suff_calls},
                 {"verifier_calls", r.verifier_calls}};
  j["timings_ms"] = {{"sort", r.sort_ms}, {"search", r.search_ms}};
  j["trace"] = TraceJson(r.trace);
  j["certificate"] = CertificateToJson(r.certificate);
  if (r.certified_sufficient) {
    j["certified_sufficient"] = *r.certified_sufficient;
  }
  if (r.importance) j["importance"] = OrderToJson(*r.importance);
  return j;
}

json ReportToJson(const BenchReport& report) {
  json j;
  j["environment"] = {{"processors", report.processors},
                      {"epsilon", report.epsilon},
                      {"timeout_s", report.timeout_s},
                      {"max_subdivisions", report.max_subdivisions},
                      {"seed", report.seed}};
  json aggs = json::array();
  for (const MethodAggregate& a : report.aggregates) {
    json g = {{"method", a.method},
              {"rows", a.rows},
              {"failures", a.failures},
              {"size_mean", a.mean_size},
              {"size_std", a.std_size},
              {"time_ms_mean", a.mean_time_ms},
              {"time_ms_std", a.std_time_ms}};
    if (a.sufficiency_rate) g["sufficiency_rate"] = *a.sufficiency_rate;
    aggs.push_back(std::move(g));
  }
  j["aggregates"] = std::move(aggs);
  json rows = json::array();
  for (const BenchRow& r : report.rows) {
    json row = {{"instance", r.instance},
                {"method", r.method},
                {"ok", r.ok},
                {"size", r.size},
                {"subset", r.subset},
                {"time_ms", r.time_ms},
                {"sort_ms", r.sort_ms},
                {"suff_calls", r.suff_calls},
                {"verifier_calls", r.verifier_calls}};
    if (!r.ok) row["error"] = r.error;
    if (r.certified_sufficient) {
      row["certified_sufficient"] = *r.certified_sufficient;
    }
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["skipped_trivial"] = report.skipped_trivial;
  return j;
}

std::string ReportToCsv(const BenchReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "instance,method,ok,size,time_ms,sort_ms,suff_calls,verifier_calls,"
         "certified_sufficient,subset,error\n";
  for (const BenchRow& r : report.rows) {
    out << r.instance << ',' << r.method << ',' << (r.ok ? 1 : 0) << ','
        << r.size << ',' << r.time_ms << ',' << r.sort_ms << ','
        << r.suff_calls << ',' << r.verifier_calls << ',';
    if (r.certified_sufficient) out << (*r.certified_sufficient ? 1 : 0);
    out << ',' << JoinInts(r.subset, ' ') << ',';
    // Errors are free text; keep the CSV one line per row.
    std::string err = r.error;
    for (char& ch : err) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << err << '\n';
  }
  return out.str();
}

std::string TracesCsv(const BenchReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "method,instance,t_ms,size\n";
  for (const BenchRow& r : report.rows) {
    for (const TracePoint& p : r.trace) {
      out << r.method << ',' << r.instance << ',' << p.t_ms << ',' << p.size
          << '\n';
    }
  }
  return out.str();
}

std::string ProcessedCsv(const BenchReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "method,instance,t_ms,processed\n";
  for (const BenchRow& r : report.rows) {
    for (const ProcessedPoint& p : r.processed) {
      out << r.method << ',' << r.instance << ',' << p.t_ms << ','
          << p.processed << '\n';
    }
  }
  return out.str();
}

std::vector<EpsilonPoint> ablate_epsilon(
    const NamModel& model, const std::vector<std::vector<double>>& candidates,
    const std::vector<double>& epsilons, const BenchConfig& config) {
  std::vector<EpsilonPoint> out;
  for (double eps : epsilons) {
    BenchConfig c = config;
    c.spec.epsilon = eps;
    out.push_back({eps, run_bench(model, candidates, c)});
  }
  return out;
}

std::vector<ProcsPoint> ablate_procs(
    const NamModel& model, const std::vector<std::vector<double>>& instances,
    const std::vector<int>& processors, const BenchConfig& config) {
  std::vector<ProcsPoint> out;
  for (int p : processors) {
    ProcsPoint point;
    point.processors = p;
    ExplainConfig explain = config.explain;
    explain.sort.processors = p;
    explain.suff.processors = p;
    for (const std::vector<double>& x : instances) {
      Stopwatch clock;
      const ExplanationResult r =
          explain_instance(model, x, config.spec, Method::kOurs, explain);
      point.total_ms += clock.elapsed_ms();
      point.sort_ms += r.sort_ms;
      point.orders.push_back(r.importance ? r.importance->order : r.order);
      point.subsets.push_back(r.subset);
    }
    if (!out.empty()) {
      point.identical = point.orders == out.front().orders &&
                        point.subsets == out.front().subsets;
    }
    out.push_back(std::move(point));
  }
  return out;
}

XiAblation ablate_xi(int max_decade, std::uint64_t seed,
                     const std::vector<int>& hidden, const SortConfig& sort) {
  if (max_decade < 1) throw InvalidArgumentError("max_decade must be >= 1");
  XiAblation out;
  SortConfig plain = sort;
  plain.counterexample_tightening = false;
  plain.probe_near_upper = false;
  const std::vector<double> x = {0.5, 0.5};
  const PerturbationSpec spec{0.5, true};
  for (int k = 0; k <= max_decade; ++k) {
    SyntheticSpec s;
    s.n_features = 2;
    s.hidden = hidden;
    s.seed = seed;
    s.near_identical_shift = std::pow(10.0, -k);
    const NamModel model = GenerateModel(s);
    XiPoint p;
    p.decade = k;
    p.shift = *s.near_identical_shift;
    double dev[2];
    for (int i = 0; i < 2; ++i) {
      const UnivariateNet& f = model.component(0, i);
      dev[i] = f(x[i]) - exact_extrema(propagate(f, {0.0, 1.0})).min;
    }
    p.exact_gap = dev[1] - dev[0];
    const ImportanceOrder order =
        sort_features(model, x, spec, plain, Orientation::kMinimize);
    p.rounds = order.rounds;
    for (const ImportanceInterval& iv : order.intervals) {
      p.max_refinements = std::max(p.max_refinements, iv.refinements);
    }
    p.verify_calls = order.verify_calls;
    p.sort_ms = order.elapsed_ms;
    p.order = order.order;
    out.points.push_back(std::move(p));
  }
  const double m = static_cast<double>(out.points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const XiPoint& p : out.points) {
    sx += p.decade;
    sy += p.max_refinements;
    sxx += static_cast<double>(p.decade) * p.decade;
    sxy += static_cast<double>(p.decade) * p.max_refinements;
  }
  out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  for (std::size_t k = 1; k < out.points.size(); ++k) {
    out.max_step = std::max(out.max_step, out.points[k].max_refinements -
                                              out.points[k - 1].max_refinements);
  }
  return out;
}

json XiToJson(const XiAblation& xi) {
  json points = json::array();
  for (const XiPoint& p : xi.points) {
    points.push_back({{"decade", p.decade},
                      {"shift", p.shift},
                      {"exact_gap", p.exact_gap},
                      {"rounds", p.rounds},
                      {"refinements", p.max_refinements},
                      {"verify_calls", p.verify_calls},
                      {"sort_ms", p.sort_ms},
                      {"order", p.order}});
  }
  return {{"points", points},
          {"refinements_per_decade", xi.slope},
          {"max_step", xi.max_step}};
}

json ProcsToJson(const std::vector<ProcsPoint>& points) {
  json out = json::array();
  for (const ProcsPoint& p : points) {
    out.push_back({{"processors", p.processors},
                   {"sort_ms", p.sort_ms},
                   {"total_ms", p.total_ms},
                   {"identical_to_first", p.identical}});
  }
  return out;
}

json EpsilonToJson(const std::vector<EpsilonPoint>& points) {
  json out = json::array();
  for (const EpsilonPoint& p : points) {
    json aggs = ReportToJson(p.report)["aggregates"];
    out.push_back({{"epsilon", p.epsilon},
                   {"aggregates", aggs},
                   {"skipped_trivial", p.report.skipped_trivial.size()}});
  }
  return out;
}

std::string XiCsv(const XiAblation& xi) {
  std::ostringstream out;
  out.precision(17);
  out << "decade,shift,exact_gap,rounds,max_refinements,verify_calls,sort_ms\n";
  for (const XiPoint& p : xi.points) {
    out << p.decade << ',' << p.shift << ',' << p.exact_gap << ',' << p.rounds
        << ',' << p.max_refinements << ',' << p.verify_calls << ','
        << p.sort_ms << '\n';
  }
  return out.str();
}

std::string ProcsCsv(const std::vector<ProcsPoint>& points) {
  std::ostringstream out;
  out.precision(17);
  out << "processors,sort_ms,total_ms,identical_to_first\n";
  for (const ProcsPoint& p : points) {
    out << p.processors << ',' << p.sort_ms << ',' << p.total_ms << ','
        << (p.identical ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string EpsilonCsv(const std::vector<EpsilonPoint>& points) {
  std::ostringstream out;
  out.precision(17);
  out << "epsilon,method,rows,failures,size_mean,size_std,time_ms_mean,"
         "time_ms_std\n";
  for (const EpsilonPoint& p : points) {
    for (const MethodAggregate& a : p.report.aggregates) {
      out << p.epsilon << ',' << a.method << ',' << a.rows << ','
          << a.failures << ',' << a.mean_size << ',' << a.std_size << ','
          << a.mean_time_ms << ',' << a.std_time_ms << '\n';
    }
  }
  return out.str();
}

}  // namespace namc
