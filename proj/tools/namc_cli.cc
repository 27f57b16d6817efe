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

// Command-line front end: explain, sort, verify-suff, bench, ablate,
// gen-model, export-plot.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "namc/bench.h"
#include "namc/errors.h"
#include "namc/exact_pwl.h"
#include "namc/explain.h"
#include "namc/importance.h"
#include "namc/model_io.h"
#include "namc/sufficiency.h"
#include "namc/synthetic.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBudget = 2;
constexpr int kExitUsage = 64;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string model;
  std::string data;
  std::string label;
  int index = 0;
  std::vector<double> x;
  double epsilon = 0.1;
  bool no_clamp = false;
  int procs = 1;
  std::int64_t budget = 100'000;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  std::string mode;
  double delta = 0.1;
  std::string backend = "exact-pwl";
  std::optional<int> rival;
};

void AddModel(CLI::App* cmd, Common& c) {
  cmd->add_option("--model", c.model, "Model JSON file")->required();
}

void AddInstance(CLI::App* cmd, Common& c) {
  cmd->add_option("--data", c.data, "CSV dataset (header row)");
  cmd->add_option("--label", c.label, "Label column to ignore in --data");
  cmd->add_option("--index", c.index, "Row of --data to explain");
  cmd->add_option("--x", c.x, "Instance values, comma separated")
      ->delimiter(',');
}

void AddPerturbation(CLI::App* cmd, Common& c) {
  cmd->add_option("--epsilon", c.epsilon, "Per-feature perturbation radius");
  cmd->add_flag("--no-clamp", c.no_clamp,
                "Do not intersect the ball with the feature domain");
}

void AddQuery(CLI::App* cmd, Common& c) {
  cmd->add_option("--mode", c.mode,
                  "class1|class0|regression-lower|regression-upper|"
                  "regression-two-sided (default: from the prediction)");
  cmd->add_option("--delta", c.delta, "Allowed regression deviation");
  cmd->add_option("--backend", c.backend, "exact-pwl|verifier|sampling");
  cmd->add_option("--rival", c.rival, "Rival class (multiclass models)");
}

void AddRun(CLI::App* cmd, Common& c) {
  cmd->add_option("--procs", c.procs, "Worker threads for the sort");
  cmd->add_option("--budget", c.budget,
                  "Branch-and-bound subdivisions per verifier query");
  cmd->add_option("--seed", c.seed, "Random seed");
}

void AddOutput(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Output file (default stdout)");
  cmd->add_option("--format", c.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

void Emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw namc::Error("cannot write " + path);
  f << text;
}

std::string JsonText(const json& j) { return j.dump(2) + "\n"; }

namc::PerturbationSpec Spec(const Common& c) {
  if (!(c.epsilon >= 0.0)) throw UsageError("--epsilon must be >= 0");
  return {c.epsilon, !c.no_clamp};
}

namc::Dataset LoadData(const Common& c, const namc::NamModel& model) {
  namc::DatasetSchema schema;
  schema.features = model.meta().names;
  if (!c.label.empty()) schema.label = c.label;
  schema.normalization = model.meta().normalization;
  return namc::load_dataset(c.data, schema);
}

std::vector<double> Instance(const Common& c, const namc::NamModel& model) {
  if (!c.x.empty() && !c.data.empty()) {
    throw UsageError("give either --x or --data, not both");
  }
  if (!c.x.empty()) return c.x;
  if (c.data.empty()) throw UsageError("an instance needs --x or --data");
  const namc::Dataset data = LoadData(c, model);
  if (c.index < 0 || c.index >= static_cast<int>(data.instances.size())) {
    throw UsageError("--index out of range (dataset has " +
                     std::to_string(data.instances.size()) + " rows)");
  }
  return data.instances[c.index].values;
}

namc::ExplainConfig Config(const Common& c) {
  if (c.procs < 1) throw UsageError("--procs must be >= 1");
  if (c.budget < 1) throw UsageError("--budget must be >= 1");
  namc::ExplainConfig config;
  config.sort.processors = c.procs;
  config.sort.verify.max_subdivisions = c.budget;
  config.suff.processors = c.procs;
  config.suff.verify.max_subdivisions = c.budget;
  const std::optional<namc::Backend> backend = namc::ParseBackend(c.backend);
  if (!backend) throw UsageError("unknown backend: " + c.backend);
  config.suff.backend = *backend;
  if (!c.mode.empty()) {
    config.mode = namc::ParseQueryMode(c.mode);
    if (!config.mode) throw UsageError("unknown mode: " + c.mode);
  }
  config.delta = c.delta;
  return config;
}

namc::Method ParseMethodOrThrow(const std::string& name) {
  const std::optional<namc::Method> m = namc::ParseMethod(name);
  if (!m) throw UsageError("unknown method: " + name);
  return *m;
}

std::vector<int> ParseHidden(const std::vector<int>& hidden) {
  for (int h : hidden) {
    if (h < 1) throw UsageError("--hidden widths must be >= 1");
  }
  return hidden;
}

// Dataset rows when --data is given, else seeded uniform instances.
std::vector<std::vector<double>> Candidates(const Common& c,
                                            const namc::NamModel& model,
                                            int count) {
  std::vector<std::vector<double>> out;
  if (!c.data.empty()) {
    for (const namc::Instance& inst : LoadData(c, model).instances) {
      out.push_back(inst.values);
    }
    return out;
  }
  namc::Rng rng(c.seed);
  for (int k = 0; k < count; ++k) {
    std::vector<double> x(model.n_features());
    for (int i = 0; i < model.n_features(); ++i) {
      const namc::Interval& d = model.domain(i);
      x[i] = rng.Uniform(d.lo, d.hi);
    }
    out.push_back(std::move(x));
  }
  return out;
}

int Run(int argc, char** argv) {
  CLI::App app{"Certified minimal explanations for neural additive models",
               "namc"};
  app.require_subcommand(1);
  Common c;

  // explain
  std::string method = "ours";
  CLI::App* explain = app.add_subcommand("explain", "Explain one instance");
  AddModel(explain, c);
  AddInstance(explain, c);
  AddPerturbation(explain, c);
  AddQuery(explain, c);
  AddRun(explain, c);
  AddOutput(explain, c);
  explain->add_option("--method", method,
                      "ours|ours-linear|lexicographic|sensitivity|sampling|"
                      "brute-force");
  int sensitivity_samples = 64;
  int sampling_grid = 1000;
  explain->add_option("--sensitivity-samples", sensitivity_samples);
  explain->add_option("--grid", sampling_grid, "Sampling baseline grid size");

  // sort
  CLI::App* sort = app.add_subcommand("sort", "Importance order of features");
  AddModel(sort, c);
  AddInstance(sort, c);
  AddPerturbation(sort, c);
  AddQuery(sort, c);
  AddRun(sort, c);
  AddOutput(sort, c);
  bool no_tightening = false;
  bool no_probe = false;
  sort->add_flag("--no-tightening", no_tightening,
                 "Disable counterexample tightening");
  sort->add_flag("--no-probe", no_probe, "Disable the near-upper-bound probe");

  // verify-suff
  CLI::App* verify = app.add_subcommand("verify-suff",
                                        "Check sufficiency of a feature subset");
  AddModel(verify, c);
  AddInstance(verify, c);
  AddPerturbation(verify, c);
  AddQuery(verify, c);
  AddRun(verify, c);
  AddOutput(verify, c);
  std::vector<int> subset;
  verify->add_option("--subset", subset, "Fixed features, comma separated")
      ->delimiter(',');

  // bench
  CLI::App* bench = app.add_subcommand("bench", "Batch comparison of methods");
  AddModel(bench, c);
  bench->add_option("--data", c.data, "CSV dataset of candidate instances");
  bench->add_option("--label", c.label, "Label column to ignore");
  AddPerturbation(bench, c);
  AddQuery(bench, c);
  AddRun(bench, c);
  AddOutput(bench, c);
  std::vector<std::string> methods = {"ours", "lexicographic"};
  int instances = 50;
  int candidates = 0;
  double timeout = 600.0;
  bool keep_trivial = false;
  std::string traces_path, processed_path;
  bench->add_option("--methods", methods, "Comma separated")->delimiter(',');
  bench->add_option("--instances", instances, "Non-trivial instances to run");
  bench->add_option("--candidates", candidates,
                    "Random candidates without --data (default 4x instances)");
  bench->add_option("--timeout", timeout, "Seconds per instance and method");
  bench->add_flag("--keep-trivial", keep_trivial,
                  "Do not skip instances with empty or full explanations");
  bench->add_option("--traces", traces_path, "Size-over-time CSV");
  bench->add_option("--processed", processed_path,
                    "Processed-features-over-time CSV");

  // ablate
  CLI::App* ablate = app.add_subcommand("ablate", "Ablation studies");
  ablate->require_subcommand(1);
  CLI::App* ab_eps = ablate->add_subcommand("epsilon", "Perturbation radius");
  AddModel(ab_eps, c);
  ab_eps->add_option("--data", c.data);
  ab_eps->add_option("--label", c.label);
  AddQuery(ab_eps, c);
  AddRun(ab_eps, c);
  AddOutput(ab_eps, c);
  std::vector<double> epsilons = {0.01, 0.1, 0.2, 0.5};
  ab_eps->add_option("--epsilons", epsilons)->delimiter(',');
  ab_eps->add_option("--instances", instances);
  ab_eps->add_option("--timeout", timeout);
  CLI::App* ab_procs = ablate->add_subcommand("procs", "Processor count");
  AddModel(ab_procs, c);
  ab_procs->add_option("--data", c.data);
  ab_procs->add_option("--label", c.label);
  AddPerturbation(ab_procs, c);
  AddQuery(ab_procs, c);
  AddRun(ab_procs, c);
  AddOutput(ab_procs, c);
  std::vector<int> procs_list = {1, 2, 4, 8};
  ab_procs->add_option("--procs-list", procs_list)->delimiter(',');
  ab_procs->add_option("--instances", instances);
  CLI::App* ab_xi = ablate->add_subcommand("xi", "Near-identical features");
  AddRun(ab_xi, c);
  AddOutput(ab_xi, c);
  int max_decade = 7;
  std::vector<int> hidden = {64, 64, 32};
  ab_xi->add_option("--max-decade", max_decade, "Smallest shift 10^-k");
  ab_xi->add_option("--hidden", hidden)->delimiter(',');

  // gen-model
  CLI::App* gen = app.add_subcommand("gen-model", "Synthetic model");
  namc::SyntheticSpec spec;
  std::string task = "binary";
  std::optional<double> shift;
  gen->add_option("--n", spec.n_features, "Features");
  gen->add_option("--hidden", hidden)->delimiter(',');
  gen->add_option("--task", task)->check(
      CLI::IsMember({"binary", "multiclass", "regression"}));
  gen->add_option("--classes", spec.n_classes);
  gen->add_option("--seed", c.seed);
  gen->add_option("--near-identical", shift,
                  "Features 0 and 1 become a pair with this deviation gap");
  gen->add_flag("--spike", spec.spike, "Replace the last component by a spike");
  gen->add_option("--spike-x", spec.spike_x);
  gen->add_option("--spike-epsilon", spec.spike_epsilon);
  gen->add_option("--spike-grid", spec.spike_grid);
  gen->add_flag("--linear-preset", spec.linear_preset,
                "f_1 = 2z, f_2 = z, intercept -0.2");
  gen->add_option("--out", c.out, "Output file (default stdout)");

  // export-plot
  CLI::App* plot = app.add_subcommand("export-plot",
                                      "Component values as CSV");
  AddModel(plot, c);
  int feature = 0;
  int output = 0;
  int grid = 1000;
  std::optional<double> plot_x;
  plot->add_option("--feature", feature)->required();
  plot->add_option("--output", output, "Model output (class logit)");
  plot->add_option("--x", plot_x, "Feature value; default: whole domain");
  AddPerturbation(plot, c);
  plot->add_option("--grid", grid);
  plot->add_option("--out", c.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*explain) {
    const namc::NamModel model = namc::load_model(c.model);
    const std::vector<double> x = Instance(c, model);
    namc::ExplainConfig config = Config(c);
    config.sensitivity_samples = sensitivity_samples;
    config.sampling_grid = sampling_grid;
    const namc::Method m = ParseMethodOrThrow(method);
    const namc::ExplanationResult r =
        namc::explain_instance(model, x, Spec(c), m, config, c.rival);
    if (c.format == "csv") {
      std::ostringstream s;
      s << "subset,size,minimality,suff_calls,verifier_calls,sort_ms,"
           "search_ms\n";
      for (std::size_t k = 0; k < r.subset.size(); ++k) {
        s << (k ? " " : "") << r.subset[k];
      }
      s << ',' << r.subset.size() << ',' << namc::MinimalityName(r.minimality)
        << ',' << r.suff_calls << ',' << r.verifier_calls << ',' << r.sort_ms
        << ',' << r.search_ms << '\n';
      Emit(c.out, s.str());
    } else {
      Emit(c.out, JsonText(namc::ResultToJson(r)));
    }
    return kExitOk;
  }

  if (*sort) {
    namc::NamModel model = namc::load_model(c.model);
    const std::vector<double> x = Instance(c, model);
    namc::ExplainConfig config = Config(c);
    config.sort.counterexample_tightening = !no_tightening;
    config.sort.probe_near_upper = !no_probe;
    if (model.task() == namc::Task::kMulticlass) {
      if (!c.rival) throw UsageError("sort on a multiclass model needs --rival");
      model = namc::reduce_pairwise(model, namc::predict(model, x).label,
                                    *c.rival);
      config.mode = namc::QueryMode::kClass1;
    }
    const namc::QueryMode mode = namc::ResolveMode(model, x, config);
    const std::optional<namc::Orientation> o = namc::ModeOrientation(mode);
    if (!o) throw UsageError("sort needs a one-sided query mode");
    const namc::ImportanceOrder order =
        namc::sort_features(model, x, Spec(c), config.sort, o);
    json j = namc::OrderToJson(order);
    j["mode"] = namc::QueryModeName(mode);
    Emit(c.out, JsonText(j));
    return kExitOk;
  }

  if (*verify) {
    const namc::NamModel model = namc::load_model(c.model);
    const std::vector<double> x = Instance(c, model);
    const namc::ExplainConfig config = Config(c);
    namc::SuffCertificate cert;
    if (model.task() == namc::Task::kMulticlass) {
      const int winner = namc::predict(model, x).label;
      if (c.rival) {
        const namc::NamModel pair =
            namc::reduce_pairwise(model, winner, *c.rival);
        namc::AdditiveOracle oracle(pair, x, Spec(c), namc::QueryMode::kClass1,
                                    0.0, config.suff);
        cert = oracle.Check(subset);
      } else {
        namc::ConjunctionOracle oracle(model, x, Spec(c), winner, config.suff);
        cert = oracle.Check(subset);
      }
    } else {
      const namc::QueryMode mode = namc::ResolveMode(model, x, config);
      namc::AdditiveOracle oracle(model, x, Spec(c), mode, config.delta,
                                  config.suff);
      cert = oracle.Check(subset);
    }
    Emit(c.out, JsonText(namc::CertificateToJson(cert)));
    return kExitOk;
  }

  const auto bench_config = [&]() {
    namc::BenchConfig b;
    b.methods.clear();
    for (const std::string& m : methods) {
      b.methods.push_back(ParseMethodOrThrow(m));
    }
    b.spec = Spec(c);
    b.explain = Config(c);
    b.instances = instances;
    b.timeout_s = timeout;
    b.skip_trivial = !keep_trivial;
    b.seed = c.seed;
    if (instances < 1) throw UsageError("--instances must be >= 1");
    if (!(timeout > 0.0)) throw UsageError("--timeout must be > 0");
    return b;
  };

  if (*bench) {
    const namc::NamModel model = namc::load_model(c.model);
    const namc::BenchConfig b = bench_config();
    const int count = candidates > 0 ? candidates : 4 * instances;
    const namc::BenchReport report =
        namc::run_bench(model, Candidates(c, model, count), b);
    Emit(c.out, c.format == "csv" ? namc::ReportToCsv(report)
                                  : JsonText(namc::ReportToJson(report)));
    if (!traces_path.empty()) Emit(traces_path, namc::TracesCsv(report));
    if (!processed_path.empty()) {
      Emit(processed_path, namc::ProcessedCsv(report));
    }
    return kExitOk;
  }

  if (*ab_eps) {
    const namc::NamModel model = namc::load_model(c.model);
    methods = {"ours"};
    const namc::BenchConfig b = bench_config();
    const auto points = namc::ablate_epsilon(
        model, Candidates(c, model, 4 * instances), epsilons, b);
    Emit(c.out, c.format == "csv" ? namc::EpsilonCsv(points)
                                  : JsonText(namc::EpsilonToJson(points)));
    return kExitOk;
  }

  if (*ab_procs) {
    const namc::NamModel model = namc::load_model(c.model);
    methods = {"ours"};
    const namc::BenchConfig b = bench_config();
    const auto points = namc::ablate_procs(
        model, Candidates(c, model, instances), procs_list, b);
    Emit(c.out, c.format == "csv" ? namc::ProcsCsv(points)
                                  : JsonText(namc::ProcsToJson(points)));
    return kExitOk;
  }

  if (*ab_xi) {
    namc::SortConfig s;
    s.verify.max_subdivisions = c.budget;
    const namc::XiAblation xi =
        namc::ablate_xi(max_decade, c.seed, ParseHidden(hidden), s);
    Emit(c.out, c.format == "csv" ? namc::XiCsv(xi)
                                  : JsonText(namc::XiToJson(xi)));
    return kExitOk;
  }

  if (*gen) {
    spec.hidden = ParseHidden(hidden);
    spec.task = *namc::ParseTask(task);
    spec.seed = c.seed;
    spec.near_identical_shift = shift;
    Emit(c.out, namc::DumpModel(namc::GenerateModel(spec)));
    return kExitOk;
  }

  if (*plot) {
    const namc::NamModel model = namc::load_model(c.model);
    if (feature < 0 || feature >= model.n_features()) {
      throw UsageError("--feature out of range");
    }
    if (output < 0 || output >= model.n_outputs()) {
      throw UsageError("--output out of range");
    }
    if (grid < 2) throw UsageError("--grid must be >= 2");
    const namc::UnivariateNet& f = model.component(output, feature);
    namc::Interval box = model.domain(feature);
    if (plot_x) {
      if (!box.contains(*plot_x)) throw UsageError("--x outside the domain");
      box = Spec(c).FeatureInterval(*plot_x, box);
    }
    const namc::PwlFunction pwl = namc::propagate(f, box);
    const namc::Extrema e = namc::exact_extrema(pwl);
    // z -> (on grid, is breakpoint)
    std::map<double, std::pair<bool, bool>> rows;
    const double step = box.width() / (grid - 1);
    for (int k = 0; k < grid; ++k) {
      rows[k == grid - 1 ? box.hi : box.lo + k * step].first = true;
    }
    for (double t : pwl.breakpoints()) rows[t].second = true;
    std::ostringstream s;
    s.precision(17);
    s << "z,value,grid,breakpoint,certified_min,certified_max\n";
    for (const auto& [z, flags] : rows) {
      s << z << ',' << f(z) << ',' << flags.first << ',' << flags.second << ','
        << (z == e.argmin) << ',' << (z == e.argmax) << '\n';
    }
    Emit(c.out, s.str());
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const namc::InvalidArgumentError& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const namc::BudgetExceededError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
