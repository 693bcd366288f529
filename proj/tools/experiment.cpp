#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <thread>
#include <tuple>

namespace frsd::tools {

namespace {

using json = nlohmann::json;

constexpr double kTuneTarget = 1e-6;
constexpr double kDivergence = 1e3;
constexpr double kDefaultProduct = 0.05;  // alpha * beta for FRSD defaults

const json* field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& object_at(const json& doc, const char* key, const std::string& path) {
  const json* f = field(doc, key);
  if (!f) throw SchemaError(path + "/" + key, "required field is missing");
  if (!f->is_object()) throw SchemaError(path + "/" + key, "expected an object");
  return *f;
}

double number(const json& obj, const char* key, const std::string& path, double fallback) {
  const json* f = field(obj, key);
  if (!f) return fallback;
  if (!f->is_number()) throw SchemaError(path + "/" + key, "expected a number");
  return f->get<double>();
}

std::size_t count(const json& obj, const char* key, const std::string& path,
                  std::size_t fallback) {
  const json* f = field(obj, key);
  if (!f) return fallback;
  if (!f->is_number_integer() || f->get<std::int64_t>() < 0) {
    throw SchemaError(path + "/" + key, "expected a non-negative integer");
  }
  return f->get<std::size_t>();
}

std::string text(const json& obj, const char* key, const std::string& path,
                 const std::string& fallback) {
  const json* f = field(obj, key);
  if (!f) return fallback;
  if (!f->is_string()) throw SchemaError(path + "/" + key, "expected a string");
  return f->get<std::string>();
}

std::vector<double> numbers(const json& obj, const char* key, const std::string& path) {
  const json* f = field(obj, key);
  if (!f) return {};
  if (!f->is_array()) throw SchemaError(path + "/" + key, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < f->size(); ++i) {
    if (!(*f)[i].is_number()) {
      throw SchemaError(path + "/" + key + "/" + std::to_string(i), "expected a number");
    }
    out.push_back((*f)[i].get<double>());
  }
  return out;
}

ProblemSpec parse_problem(const json& obj) {
  const std::string path = "/problem";
  ProblemSpec spec;
  const std::string kind = text(obj, "kind", path, "");
  if (kind == "huber") {
    spec.kind = ProblemKind::huber;
  } else if (kind == "logistic") {
    spec.kind = ProblemKind::logistic;
  } else if (kind == "quadratic") {
    spec.kind = ProblemKind::quadratic;
  } else {
    throw SchemaError(path + "/kind", "expected huber, logistic or quadratic");
  }
  spec.m_per_node = count(obj, "m_per_node", path, spec.m_per_node);
  spec.dimension = count(obj, "dimension", path, spec.dimension);
  spec.xi = number(obj, "xi", path, spec.xi);
  spec.lambda = number(obj, "lambda", path, spec.lambda);
  spec.dataset = text(obj, "dataset", path, "");
  spec.rows = count(obj, "rows", path, spec.rows);
  if (spec.m_per_node == 0) throw SchemaError(path + "/m_per_node", "must be positive");
  if (spec.dimension == 0) throw SchemaError(path + "/dimension", "must be positive");
  if (spec.kind == ProblemKind::logistic && spec.dimension < 2) {
    throw SchemaError(path + "/dimension", "logistic needs a feature and an intercept");
  }
  if (!(spec.xi > 0.0)) throw SchemaError(path + "/xi", "must be positive");
  if (!(spec.lambda >= 0.0)) throw SchemaError(path + "/lambda", "must be non-negative");
  return spec;
}

GraphSpec parse_graph(const json& obj) {
  const std::string path = "/graph";
  GraphSpec spec;
  const std::string kind = text(obj, "kind", path, "random");
  if (kind == "random") {
    spec.kind = GraphKind::random;
  } else if (kind == "cycle") {
    spec.kind = GraphKind::cycle;
  } else if (kind == "cycle_chords") {
    spec.kind = GraphKind::cycle_chords;
  } else if (kind == "complete") {
    spec.kind = GraphKind::complete;
  } else if (kind == "file") {
    spec.kind = GraphKind::file;
  } else {
    throw SchemaError(path + "/kind",
                      "expected random, cycle, cycle_chords, complete or file");
  }
  spec.nodes = count(obj, "nodes", path, spec.nodes);
  spec.phi = number(obj, "phi", path, spec.phi);
  spec.stride = count(obj, "stride", path, spec.stride);
  spec.path = text(obj, "path", path, "");
  if (spec.kind == GraphKind::file) {
    if (spec.path.empty()) throw SchemaError(path + "/path", "required for file graphs");
  } else if (spec.nodes == 0) {
    throw SchemaError(path + "/nodes", "must be positive");
  }
  if (spec.kind == GraphKind::random && !(spec.phi > 0.0 && spec.phi <= 1.0)) {
    throw SchemaError(path + "/phi", "must lie in (0, 1]");
  }
  return spec;
}

MethodSpec parse_method(const json& obj, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  MethodSpec spec;
  const json* algo = field(obj, "algorithm");
  if (!algo || !algo->is_string()) {
    throw SchemaError(path + "/algorithm", "expected an algorithm name");
  }
  spec.algorithm = parse_algorithm(algo->get<std::string>());
  spec.name = text(obj, "name", path, std::string(algorithm_name(spec.algorithm)));
  if (spec.name.empty()) throw SchemaError(path + "/name", "must not be empty");

  const json* alpha = field(obj, "alpha");
  if (!alpha || !alpha->is_number()) throw SchemaError(path + "/alpha", "expected a number");
  spec.hp.alpha = alpha->get<double>();
  if (!(spec.hp.alpha > 0.0)) throw SchemaError(path + "/alpha", "must be positive");
  const bool frsd_like = spec.algorithm == Algorithm::frsd || spec.algorithm == Algorithm::frsd_cs;
  spec.hp.beta = number(obj, "beta", path, frsd_like ? kDefaultProduct / spec.hp.alpha : 0.0);
  if (!(spec.hp.beta >= 0.0)) throw SchemaError(path + "/beta", "must be non-negative");

  if (const json* d = field(obj, "debias")) {
    if (!d->is_boolean()) throw SchemaError(path + "/debias", "expected a boolean");
    spec.options.debias = d->get<bool>();
  }
  if (const json* c = field(obj, "combine_then_adapt")) {
    if (!c->is_boolean()) throw SchemaError(path + "/combine_then_adapt", "expected a boolean");
    spec.options.abm_combine_then_adapt = c->get<bool>();
  }
  return spec;
}

std::string run_label(const MethodSpec& m, std::uint64_t seed) {
  return m.name + "_" + std::to_string(seed);
}

// Calls fn(i) for i in [0, n) on up to `slots` threads. The first exception
// (lowest index) is rethrown after every worker has finished.
void parallel_for(std::size_t n, std::size_t slots, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(slots, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Problem, graph and oracle solution of one seed.
struct Instance {
  DiGraph graph{1, {}};
  std::optional<ProblemInstance> problem;
  Eigen::VectorXd x_star;
};

std::vector<Instance> build_instances(const ExperimentSuite& suite, std::size_t slots) {
  std::vector<Instance> out(suite.seeds.size());
  parallel_for(out.size(), slots, [&](std::size_t i) {
    const std::uint64_t seed = suite.seeds[i];
    Instance& inst = out[i];
    inst.graph = build_graph(suite.graph, seed);
    inst.problem = build_problem(suite.problem, inst.graph.node_count(), seed);
    inst.x_star = solve_centralized(*inst.problem, suite.oracle_tol).x_star;
  });
  return out;
}

SimulationConfig make_config(const ExperimentSuite& suite, const MethodSpec& m,
                             const Instance& inst, std::uint64_t seed) {
  SimulationConfig config;
  config.algorithm = m.algorithm;
  config.options = m.options;
  config.graph = inst.graph;
  config.problem = inst.problem;
  config.hp = m.hp;
  config.max_iterations = suite.iterations;
  config.cadence = suite.cadence;
  config.seed = seed;
  config.oracle_tol = suite.oracle_tol;
  config.x_star = inst.x_star;
  config.divergence_threshold = kDivergence;
  return config;
}

RunSummary summarize(const MethodSpec& m, std::uint64_t seed, const Trace& trace) {
  RunSummary s;
  s.name = m.name;
  s.algorithm = m.algorithm;
  s.seed = seed;
  s.final_residual = trace.points.empty() ? 0.0 : trace.points.back().residual;
  s.diverged = trace.diverged;
  for (std::size_t t = 0; t < std::size(kThresholds); ++t) {
    s.iterations_to[t] = iterations_to(trace, kThresholds[t]);
    if (s.iterations_to[t]) {
      for (const TracePoint& pt : trace.points) {
        if (pt.k == *s.iterations_to[t]) {
          s.broadcast_to[t] = pt.cum_broadcast;
          break;
        }
      }
    }
  }
  if (!trace.diverged) {
    try {
      s.rate = fit_linear_rate(trace);
    } catch (const InsufficientData&) {
      s.rate.reset();
    }
  }
  return s;
}

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

std::string threshold_key(double t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.0e", t);
  return buf;
}

}  // namespace

ExperimentSuite parse_config(const json& doc) {
  if (!doc.is_object()) throw SchemaError("", "expected a JSON object");
  ExperimentSuite suite;
  suite.problem = parse_problem(object_at(doc, "problem", ""));
  suite.graph = parse_graph(object_at(doc, "graph", ""));

  const json* methods = field(doc, "algorithms");
  if (!methods || !methods->is_array() || methods->empty()) {
    throw SchemaError("/algorithms", "expected a non-empty array");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < methods->size(); ++i) {
    const std::string path = "/algorithms/" + std::to_string(i);
    MethodSpec m = parse_method((*methods)[i], path);
    if (!names.insert(m.name).second) throw SchemaError(path + "/name", "duplicate name");
    suite.methods.push_back(std::move(m));
  }

  const json* seeds = field(doc, "seeds");
  if (!seeds || !seeds->is_array() || seeds->empty()) {
    throw SchemaError("/seeds", "expected a non-empty array of seeds");
  }
  for (std::size_t i = 0; i < seeds->size(); ++i) {
    const json& s = (*seeds)[i];
    if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
      throw SchemaError("/seeds/" + std::to_string(i), "expected a non-negative integer");
    }
    suite.seeds.push_back(s.get<std::uint64_t>());
  }

  suite.iterations = count(doc, "iterations", "", suite.iterations);
  if (suite.iterations == 0) throw SchemaError("/iterations", "must be positive");
  suite.cadence = count(doc, "cadence", "", suite.cadence);
  if (suite.cadence == 0) throw SchemaError("/cadence", "must be positive");
  suite.oracle_tol = number(doc, "oracle_tol", "", suite.oracle_tol);
  if (!(suite.oracle_tol > 0.0)) throw SchemaError("/oracle_tol", "must be positive");
  suite.output_dir = text(doc, "output_dir", "", suite.output_dir.string());

  if (const json* t = field(doc, "tuning")) {
    if (!t->is_object()) throw SchemaError("/tuning", "expected an object");
    TuningSpec tuning;
    tuning.alphas = numbers(*t, "alphas", "/tuning");
    tuning.betas = numbers(*t, "betas", "/tuning");
    tuning.budget = count(*t, "budget", "/tuning", 0);
    if (tuning.alphas.empty()) throw SchemaError("/tuning/alphas", "expected a non-empty array");
    suite.tuning = std::move(tuning);
  }
  return suite;
}

ExperimentSuite parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

DiGraph build_graph(const GraphSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case GraphKind::random:
      return generate_strongly_connected(spec.nodes, spec.phi, seed);
    case GraphKind::cycle:
      return directed_cycle(spec.nodes);
    case GraphKind::cycle_chords:
      return cycle_with_chords(spec.nodes, spec.stride);
    case GraphKind::complete:
      return complete_digraph(spec.nodes);
    case GraphKind::file:
      return read_graph_file(spec.path);
  }
  throw DomainError("unknown graph kind");
}

ProblemInstance build_problem(const ProblemSpec& spec, std::size_t nodes, std::uint64_t seed) {
  switch (spec.kind) {
    case ProblemKind::huber:
      return synth_huber_problem(nodes, spec.m_per_node, spec.dimension, spec.xi, seed);
    case ProblemKind::quadratic:
      return synth_quadratic_problem(nodes, spec.m_per_node, spec.dimension, seed);
    case ProblemKind::logistic: {
      const Dataset ds = spec.dataset.empty()
                             ? synth_logistic_dataset(spec.rows, spec.dimension - 1, seed)
                             : read_libsvm_file(spec.dataset);
      return partition_dataset(ds, nodes, spec.m_per_node, spec.dimension, spec.lambda, seed);
    }
  }
  throw DomainError("unknown problem kind");
}

nlohmann::ordered_json to_json(const SuiteSummary& summary) {
  nlohmann::ordered_json doc;
  doc["thresholds"] = std::vector<double>(std::begin(kThresholds), std::end(kThresholds));
  auto& runs = doc["runs"] = nlohmann::ordered_json::array();
  for (const RunSummary& r : summary.runs) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["algorithm"] = std::string(algorithm_name(r.algorithm));
    j["seed"] = r.seed;
    j["final_residual"] = r.final_residual;
    j["diverged"] = r.diverged;
    for (std::size_t t = 0; t < std::size(kThresholds); ++t) {
      const std::string key = threshold_key(kThresholds[t]);
      j["iterations_to"][key] = optional_json(r.iterations_to[t]);
      j["broadcast_to"][key] = optional_json(r.broadcast_to[t]);
    }
    if (r.rate) {
      j["rate"] = {{"slope", r.rate->slope}, {"r_squared", r.rate->r_squared}};
    } else {
      j["rate"] = nullptr;
    }
    runs.push_back(std::move(j));
  }
  auto& curves = doc["curves"] = nlohmann::ordered_json::object();
  for (const CurveSummary& c : summary.curves) {
    curves[c.name] = {{"k", c.k}, {"min", c.min}, {"mean", c.mean}, {"max", c.max}};
  }
  return doc;
}

SuiteSummary run_suite(const ExperimentSuite& suite, std::size_t slots) {
  if (suite.seeds.empty()) throw SchemaError("/seeds", "expected a non-empty array of seeds");
  std::filesystem::create_directories(suite.output_dir);
  const std::vector<Instance> instances = build_instances(suite, slots);

  const std::size_t seeds = suite.seeds.size();
  const std::size_t total = suite.methods.size() * seeds;
  std::vector<std::vector<TracePoint>> points(total);
  SuiteSummary summary;
  summary.runs.resize(total);
  parallel_for(total, slots, [&](std::size_t idx) {
    const MethodSpec& m = suite.methods[idx / seeds];
    const std::uint64_t seed = suite.seeds[idx % seeds];
    const std::string label = run_label(m, seed);
    try {
      const Trace trace = run(make_config(suite, m, instances[idx % seeds], seed));
      write_trace_csv_file((suite.output_dir / (label + ".csv")).string(), trace);
      summary.runs[idx] = summarize(m, seed, trace);
      points[idx] = trace.points;
    } catch (const OracleDidNotConverge&) {
      throw;
    } catch (const std::exception& e) {
      throw RunFailed(label + ": " + e.what());
    }
  });

  for (std::size_t mi = 0; mi < suite.methods.size(); ++mi) {
    CurveSummary curve;
    curve.name = suite.methods[mi].name;
    std::size_t len = std::numeric_limits<std::size_t>::max();
    for (std::size_t s = 0; s < seeds; ++s) len = std::min(len, points[mi * seeds + s].size());
    for (std::size_t i = 0; i < len; ++i) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      double sum = 0.0;
      for (std::size_t s = 0; s < seeds; ++s) {
        const double r = points[mi * seeds + s][i].residual;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        sum += r;
      }
      curve.k.push_back(points[mi * seeds][i].k);
      curve.min.push_back(lo);
      // Clamp so rounding in the sum cannot push the mean outside the range.
      curve.mean.push_back(std::clamp(sum / static_cast<double>(seeds), lo, hi));
      curve.max.push_back(hi);
    }
    summary.curves.push_back(std::move(curve));
  }

  std::ofstream out(suite.output_dir / "summary.json");
  if (!out) throw RunFailed("cannot write " + (suite.output_dir / "summary.json").string());
  out << to_json(summary).dump(2) << '\n';
  return summary;
}

TuneResult tune_grid(const ExperimentSuite& suite, const std::string& method,
                     const std::vector<double>& alphas, const std::vector<double>& betas,
                     std::size_t budget, std::size_t slots) {
  const auto it = std::find_if(suite.methods.begin(), suite.methods.end(),
                               [&](const MethodSpec& m) { return m.name == method; });
  if (it == suite.methods.end()) throw UnknownAlgorithm(method);
  if (alphas.empty()) throw SchemaError("/tuning/alphas", "expected a non-empty array");
  if (suite.seeds.empty()) throw SchemaError("/seeds", "expected a non-empty array of seeds");
  const MethodSpec& base = *it;
  const bool frsd_like = base.algorithm == Algorithm::frsd || base.algorithm == Algorithm::frsd_cs;
  const std::size_t iterations = budget > 0 ? budget : suite.iterations;

  TuneResult result;
  result.name = base.name;
  for (double a : alphas) {
    if (betas.empty()) {
      result.evaluated.push_back({a, frsd_like ? kDefaultProduct / a : 0.0});
    } else {
      for (double b : betas) result.evaluated.push_back({a, b});
    }
  }

  const std::vector<Instance> instances = build_instances(suite, slots);
  const std::size_t seeds = suite.seeds.size();
  std::vector<Trace> traces(result.evaluated.size() * seeds);
  parallel_for(traces.size(), slots, [&](std::size_t idx) {
    MethodSpec m = base;
    m.hp = {result.evaluated[idx / seeds].alpha, result.evaluated[idx / seeds].beta};
    SimulationConfig config = make_config(suite, m, instances[idx % seeds], suite.seeds[idx % seeds]);
    config.max_iterations = iterations;
    config.stop_below = 0.0;
    try {
      traces[idx] = run(config);
    } catch (const StepError&) {
      // A step that fails numerically (e.g. alpha beta >= 1) counts as divergence.
      traces[idx].diverged = true;
    }
  });

  for (std::size_t g = 0; g < result.evaluated.size(); ++g) {
    GridPoint& pt = result.evaluated[g];
    double its = 0.0;
    double fin = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
      const Trace& t = traces[g * seeds + s];
      if (t.diverged || t.points.empty()) {
        pt.diverged = true;
        break;
      }
      const auto reached = iterations_to(t, kTuneTarget);
      its += reached ? static_cast<double>(*reached) : static_cast<double>(iterations);
      fin += t.points.back().residual;
    }
    if (!pt.diverged) {
      pt.mean_iterations = its / static_cast<double>(seeds);
      pt.mean_final = fin / static_cast<double>(seeds);
    }
  }

  const GridPoint* best = nullptr;
  for (const GridPoint& pt : result.evaluated) {
    if (pt.diverged) continue;
    if (!best || std::tie(pt.mean_iterations, pt.mean_final, pt.alpha) <
                     std::tie(best->mean_iterations, best->mean_final, best->alpha)) {
      best = &pt;
    }
  }
  if (!best) throw AllDiverged("every grid point diverged for " + base.name);
  result.best = *best;
  return result;
}

nlohmann::ordered_json to_json(const TuneResult& result) {
  auto point = [](const GridPoint& p) {
    nlohmann::ordered_json j;
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["diverged"] = p.diverged;
    if (p.diverged) {
      j["mean_iterations_to_1e-6"] = nullptr;
      j["mean_final_residual"] = nullptr;
    } else {
      j["mean_iterations_to_1e-6"] = p.mean_iterations;
      j["mean_final_residual"] = p.mean_final;
    }
    return j;
  };
  nlohmann::ordered_json doc;
  doc["name"] = result.name;
  doc["best"] = point(result.best);
  auto& all = doc["evaluated"] = nlohmann::ordered_json::array();
  for (const GridPoint& p : result.evaluated) all.push_back(point(p));
  return doc;
}

}  // namespace frsd::tools
