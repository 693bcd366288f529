#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "experiment.hpp"

namespace frsd::tools {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

json minimal() {
  return json::parse(R"({
    "problem": {"kind": "huber", "m_per_node": 6, "dimension": 3},
    "graph": {"kind": "random", "nodes": 6, "phi": 0.4},
    "algorithms": [{"algorithm": "frsd", "alpha": 0.02}],
    "seeds": [1]
  })");
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("frsd_experiment_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string schema_path(const json& doc) {
  try {
    parse_config(doc);
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<none>";
}

TEST(ParseConfig, MinimalAppliesDefaults) {
  json doc = minimal();
  doc["problem"]["kind"] = "logistic";
  const ExperimentSuite s = parse_config(doc);
  EXPECT_EQ(s.iterations, 5000u);
  EXPECT_EQ(s.cadence, 1u);
  EXPECT_EQ(s.oracle_tol, 1e-12);
  EXPECT_EQ(s.problem.lambda, 0.01);
  ASSERT_EQ(s.methods.size(), 1u);
  EXPECT_EQ(s.methods[0].name, "frsd");
  EXPECT_DOUBLE_EQ(s.methods[0].hp.alpha * s.methods[0].hp.beta, 0.05);
  EXPECT_FALSE(s.tuning.has_value());
}

TEST(ParseConfig, UnknownAlgorithm) {
  json doc = minimal();
  doc["algorithms"][0]["algorithm"] = "gossip-x";
  EXPECT_THROW(parse_config(doc), UnknownAlgorithm);
}

TEST(ParseConfig, ReportsOffendingField) {
  json doc = minimal();
  doc["seeds"] = json::array();
  EXPECT_EQ(schema_path(doc), "/seeds");

  doc = minimal();
  doc["algorithms"][0]["alpha"] = "big";
  EXPECT_EQ(schema_path(doc), "/algorithms/0/alpha");

  doc = minimal();
  doc["algorithms"].push_back({{"algorithm", "frsd"}, {"alpha", 0.1}});
  EXPECT_EQ(schema_path(doc), "/algorithms/1/name");

  doc = minimal();
  doc.erase("problem");
  EXPECT_EQ(schema_path(doc), "/problem");

  doc = minimal();
  doc["graph"]["phi"] = 1.5;
  EXPECT_EQ(schema_path(doc), "/graph/phi");

  doc = minimal();
  doc["tuning"] = {{"alphas", json::array()}};
  EXPECT_EQ(schema_path(doc), "/tuning/alphas");
}

TEST(RunSuite, WritesTracesAndConsistentSummary) {
  json doc = minimal();
  doc["algorithms"].push_back({{"algorithm", "xi-row"}, {"alpha", 0.02}});
  doc["seeds"] = {1, 2, 3};
  doc["iterations"] = 300;
  const fs::path dir = scratch("summary");
  doc["output_dir"] = dir.string();
  const ExperimentSuite suite = parse_config(doc);
  const SuiteSummary summary = run_suite(suite, 2);

  ASSERT_EQ(summary.runs.size(), 6u);
  for (const RunSummary& r : summary.runs) {
    const fs::path csv = dir / (r.name + "_" + std::to_string(r.seed) + ".csv");
    ASSERT_TRUE(fs::exists(csv)) << csv;
    std::ifstream in(csv);
    EXPECT_EQ(read_trace_csv(in).size(), 301u);
    for (std::size_t t = 0; t + 1 < std::size(kThresholds); ++t) {
      if (r.iterations_to[t + 1]) {
        ASSERT_TRUE(r.iterations_to[t]);
        EXPECT_LE(*r.iterations_to[t], *r.iterations_to[t + 1]);
      }
    }
  }
  ASSERT_EQ(summary.curves.size(), 2u);
  for (const CurveSummary& c : summary.curves) {
    ASSERT_EQ(c.k.size(), 301u);
    for (std::size_t i = 0; i < c.k.size(); ++i) {
      EXPECT_LE(c.min[i], c.mean[i]);
      EXPECT_LE(c.mean[i], c.max[i]);
    }
  }
  const json written = json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(written["runs"].size(), 6u);
  EXPECT_TRUE(written["curves"].contains("xi-row"));
}

TEST(RunSuite, RerunIsByteIdentical) {
  json doc = minimal();
  doc["seeds"] = {4, 5};
  doc["iterations"] = 120;
  doc["cadence"] = 7;
  const fs::path a = scratch("rerun_a");
  const fs::path b = scratch("rerun_b");
  doc["output_dir"] = a.string();
  run_suite(parse_config(doc), 1);
  doc["output_dir"] = b.string();
  run_suite(parse_config(doc), 2);
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
  }
}

TEST(TuneGrid, SinglePointIsReturned) {
  json doc = minimal();
  doc["iterations"] = 200;
  const ExperimentSuite suite = parse_config(doc);
  const TuneResult r = tune_grid(suite, "frsd", {0.02}, {}, 0);
  EXPECT_EQ(r.best.alpha, 0.02);
  EXPECT_DOUBLE_EQ(r.best.beta, 2.5);
  EXPECT_EQ(r.evaluated.size(), 1u);
}

TEST(TuneGrid, DivergingStepIsExcluded) {
  json doc = minimal();
  doc["problem"]["kind"] = "quadratic";
  doc["graph"] = {{"kind", "complete"}, {"nodes", 1}};
  doc["algorithms"][0] = {{"algorithm", "ab"}, {"alpha", 0.1}};
  doc["iterations"] = 400;
  const ExperimentSuite suite = parse_config(doc);
  const double lipschitz = build_problem(suite.problem, 1, 1).lipschitz();
  const TuneResult r = tune_grid(suite, "ab", {0.5 / lipschitz, 2.5 / lipschitz}, {}, 0);
  EXPECT_FALSE(r.evaluated[0].diverged);
  EXPECT_TRUE(r.evaluated[1].diverged);
  EXPECT_DOUBLE_EQ(r.best.alpha, 0.5 / lipschitz);
  EXPECT_THROW(tune_grid(suite, "ab", {2.5 / lipschitz}, {}, 0), AllDiverged);
}

TEST(TuneGrid, Reproducible) {
  json doc = minimal();
  doc["graph"]["nodes"] = 10;
  doc["problem"]["dimension"] = 2;
  doc["seeds"] = {1, 2};
  doc["iterations"] = 1500;
  const ExperimentSuite suite = parse_config(doc);
  const std::vector<double> alphas{0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
  const TuneResult a = tune_grid(suite, "frsd", alphas, {}, 0, 1);
  const TuneResult b = tune_grid(suite, "frsd", alphas, {}, 0, 3);
  EXPECT_EQ(a.best.alpha, b.best.alpha);
  EXPECT_EQ(a.best.mean_iterations, b.best.mean_iterations);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(TuneGrid, UnknownMethod) {
  const ExperimentSuite suite = parse_config(minimal());
  EXPECT_THROW(tune_grid(suite, "push-pull", {0.1}, {}, 0), UnknownAlgorithm);
  EXPECT_THROW(tune_grid(suite, "frsd", {}, {}, 0), SchemaError);
}

}  // namespace
}  // namespace frsd::tools
