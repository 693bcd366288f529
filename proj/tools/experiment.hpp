#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "frsd/engine.hpp"
#include "frsd/error.hpp"

namespace frsd::tools {

/// Invalid configuration; `path()` is the JSON pointer of the offending field.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Every grid point of a tuning run diverged.
class AllDiverged : public Error {
 public:
  using Error::Error;
};

/// A run failed; the message names the run and seed.
class RunFailed : public Error {
 public:
  using Error::Error;
};

enum class ProblemKind { huber, logistic, quadratic };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::quadratic;
  std::size_t m_per_node = 10;
  std::size_t dimension = 5;
  double xi = 2.0;        // huber
  double lambda = 0.01;   // logistic
  std::string dataset;    // logistic: LIBSVM path; synthetic data when empty
  std::size_t rows = 690;  // synthetic logistic rows
};

enum class GraphKind { random, cycle, cycle_chords, complete, file };

struct GraphSpec {
  GraphKind kind = GraphKind::random;
  std::size_t nodes = 10;
  double phi = 0.1;
  std::size_t stride = 2;  // cycle_chords
  std::string path;        // file
};

struct MethodSpec {
  std::string name;  // unique label, defaults to the algorithm name
  Algorithm algorithm = Algorithm::frsd;
  HyperParams hp;
  ProtocolOptions options;
};

struct TuningSpec {
  std::vector<double> alphas;
  std::vector<double> betas;  // empty: 0.05 / alpha for FRSD, 0 otherwise
  std::size_t budget = 0;     // 0: the suite's iteration count
};

struct ExperimentSuite {
  ProblemSpec problem;
  GraphSpec graph;
  std::vector<MethodSpec> methods;
  std::vector<std::uint64_t> seeds;
  std::size_t iterations = 5000;
  std::size_t cadence = 1;
  double oracle_tol = 1e-12;
  std::filesystem::path output_dir = "out";
  std::optional<TuningSpec> tuning;
};

/// Validates a JSON document against the suite schema and applies defaults.
/// Throws SchemaError or UnknownAlgorithm.
ExperimentSuite parse_config(const nlohmann::json& doc);
/// Reads and parses a config file; unreadable or malformed JSON is a
/// SchemaError at path "".
ExperimentSuite parse_config_file(const std::filesystem::path& path);

/// Deterministic instances for one seed.
DiGraph build_graph(const GraphSpec& spec, std::uint64_t seed);
ProblemInstance build_problem(const ProblemSpec& spec, std::size_t nodes, std::uint64_t seed);

inline constexpr double kThresholds[] = {1e-3, 1e-6, 1e-9};

struct RunSummary {
  std::string name;
  Algorithm algorithm = Algorithm::frsd;
  std::uint64_t seed = 0;
  double final_residual = 0.0;
  bool diverged = false;
  std::optional<std::size_t> iterations_to[3];
  std::optional<std::uint64_t> broadcast_to[3];
  std::optional<RateFit> rate;
};

/// Range statistics of r(k) across seeds for one method, on the iterations
/// recorded by every seed.
struct CurveSummary {
  std::string name;
  std::vector<std::size_t> k;
  std::vector<double> min, mean, max;
};

struct SuiteSummary {
  std::vector<RunSummary> runs;
  std::vector<CurveSummary> curves;
};

nlohmann::ordered_json to_json(const SuiteSummary& summary);

/// Runs every (method, seed) pair, `slots` at a time, writing
/// `<name>_<seed>.csv` per run and `summary.json` into the output directory.
SuiteSummary run_suite(const ExperimentSuite& suite, std::size_t slots = 1);

struct GridPoint {
  double alpha = 0.0;
  double beta = 0.0;
  bool diverged = false;
  double mean_iterations = 0.0;  // to 1e-6; unreached runs count as the budget
  double mean_final = 0.0;
};

struct TuneResult {
  std::string name;
  GridPoint best;
  std::vector<GridPoint> evaluated;
};

/// Exhaustive grid search for one method over the suite's seeds, ranked by
/// mean iterations to 1e-6, then final residual, then alpha. Diverged points
/// are dropped. Throws AllDiverged or SchemaError for an empty grid.
TuneResult tune_grid(const ExperimentSuite& suite, const std::string& method,
                     const std::vector<double>& alphas, const std::vector<double>& betas,
                     std::size_t budget, std::size_t slots = 1);

nlohmann::ordered_json to_json(const TuneResult& result);

}  // namespace frsd::tools
