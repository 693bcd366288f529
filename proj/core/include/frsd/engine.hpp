#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "frsd/digraph.hpp"
#include "frsd/mixing.hpp"
#include "frsd/objectives.hpp"
#include "frsd/protocols.hpp"

namespace frsd {

// ---------------------------------------------------------------------------
// Centralized oracle

struct OracleSolution {
  Eigen::VectorXd x_star;
  double grad_norm = 0.0;  // ||(1/n) sum_i grad f_i(x_star)||
  std::size_t iterations = 0;
};

/// Gradient descent on the averaged objective from 0 with backtracking
/// (halving, Armijo constant 1e-4) until the gradient norm is <= tol or
/// 10^6 iterations. Throws OracleDidNotConverge.
OracleSolution solve_centralized(const ProblemInstance& problem, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Simulation

/// Read-only view handed to the per-round observer after every iteration
/// (and once before the first, with round == 0).
struct RoundView {
  std::size_t round = 0;
  std::span<const NodeState> states;
};

struct SimulationConfig {
  Algorithm algorithm = Algorithm::frsd;
  ProtocolOptions options;
  DiGraph graph{1, {}};
  std::optional<ProblemInstance> problem;
  HyperParams hp;
  std::size_t max_iterations = 5000;
  std::size_t cadence = 1;  // record every `cadence` iterations (and the last)
  std::uint64_t seed = 0;   // recorded only; instances are built by the caller
  double oracle_tol = 1e-12;
  std::size_t threads = 1;

  /// Shared starting point; 0_p when absent.
  std::optional<Eigen::VectorXd> x0;
  /// Minimizer; solved with solve_centralized(oracle_tol) when absent.
  std::optional<Eigen::VectorXd> x_star;
  /// Mixing weights. Kinds the algorithm needs but that are absent get
  /// uniform weights on `graph` unless `auto_weights` is false, in which case
  /// the first step raises MissingWeights.
  std::optional<MixingMatrix> row_weights;
  std::optional<MixingMatrix> column_weights;
  bool auto_weights = true;

  /// Stop early once the recorded residual falls to or below this value.
  double stop_below = 0.0;
  /// Stop early once the residual exceeds this value or turns non-finite.
  double divergence_threshold = 1e3;

  std::function<void(const RoundView&)> observer;
};

struct TracePoint {
  std::size_t k = 0;
  double residual = 0.0;
  double consensus_violation = 0.0;
  double grad_norm = 0.0;  // ||(1/n) sum_i grad f_i(x_i(k))||
  std::uint64_t cum_broadcast = 0;  // scalars broadcast per node so far
  double wall_seconds = 0.0;
};

struct Trace {
  Algorithm algorithm = Algorithm::frsd;
  std::size_t nodes = 0;
  std::size_t dimension = 0;
  std::size_t comm_size = 0;
  bool diverged = false;
  std::vector<TracePoint> points;
  /// Decision variables after the last iteration, one row per node.
  Eigen::MatrixXd final_iterates;
};

/// Synchronous round-based simulator. Each phase every node reads the
/// snapshot of its closed in-neighborhood's last broadcasts; no node sees a
/// value produced in the same phase, so the update order is irrelevant.
class Simulator {
 public:
  /// Validates the configuration (strong connectivity, iteration and cadence
  /// bounds, dimensions) and initializes every node. Throws GraphError,
  /// DimensionMismatch or DomainError.
  explicit Simulator(SimulationConfig config);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// One iteration (all phases). Step errors are rethrown as StepError with
  /// the round and the lowest failing node.
  void advance();

  std::size_t round() const noexcept { return round_; }
  std::span<const NodeState> states() const noexcept { return states_; }
  const Protocol& protocol() const noexcept { return *protocol_; }
  const SimulationConfig& config() const noexcept { return config_; }

  /// Stacked decision variables, row i = node i.
  Eigen::MatrixXd decisions() const;

 private:
  struct Pool;

  void run_phase(std::size_t phase);

  SimulationConfig config_;
  std::unique_ptr<Protocol> protocol_;
  std::vector<NodeState> states_;
  std::vector<Broadcast> outbox_;
  std::vector<std::vector<NodeId>> neighborhoods_;  // closed, sorted
  std::size_t round_ = 0;
  std::unique_ptr<Pool> pool_;
};

/// Runs config.max_iterations iterations (or until an early stop) and
/// records metrics at the configured cadence.
Trace run(const SimulationConfig& config);

// ---------------------------------------------------------------------------
// Metrics

/// ||X - X*|| / ||X0 - X*|| over stacked iterates (Frobenius norm). Throws
/// DegenerateStart when the denominator is below 1e-300.
double residual(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_star,
                const Eigen::MatrixXd& x0);

/// Largest ||x_i - x_j|| over directed edges; 0 without edges.
double consensus_violation(const Eigen::MatrixXd& x, const DiGraph& g);

struct RateFit {
  double slope = 0.0;  // per iteration, in ln r
  double r_squared = 0.0;
};

/// Least squares of ln r(k) on k over the last `tail_fraction` of the trace,
/// dropping residuals below 1e-13. Throws InsufficientData with fewer than
/// 10 usable points.
RateFit fit_linear_rate(const Trace& trace, double tail_fraction = 0.5);

/// First recorded iteration with residual <= threshold.
std::optional<std::size_t> iterations_to(const Trace& trace, double threshold);

// ---------------------------------------------------------------------------
// CSV

/// Header `k,residual,consensus_violation,grad_norm,cum_broadcast_scalars`,
/// 17 significant digits.
void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_csv_file(const std::string& path, const Trace& trace);
/// Reads the points back; throws ParseError.
std::vector<TracePoint> read_trace_csv(std::istream& in);

}  // namespace frsd
