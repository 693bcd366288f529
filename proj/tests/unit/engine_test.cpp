#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dense_oracles.hpp"
#include "frsd/engine.hpp"
#include "frsd/error.hpp"
#include "frsd/mixing.hpp"

namespace frsd {
namespace {

ProblemInstance identical_quadratics(std::size_t n, const std::vector<Eigen::VectorXd>& b) {
  std::vector<LocalObjective> locals;
  for (std::size_t i = 0; i < n; ++i) {
    locals.emplace_back(QuadraticLoss{}, Eigen::MatrixXd::Identity(b[i].size(), b[i].size()), b[i]);
  }
  return ProblemInstance(std::move(locals));
}

SimulationConfig quadratic_config(Algorithm a, std::size_t n, std::uint64_t seed) {
  SimulationConfig c;
  c.algorithm = a;
  c.graph = n == 1 ? DiGraph(1, {}) : generate_strongly_connected(n, 0.3, seed);
  c.problem = synth_quadratic_problem(n, 6, 3, seed);
  const double alpha = 0.2 / c.problem->lipschitz();
  const bool frsd_family = a == Algorithm::frsd || a == Algorithm::frsd_cs;
  c.hp = {alpha, frsd_family ? 0.05 / alpha : 0.2};
  c.max_iterations = 200;
  return c;
}

TEST(Oracle, IdenticalTargets) {
  Eigen::VectorXd b(3);
  b << 1.0, -2.0, 0.5;
  const OracleSolution sol = solve_centralized(identical_quadratics(4, {b, b, b, b}));
  EXPECT_LE((sol.x_star - b).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(sol.grad_norm, 1e-12);
}

TEST(Oracle, MeanOfTargets) {
  std::vector<Eigen::VectorXd> bs;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < 5; ++i) {
    bs.push_back(Eigen::Vector2d(i, 2.0 * i - 3.0));
    mean += bs.back() / 5.0;
  }
  EXPECT_LE((solve_centralized(identical_quadratics(5, bs)).x_star - mean).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(Oracle, SeparableLogisticPoint) {
  Eigen::MatrixXd m(1, 2);
  m << 1.0, 2.0;
  const ProblemInstance prob({LocalObjective(LogisticLoss{0.01}, m, Eigen::VectorXd::Ones(1))});
  EXPECT_LE(solve_centralized(prob).grad_norm, 1e-12);
}

TEST(Oracle, ReportsFailureWithBestIterate) {
  const ProblemInstance prob = synth_quadratic_problem(2, 5, 3, 1);
  EXPECT_THROW(solve_centralized(prob, 1e-300), OracleDidNotConverge);
}

TEST(Residual, Basics) {
  const Eigen::MatrixXd x0 = Eigen::MatrixXd::Ones(3, 2);
  const Eigen::MatrixXd xs = Eigen::MatrixXd::Zero(3, 2);
  EXPECT_DOUBLE_EQ(residual(x0, xs, x0), 1.0);
  EXPECT_DOUBLE_EQ(residual(xs, xs, x0), 0.0);
  EXPECT_DOUBLE_EQ(residual(0.5 * (x0 + xs), xs, x0), 0.5);
  EXPECT_THROW(residual(x0, xs, xs), DegenerateStart);
}

TEST(ConsensusViolation, Basics) {
  EXPECT_EQ(consensus_violation(Eigen::MatrixXd::Ones(3, 2), directed_cycle(3)), 0.0);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 2);
  x(1, 0) = 1.0;
  EXPECT_DOUBLE_EQ(consensus_violation(x, complete_digraph(2)), 1.0);
  EXPECT_EQ(consensus_violation(Eigen::MatrixXd::Ones(1, 2), DiGraph(1, {})), 0.0);
}

TEST(RateFit, ExactGeometric) {
  Trace t;
  for (std::size_t k = 0; k <= 100; ++k) t.points.push_back({.k = k, .residual = std::pow(0.9, k)});
  const RateFit fit = fit_linear_rate(t);
  EXPECT_NEAR(fit.slope, std::log(0.9), 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
}

TEST(RateFit, ConstantResidual) {
  Trace t;
  for (std::size_t k = 0; k < 40; ++k) t.points.push_back({.k = k, .residual = 0.3});
  const RateFit fit = fit_linear_rate(t);
  EXPECT_EQ(fit.slope, 0.0);
  EXPECT_EQ(fit.r_squared, 1.0);
}

TEST(RateFit, NeedsTenPoints) {
  Trace t;
  for (std::size_t k = 0; k < 12; ++k) t.points.push_back({.k = k, .residual = 0.5});
  EXPECT_THROW(fit_linear_rate(t), InsufficientData);
}

TEST(Run, SingleNodeScalarDecay) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(1, 1);
  SimulationConfig c;
  c.graph = DiGraph(1, {});
  c.problem = ProblemInstance({LocalObjective(QuadraticLoss{}, m, Eigen::VectorXd::Zero(1))});
  c.hp = {0.1, 1.0};
  c.x0 = Eigen::VectorXd::Ones(1);
  c.max_iterations = 10;
  const Trace t = run(c);
  ASSERT_EQ(t.points.size(), 11u);
  for (const TracePoint& pt : t.points) {
    EXPECT_NEAR(pt.residual, std::pow(0.9, static_cast<double>(pt.k)), 1e-15);
    EXPECT_EQ(pt.cum_broadcast, pt.k * 2);
  }
}

TEST(Run, BroadcastCounterEveryAlgorithm) {
  for (Algorithm a : all_algorithms()) {
    SimulationConfig c = quadratic_config(a, 6, 3);
    c.max_iterations = 7;
    const Trace t = run(c);
    ASSERT_EQ(t.points.size(), 8u);
    for (const TracePoint& pt : t.points) EXPECT_EQ(pt.cum_broadcast, pt.k * comm_size(a, 6, 3));
  }
}

TEST(Run, CadenceKeepsLastPoint) {
  SimulationConfig c = quadratic_config(Algorithm::frsd, 5, 2);
  c.max_iterations = 23;
  c.cadence = 5;
  const Trace t = run(c);
  std::vector<std::size_t> ks;
  for (const auto& pt : t.points) ks.push_back(pt.k);
  EXPECT_EQ(ks, (std::vector<std::size_t>{0, 5, 10, 15, 20, 23}));
}

TEST(Run, Deterministic) {
  const SimulationConfig c = quadratic_config(Algorithm::xi_row, 8, 4);
  const Trace a = run(c);
  const Trace b = run(c);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].residual, b.points[i].residual);
    EXPECT_EQ(a.points[i].consensus_violation, b.points[i].consensus_violation);
    EXPECT_EQ(a.points[i].grad_norm, b.points[i].grad_norm);
  }
}

TEST(Run, ThreadCountDoesNotChangeIterates) {
  for (Algorithm a : {Algorithm::frsd, Algorithm::push_pull, Algorithm::push_diging}) {
    SimulationConfig c = quadratic_config(a, 9, 6);
    const Trace serial = run(c);
    c.threads = 4;
    const Trace parallel = run(c);
    EXPECT_EQ(serial.final_iterates, parallel.final_iterates);
  }
}

TEST(Run, MatchesDenseOracleOnRandomGraph) {
  SimulationConfig c = quadratic_config(Algorithm::frsd, 5, 8);
  c.x0 = Eigen::VectorXd::Constant(3, 0.2);
  std::vector<Eigen::MatrixXd> got;
  c.observer = [&](const RoundView&) {};
  Simulator sim(c);
  got.push_back(sim.decisions());
  for (int k = 0; k < 100; ++k) {
    sim.advance();
    got.push_back(sim.decisions());
  }
  const auto want = testing::dense_iterates(
      Algorithm::frsd, build_uniform_row_stochastic(c.graph).weights(),
      build_uniform_column_stochastic(c.graph).weights(), *c.problem, c.hp, *c.x0, 100);
  EXPECT_LE(testing::max_relative_deviation(got, want), 1e-10);
}

TEST(Run, StepErrorsCarryRoundAndNode) {
  SimulationConfig c = quadratic_config(Algorithm::frsd, 4, 1);
  c.hp = {0.5, 4.0};  // alpha * beta >= 1
  try {
    run(c);
    FAIL();
  } catch (const StepError& e) {
    EXPECT_EQ(e.round(), 0u);
    EXPECT_EQ(e.node(), 0u);
  }
}

TEST(Run, RejectsDisconnectedGraph) {
  SimulationConfig c = quadratic_config(Algorithm::frsd, 4, 1);
  c.graph = DiGraph(4, {{0, 1}, {1, 2}, {2, 3}});
  EXPECT_THROW(run(c), GraphError);
}

TEST(Run, DivergenceStopsEarly) {
  SimulationConfig c = quadratic_config(Algorithm::ab, 1, 1);
  c.hp = {3.0 / c.problem->lipschitz(), 0.0};
  c.max_iterations = 1000;
  const Trace t = run(c);
  EXPECT_TRUE(t.diverged);
  EXPECT_LT(t.points.back().k, 1000u);
}

TEST(TraceCsv, RoundTrip) {
  const Trace t = run(quadratic_config(Algorithm::frsd, 5, 3));
  std::stringstream ss;
  write_trace_csv(ss, t);
  const std::string first_line = ss.str().substr(0, ss.str().find('\n'));
  EXPECT_EQ(first_line, "k,residual,consensus_violation,grad_norm,cum_broadcast_scalars");
  const auto back = read_trace_csv(ss);
  ASSERT_EQ(back.size(), t.points.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].k, t.points[i].k);
    EXPECT_EQ(back[i].residual, t.points[i].residual);
    EXPECT_EQ(back[i].consensus_violation, t.points[i].consensus_violation);
    EXPECT_EQ(back[i].grad_norm, t.points[i].grad_norm);
    EXPECT_EQ(back[i].cum_broadcast, t.points[i].cum_broadcast);
  }
}

TEST(TraceCsv, RejectsBadRows) {
  std::istringstream bad("k,residual,consensus_violation,grad_norm,cum_broadcast_scalars\n1,2,3\n");
  EXPECT_THROW(read_trace_csv(bad), ParseError);
}

}  // namespace
}  // namespace frsd
