#include <cmath>

#include "frsd/engine.hpp"
#include "frsd/error.hpp"

namespace frsd {

namespace {
constexpr std::size_t kMaxIterations = 1'000'000;
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-300;
constexpr double kApproximateSlack = 1e-6;
constexpr double kReliableDecrease = 1e-8;
}  // namespace

OracleSolution solve_centralized(const ProblemInstance& problem, double tol) {
  if (!(tol > 0.0)) throw DomainError("oracle tolerance must be positive");
  const auto p = static_cast<Eigen::Index>(problem.dimension());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
  double fx = problem.mean_value(x);
  Eigen::VectorXd g = problem.mean_grad(x);
  double gnorm = g.norm();

  Eigen::VectorXd best = x;
  double best_norm = gnorm;
  const double lipschitz = problem.lipschitz();
  double t = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;

  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    if (gnorm <= tol) return {x, gnorm, it};
    const double tolerance = kApproximateSlack * std::abs(fx);
    const double slope = -g.squaredNorm();  // derivative along -g at t = 0
    t *= 2.0;
    Eigen::VectorXd candidate;
    double fc = 0.0;
    Eigen::VectorXd gc;
    for (;;) {
      candidate = x - t * g;
      fc = problem.mean_value(candidate);
      // Once the expected decrease drowns in rounding of f, use the
      // derivative form of the same test (exact for quadratics), guarded by
      // a relative slack on f.
      if (t * -slope > kReliableDecrease * std::abs(fx)) {
        if (fc <= fx + kArmijo * t * slope) break;
      } else if (fc <= fx + tolerance) {
        gc = problem.mean_grad(candidate);
        if (-gc.dot(g) <= (2.0 * kArmijo - 1.0) * slope) break;
        gc.resize(0);
      }
      t *= 0.5;
      if (t < kMinStep) throw OracleDidNotConverge(best, best_norm);
    }
    x = std::move(candidate);
    fx = fc;
    g = gc.size() > 0 ? std::move(gc) : problem.mean_grad(x);
    gnorm = g.norm();
    if (gnorm < best_norm) {
      best = x;
      best_norm = gnorm;
    }
  }
  if (gnorm <= tol) return {x, gnorm, kMaxIterations};
  throw OracleDidNotConverge(best, best_norm);
}

}  // namespace frsd
