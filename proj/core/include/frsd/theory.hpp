#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frsd/digraph.hpp"
#include "frsd/mixing.hpp"
#include "frsd/objectives.hpp"

namespace frsd {

/// (1 - c) I + c R for c in [0, 1]. Same stationary distribution as R.
/// Throws DomainError for c outside [0, 1].
Eigen::MatrixXd lazy_chain(const Eigen::MatrixXd& r, double c);

/// max{|1 - n L alpha|, |1 - n mu alpha|}. Throws DomainError unless
/// 0 < alpha < 2 / (n L) and L >= mu > 0.
double eta(double alpha, std::size_t n, double lipschitz, double mu);

struct DecayCheck {
  bool passed = false;
  /// exp of the least-squares slope of log d_k over the second half.
  double ratio = 0.0;
  /// rho(R - 1 pi^T) used for the envelope.
  double rho = 0.0;
  /// d_k = ||R^k - 1 pi^T||_2, k = 0, 1, ... until it drops below 1e-13 or k = K.
  std::vector<double> distances;
};

/// Checks that ||R^k - 1 pi^T||_2 is eventually dominated by c (rho + 0.02)^k
/// with c fitted on the first five terms. "Eventually" is the last quarter of
/// the sequence.
DecayCheck power_decay_check(const Eigen::MatrixXd& r, const Eigen::VectorXd& pi,
                             std::size_t max_power = 5000);

enum class XOnlyForm {
  /// x(k+2) = ((1 + ab) R + (1 - ab) I) x(k+1) - R x(k) - alpha (g(k+1) - g(k))
  direct,
  /// x(k+2) = 2 R x(k+1) - R^2 x(k) + Delta_c(k) - alpha (g(k+1) - g(k)) with
  /// c = alpha beta and Delta_c(k) = (1 - c)(I - R) x(k+1) - R (I - R) x(k)
  delta_c,
};

/// Dense two-step FRSD recursion in x only, with g(k) the gradient stack
/// scaled row-wise by diag(R^k)^{-1}. x(1) comes from the one-step update
/// with y(0) = 0. Returns x(0), ..., x(K) as n x p matrices.
std::vector<Eigen::MatrixXd> frsd_x_only_oracle(const Eigen::MatrixXd& r,
                                                const ProblemInstance& problem, double alpha,
                                                double beta, const Eigen::MatrixXd& x0,
                                                std::size_t rounds,
                                                XOnlyForm form = XOnlyForm::direct);

struct PrimalDualComparison {
  std::vector<Eigen::MatrixXd> frsd;         // FRSD iterates with R = W, unscaled gradients
  std::vector<Eigen::MatrixXd> primal_dual;  // primal iterates of the saddle-point method
  std::vector<Eigen::MatrixXd> duals;        // its dual iterates y(k)
  double max_deviation = 0.0;  // max_k ||frsd(k) - primal_dual(k)||_max / max(1, ||frsd(k)||_max)
};

/// Runs the primal-dual method with approximate averaging,
///   y(k) = y(k-1) + beta (I - W) x(k)               (y(0) = 0)
///   x(k+1) = x(k) - alpha (grad f(x(k)) + y(k) + theta beta (I - W) x(k))
/// with theta = 1 / (alpha beta), next to the FRSD protocol driven by the
/// simulator with R = W and debiasing disabled. Throws NotDoublyStochastic
/// unless W is symmetric with unit row sums (1e-12).
PrimalDualComparison primal_dual_equivalence_oracle(const MixingMatrix& w,
                                                    const ProblemInstance& problem,
                                                    double alpha, double beta,
                                                    const Eigen::VectorXd& x0,
                                                    std::size_t rounds);

struct TheoryReport {
  double sigma_r = 0.0;  // rho(R - 1 pi^T)
  double sigma_c = 0.0;  // rho(C - 1 pi^T), C the lazy chain with c = alpha beta
  std::optional<double> eta;  // absent when alpha is outside (0, 2 / (n L))
  double alpha_ceiling = 0.0;  // 1 / (n L)
  bool decay_ok = false;
  double decay_ratio = 0.0;
};

/// Spectral summary for uniform row weights on `g`. Throws DomainError unless
/// 0 < alpha beta < 1, and GraphError for graphs that are not strongly
/// connected.
TheoryReport analyze(const DiGraph& g, double alpha, double beta, double lipschitz, double mu);

/// Pretty-printed JSON object with every field of the report (eta is null
/// when absent).
std::string to_json(const TheoryReport& report);

}  // namespace frsd
