#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace frsd {

/// Huber loss with knee at xi: quadratic for |z| <= xi, linear beyond.
double huber_value(double z, double xi);
double huber_grad(double z, double xi);

struct HuberLoss {
  double xi;
};

/// Sum of ln(1 + exp(-b_j <m_j, x>)) plus (lambda/2) ||x||^2.
struct LogisticLoss {
  double lambda;
};

/// (1/2) ||M x - b||^2.
struct QuadraticLoss {};

using LossKind = std::variant<HuberLoss, LogisticLoss, QuadraticLoss>;

/// A node's private cost f_i(x) = loss(M_i x, b_i).
class LocalObjective {
 public:
  /// Throws DimensionMismatch when features and targets disagree, DomainError
  /// for a non-positive Huber knee, a negative lambda, or logistic targets
  /// outside {-1, +1}.
  LocalObjective(LossKind kind, Eigen::MatrixXd features, Eigen::VectorXd targets);

  const LossKind& kind() const noexcept { return kind_; }
  const Eigen::MatrixXd& features() const noexcept { return features_; }
  const Eigen::VectorXd& targets() const noexcept { return targets_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(features_.cols()); }

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;

  /// Lipschitz constant of the gradient: ||M||_2^2 (huber, quadratic) or
  /// ||M||_2^2 / 4 + lambda (logistic).
  double lipschitz() const noexcept { return lipschitz_; }

  /// Strong convexity modulus: lambda (logistic), lambda_min(M^T M)
  /// (quadratic), 0 (huber).
  double strong_convexity() const noexcept { return strong_convexity_; }

 private:
  void check_dimension(const Eigen::VectorXd& x) const;

  LossKind kind_;
  Eigen::MatrixXd features_;
  Eigen::VectorXd targets_;
  double lipschitz_ = 0.0;
  double strong_convexity_ = 0.0;
};

/// The consensus problem: minimize (1/n) sum_i f_i(x).
class ProblemInstance {
 public:
  explicit ProblemInstance(std::vector<LocalObjective> locals);

  std::size_t node_count() const noexcept { return locals_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  const LocalObjective& local(std::size_t i) const { return locals_.at(i); }
  const std::vector<LocalObjective>& locals() const noexcept { return locals_; }

  /// max_i L_i.
  double lipschitz() const noexcept { return lipschitz_; }
  /// min_i mu_i.
  double strong_convexity() const noexcept { return strong_convexity_; }

  /// Averaged objective and gradient (1/n) sum_i f_i(x).
  double mean_value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd mean_grad(const Eigen::VectorXd& x) const;

 private:
  std::vector<LocalObjective> locals_;
  std::size_t dimension_ = 0;
  double lipschitz_ = 0.0;
  double strong_convexity_ = 0.0;
};

/// Synthetic robust-regression instance: per node, standard normal M_i
/// rescaled to unit spectral norm (so L_i = 1) and b_i = M_i x_true + noise
/// with a shared seeded x_true and N(0, 0.1^2) noise.
ProblemInstance synth_huber_problem(std::size_t n, std::size_t m_per_node,
                                    std::size_t p, double xi, std::uint64_t seed);

/// Quadratic instance with standard normal M_i and b_i; deterministic in seed.
ProblemInstance synth_quadratic_problem(std::size_t n, std::size_t m_per_node,
                                        std::size_t p, std::uint64_t seed);

// ---------------------------------------------------------------------------
// LIBSVM data

struct SparseRow {
  std::vector<std::pair<std::size_t, double>> features;  // 1-based index, value
  int label;                                              // -1 or +1
};

struct Dataset {
  std::vector<SparseRow> rows;
  std::size_t max_index = 0;
};

/// Parses `<label> <idx>:<val> ...` lines with strictly increasing indices.
/// Labels 0/1 map to -1/+1. Blank lines are skipped.
/// Throws ParseError or LabelError carrying the 1-based line number.
Dataset parse_libsvm(const std::string& text);
Dataset read_libsvm_file(const std::string& path);

/// Each node draws m_per_node rows uniformly with replacement; M_i is dense
/// m_per_node x p with feature k in column k-1 and a final all-ones
/// intercept column. Throws DimensionError unless p >= max_index + 1.
ProblemInstance partition_dataset(const Dataset& ds, std::size_t n,
                                  std::size_t m_per_node, std::size_t p,
                                  double lambda, std::uint64_t seed);

/// Linearly separable-ish binary data for tests and demos: features uniform
/// in [-1, 1], label = sign(<w, a> + 0.1 * noise) for a seeded w.
Dataset synth_logistic_dataset(std::size_t rows, std::size_t features,
                               std::uint64_t seed);

}  // namespace frsd
