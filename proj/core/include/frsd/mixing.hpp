#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "frsd/digraph.hpp"

namespace frsd {

enum class MixingKind { row, column };

/// Dense stochastic weight matrix compatible with a DiGraph.
///
/// Both kinds share the same support: entry (i, j) is positive exactly when
/// j is i itself or an in-neighbor of i. Row kind has unit row sums, column
/// kind unit column sums (within 1e-12).
class MixingMatrix {
 public:
  /// Validates sign, support and sums; throws GraphError on violation.
  MixingMatrix(MixingKind kind, Eigen::MatrixXd weights, DiGraph graph);

  MixingKind kind() const noexcept { return kind_; }
  const Eigen::MatrixXd& weights() const noexcept { return weights_; }
  const DiGraph& graph() const noexcept { return graph_; }
  std::size_t size() const noexcept { return graph_.node_count(); }
  double operator()(NodeId i, NodeId j) const { return weights_(i, j); }

 private:
  MixingKind kind_;
  Eigen::MatrixXd weights_;
  DiGraph graph_;
};

/// r_ij = 1 / |N_i^in| over the closed in-neighborhood of i.
MixingMatrix build_uniform_row_stochastic(const DiGraph& g);

/// b_ij = 1 / (out-degree(j) + 1) over the closed out-neighborhood of j.
MixingMatrix build_uniform_column_stochastic(const DiGraph& g);

/// Metropolis-Hastings weights for a symmetric graph: a symmetric, doubly
/// stochastic matrix (reported as row kind). Throws GraphError when the graph
/// is not symmetric.
MixingMatrix build_metropolis(const DiGraph& g);

struct StationaryDistribution {
  Eigen::VectorXd pi;
};

/// Left Perron vector of a row-stochastic matrix by power iteration on the
/// transpose map. Stops once successive iterates differ by <= 1e-13 in the
/// max norm; throws NonConvergence after 100 * n * ln(1e13) sweeps.
StationaryDistribution stationary_distribution(const MixingMatrix& m);

/// Dense variant for row-stochastic matrices not tied to a DiGraph (lazy
/// chains, for instance).
StationaryDistribution stationary_distribution(const Eigen::MatrixXd& row_stochastic);

/// rho(R - 1 pi^T), the geometric mixing rate of the consensus chain.
double spectral_gap(const MixingMatrix& m, const StationaryDistribution& pi);

/// Spectral radius of `matrix - 1 pi^T` from the growth of its powers,
/// ||A^k||^(1/k), with k doubled by repeated squaring and each power
/// renormalized. The rank-one deflation removes exactly the unit eigenvalue
/// whenever `matrix` has unit row sums and pi sums to one.
double deflated_spectral_radius(const Eigen::MatrixXd& matrix,
                                const Eigen::VectorXd& pi);

}  // namespace frsd
