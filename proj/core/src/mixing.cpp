#include "frsd/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "frsd/error.hpp"

namespace frsd {

namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kStepTolerance = 1e-13;

std::size_t iteration_cap(std::size_t n) {
  return static_cast<std::size_t>(
      std::ceil(100.0 * static_cast<double>(n) * std::log(1.0 / kStepTolerance)));
}

bool in_support(const DiGraph& g, NodeId i, NodeId j) {
  return i == j || g.has_edge(j, i);
}

}  // namespace

MixingMatrix::MixingMatrix(MixingKind kind, Eigen::MatrixXd weights, DiGraph graph)
    : kind_(kind), weights_(std::move(weights)), graph_(std::move(graph)) {
  const auto n = static_cast<Eigen::Index>(graph_.node_count());
  if (weights_.rows() != n || weights_.cols() != n) {
    throw GraphError("weight matrix shape does not match the graph");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      const bool support = in_support(graph_, static_cast<NodeId>(i), static_cast<NodeId>(j));
      if (!std::isfinite(w) || w < 0.0 || (w > 0.0) != support) {
        throw GraphError("weight (" + std::to_string(i) + ", " + std::to_string(j) +
                         ") violates the closed-neighborhood support");
      }
    }
  }
  const Eigen::VectorXd sums = kind_ == MixingKind::row
                                   ? Eigen::VectorXd(weights_.rowwise().sum())
                                   : Eigen::VectorXd(weights_.colwise().sum().transpose());
  if ((sums.array() - 1.0).abs().maxCoeff() > kSumTolerance) {
    throw GraphError(kind_ == MixingKind::row ? "rows must sum to one"
                                              : "columns must sum to one");
  }
}

MixingMatrix build_uniform_row_stochastic(const DiGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto in = g.in_neighbors(static_cast<NodeId>(i));
    const double w = 1.0 / static_cast<double>(in.size() + 1);
    r(i, i) = w;
    for (NodeId j : in) r(i, static_cast<Eigen::Index>(j)) = w;
  }
  return MixingMatrix(MixingKind::row, std::move(r), g);
}

MixingMatrix build_uniform_column_stochastic(const DiGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto out = g.out_neighbors(static_cast<NodeId>(j));
    const double w = 1.0 / static_cast<double>(out.size() + 1);
    b(j, j) = w;
    for (NodeId i : out) b(static_cast<Eigen::Index>(i), j) = w;
  }
  return MixingMatrix(MixingKind::column, std::move(b), g);
}

MixingMatrix build_metropolis(const DiGraph& g) {
  if (!is_symmetric(g)) throw GraphError("Metropolis weights need a symmetric graph");
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const auto di = g.in_neighbors(e.to).size();
    const auto dj = g.in_neighbors(e.from).size();
    w(static_cast<Eigen::Index>(e.to), static_cast<Eigen::Index>(e.from)) =
        1.0 / static_cast<double>(1 + std::max(di, dj));
  }
  for (Eigen::Index i = 0; i < n; ++i) w(i, i) = 1.0 - w.row(i).sum();
  return MixingMatrix(MixingKind::row, std::move(w), g);
}

StationaryDistribution stationary_distribution(const MixingMatrix& m) {
  if (m.kind() != MixingKind::row) {
    throw GraphError("stationary distribution needs a row-stochastic matrix");
  }
  const DiGraph& g = m.graph();
  const std::size_t n = g.node_count();
  // Sparse transpose sweep over closed in-neighborhoods.
  std::vector<std::vector<std::pair<NodeId, double>>> support(n);
  for (NodeId i = 0; i < n; ++i) {
    support[i].emplace_back(i, m(i, i));
    for (NodeId j : g.in_neighbors(i)) support[i].emplace_back(j, m(i, j));
  }
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n),
                                                 1.0 / static_cast<double>(n));
  Eigen::VectorXd next(pi.size());
  const std::size_t cap = iteration_cap(n);
  for (std::size_t it = 0; it < cap; ++it) {
    next.setZero();
    for (NodeId i = 0; i < n; ++i) {
      const double mass = pi[static_cast<Eigen::Index>(i)];
      for (const auto& [j, w] : support[i]) next[static_cast<Eigen::Index>(j)] += mass * w;
    }
    next /= next.sum();
    const double step = (next - pi).cwiseAbs().maxCoeff();
    pi.swap(next);
    if (step <= kStepTolerance) {
      if (pi.minCoeff() <= 0.0) {
        throw NonConvergence("stationary distribution has a non-positive entry");
      }
      return {pi};
    }
  }
  throw NonConvergence("power iteration for the stationary distribution hit its cap");
}

StationaryDistribution stationary_distribution(const Eigen::MatrixXd& row_stochastic) {
  const Eigen::Index n = row_stochastic.rows();
  if (n == 0 || row_stochastic.cols() != n) throw GraphError("matrix must be square");
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd transposed = row_stochastic.transpose();
  const std::size_t cap = iteration_cap(static_cast<std::size_t>(n));
  for (std::size_t it = 0; it < cap; ++it) {
    Eigen::VectorXd next = transposed * pi;
    next /= next.sum();
    const double step = (next - pi).cwiseAbs().maxCoeff();
    pi.swap(next);
    if (step <= kStepTolerance) {
      if (pi.minCoeff() <= 0.0) {
        throw NonConvergence("stationary distribution has a non-positive entry");
      }
      return {pi};
    }
  }
  throw NonConvergence("power iteration for the stationary distribution hit its cap");
}

double deflated_spectral_radius(const Eigen::MatrixXd& matrix,
                                const Eigen::VectorXd& pi) {
  const Eigen::Index n = matrix.rows();
  Eigen::MatrixXd power =
      matrix - Eigen::VectorXd::Ones(n) * pi.transpose();
  double norm = power.norm();
  if (norm == 0.0) return 0.0;
  power /= norm;
  double log_scale = std::log(norm);
  double exponent = 1.0;
  double estimate = norm;
  // 2^48 steps: sub-exponential factors (Jordan blocks, rotating complex
  // pairs) contribute O(log k / k) to the estimate and vanish.
  for (int squaring = 0; squaring < 48; ++squaring) {
    power = power * power;
    norm = power.norm();
    if (norm == 0.0) return 0.0;
    if (!std::isfinite(norm)) throw NonConvergence("spectral radius estimate overflowed");
    power /= norm;
    log_scale = 2.0 * log_scale + std::log(norm);
    exponent *= 2.0;
    estimate = std::exp(log_scale / exponent);
  }
  return estimate;
}

double spectral_gap(const MixingMatrix& m, const StationaryDistribution& pi) {
  if (m.kind() != MixingKind::row) {
    throw GraphError("spectral gap is defined for the row-stochastic chain");
  }
  return deflated_spectral_radius(m.weights(), pi.pi);
}

}  // namespace frsd
