#include "frsd/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frsd/error.hpp"
#include "frsd/rng.hpp"

namespace frsd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ln(1 + e^t) without overflow.
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// 1 / (1 + e^-t) without overflow.
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double spectral_norm_squared(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double s = svd.singularValues()(0);
  return s * s;
}

double min_gram_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() < m.cols()) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.transpose() * m,
                                                     Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues()(0));
}

}  // namespace

double huber_value(double z, double xi) {
  const double a = std::abs(z);
  return a <= xi ? 0.5 * z * z : xi * (a - 0.5 * xi);
}

double huber_grad(double z, double xi) {
  if (std::abs(z) <= xi) return z;
  return z > 0.0 ? xi : -xi;
}

LocalObjective::LocalObjective(LossKind kind, Eigen::MatrixXd features,
                               Eigen::VectorXd targets)
    : kind_(kind), features_(std::move(features)), targets_(std::move(targets)) {
  if (features_.rows() != targets_.size()) {
    throw DimensionMismatch("feature rows and target length differ");
  }
  const double gram = spectral_norm_squared(features_);
  std::visit(overloaded{
                 [&](const HuberLoss& h) {
                   if (!(h.xi > 0.0)) throw DomainError("Huber knee must be positive");
                   lipschitz_ = gram;
                   strong_convexity_ = 0.0;
                 },
                 [&](const LogisticLoss& l) {
                   if (!(l.lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
                   for (Eigen::Index j = 0; j < targets_.size(); ++j) {
                     if (targets_[j] != 1.0 && targets_[j] != -1.0) {
                       throw DomainError("logistic targets must be -1 or +1");
                     }
                   }
                   lipschitz_ = gram / 4.0 + l.lambda;
                   strong_convexity_ = l.lambda;
                 },
                 [&](const QuadraticLoss&) {
                   lipschitz_ = gram;
                   strong_convexity_ = min_gram_eigenvalue(features_);
                 },
             },
             kind_);
}

void LocalObjective::check_dimension(const Eigen::VectorXd& x) const {
  if (x.size() != features_.cols()) {
    throw DimensionMismatch("expected a vector of dimension " +
                            std::to_string(features_.cols()) + ", got " +
                            std::to_string(x.size()));
  }
}

double LocalObjective::value(const Eigen::VectorXd& x) const {
  check_dimension(x);
  return std::visit(
      overloaded{
          [&](const HuberLoss& h) {
            const Eigen::VectorXd r = features_ * x - targets_;
            double sum = 0.0;
            for (Eigen::Index j = 0; j < r.size(); ++j) sum += huber_value(r[j], h.xi);
            return sum;
          },
          [&](const LogisticLoss& l) {
            const Eigen::VectorXd margins = features_ * x;
            double sum = 0.0;
            for (Eigen::Index j = 0; j < margins.size(); ++j) {
              sum += softplus(-targets_[j] * margins[j]);
            }
            return sum + 0.5 * l.lambda * x.squaredNorm();
          },
          [&](const QuadraticLoss&) {
            return 0.5 * (features_ * x - targets_).squaredNorm();
          },
      },
      kind_);
}

Eigen::VectorXd LocalObjective::grad(const Eigen::VectorXd& x) const {
  check_dimension(x);
  return std::visit(
      overloaded{
          [&](const HuberLoss& h) -> Eigen::VectorXd {
            Eigen::VectorXd r = features_ * x - targets_;
            for (Eigen::Index j = 0; j < r.size(); ++j) r[j] = huber_grad(r[j], h.xi);
            return features_.transpose() * r;
          },
          [&](const LogisticLoss& l) -> Eigen::VectorXd {
            Eigen::VectorXd coeff = features_ * x;
            for (Eigen::Index j = 0; j < coeff.size(); ++j) {
              const double b = targets_[j];
              coeff[j] = -b * sigmoid(-b * coeff[j]);
            }
            return features_.transpose() * coeff + l.lambda * x;
          },
          [&](const QuadraticLoss&) -> Eigen::VectorXd {
            return features_.transpose() * (features_ * x - targets_);
          },
      },
      kind_);
}

ProblemInstance::ProblemInstance(std::vector<LocalObjective> locals)
    : locals_(std::move(locals)) {
  if (locals_.empty()) throw DimensionMismatch("problem needs at least one node");
  dimension_ = locals_.front().dimension();
  strong_convexity_ = std::numeric_limits<double>::infinity();
  for (const auto& f : locals_) {
    if (f.dimension() != dimension_) {
      throw DimensionMismatch("all local objectives must share one dimension");
    }
    lipschitz_ = std::max(lipschitz_, f.lipschitz());
    strong_convexity_ = std::min(strong_convexity_, f.strong_convexity());
  }
}

double ProblemInstance::mean_value(const Eigen::VectorXd& x) const {
  double sum = 0.0;
  for (const auto& f : locals_) sum += f.value(x);
  return sum / static_cast<double>(locals_.size());
}

Eigen::VectorXd ProblemInstance::mean_grad(const Eigen::VectorXd& x) const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension_));
  for (const auto& f : locals_) sum += f.grad(x);
  return sum / static_cast<double>(locals_.size());
}

ProblemInstance synth_huber_problem(std::size_t n, std::size_t m_per_node,
                                    std::size_t p, double xi, std::uint64_t seed) {
  if (n == 0 || m_per_node == 0 || p == 0) {
    throw DimensionMismatch("n, m_per_node and p must be positive");
  }
  Rng rng(seed);
  const auto rows = static_cast<Eigen::Index>(m_per_node);
  const auto cols = static_cast<Eigen::Index>(p);
  Eigen::VectorXd truth(cols);
  for (Eigen::Index k = 0; k < cols; ++k) truth[k] = rng.normal();

  std::vector<LocalObjective> locals;
  locals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal();
    }
    m /= std::sqrt(spectral_norm_squared(m));
    Eigen::VectorXd b = m * truth;
    for (Eigen::Index r = 0; r < rows; ++r) b[r] += 0.1 * rng.normal();
    locals.emplace_back(HuberLoss{xi}, std::move(m), std::move(b));
  }
  return ProblemInstance(std::move(locals));
}

ProblemInstance synth_quadratic_problem(std::size_t n, std::size_t m_per_node,
                                        std::size_t p, std::uint64_t seed) {
  if (n == 0 || m_per_node == 0 || p == 0) {
    throw DimensionMismatch("n, m_per_node and p must be positive");
  }
  Rng rng(seed);
  const auto rows = static_cast<Eigen::Index>(m_per_node);
  const auto cols = static_cast<Eigen::Index>(p);
  std::vector<LocalObjective> locals;
  locals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal();
    }
    Eigen::VectorXd b(rows);
    for (Eigen::Index r = 0; r < rows; ++r) b[r] = rng.normal();
    locals.emplace_back(QuadraticLoss{}, std::move(m), std::move(b));
  }
  return ProblemInstance(std::move(locals));
}

ProblemInstance partition_dataset(const Dataset& ds, std::size_t n,
                                  std::size_t m_per_node, std::size_t p,
                                  double lambda, std::uint64_t seed) {
  if (ds.rows.empty()) throw DimensionError("dataset has no rows");
  if (n == 0 || m_per_node == 0) throw DimensionError("n and m_per_node must be positive");
  if (p < ds.max_index + 1) {
    throw DimensionError("p = " + std::to_string(p) + " cannot hold feature index " +
                         std::to_string(ds.max_index) + " plus an intercept");
  }
  Rng rng(seed);
  const auto rows = static_cast<Eigen::Index>(m_per_node);
  const auto cols = static_cast<Eigen::Index>(p);
  std::vector<LocalObjective> locals;
  locals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::VectorXd b(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const SparseRow& sample = ds.rows[rng.below(ds.rows.size())];
      for (const auto& [index, value] : sample.features) {
        m(r, static_cast<Eigen::Index>(index - 1)) = value;
      }
      m(r, cols - 1) = 1.0;
      b[r] = sample.label;
    }
    locals.emplace_back(LogisticLoss{lambda}, std::move(m), std::move(b));
  }
  return ProblemInstance(std::move(locals));
}

Dataset synth_logistic_dataset(std::size_t rows, std::size_t features,
                               std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(features);
  for (double& wk : w) wk = rng.normal();
  Dataset ds;
  ds.max_index = features;
  ds.rows.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    SparseRow row;
    double score = 0.0;
    for (std::size_t k = 0; k < features; ++k) {
      const double a = 2.0 * rng.uniform() - 1.0;
      score += w[k] * a;
      row.features.emplace_back(k + 1, a);
    }
    score += 0.1 * rng.normal();
    row.label = score >= 0.0 ? 1 : -1;
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

}  // namespace frsd
