#include "dense_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace frsd::testing {

namespace {

using Eigen::MatrixXd;

MatrixXd grads(const ProblemInstance& problem, const MatrixXd& x) {
  MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    g.row(i) = problem.local(static_cast<std::size_t>(i)).grad(x.row(i).transpose()).transpose();
  }
  return g;
}

// diag(V)^{-1} G
MatrixXd debias(const MatrixXd& v, const MatrixXd& g) {
  return v.diagonal().cwiseInverse().asDiagonal() * g;
}

}  // namespace

std::vector<MatrixXd> dense_iterates(Algorithm a, const MatrixXd& r, const MatrixXd& b,
                                     const ProblemInstance& problem, const HyperParams& hp,
                                     const Eigen::VectorXd& x0, std::size_t rounds,
                                     bool abm_combine_then_adapt) {
  const Eigen::Index n = static_cast<Eigen::Index>(problem.node_count());
  const double al = hp.alpha;
  const double be = hp.beta;
  const MatrixXd eye = MatrixXd::Identity(n, n);

  MatrixXd x = x0.transpose().replicate(n, 1);
  MatrixXd x_prev = x;
  MatrixXd s = x;
  MatrixXd s_prev = x;
  MatrixXd v = eye;
  MatrixXd y = grads(problem, x);
  MatrixXd z = x;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);  // push-sum weights
  if (a == Algorithm::frsd || a == Algorithm::frsd_cs) y.setZero();

  std::vector<MatrixXd> out{x};
  for (std::size_t k = 0; k < rounds; ++k) {
    switch (a) {
      case Algorithm::frsd:
      case Algorithm::frsd_cs: {
        if (k > 0) y = y + be * (eye - r) * x;
        const MatrixXd g = grads(problem, x);
        if (a == Algorithm::frsd) {
          x = r * x - al * (debias(v, g) + y);
        } else {
          x = r * x - al * (v.diagonal().asDiagonal() * y + g);
        }
        v = r * v;
        out.push_back(x);
        break;
      }
      case Algorithm::xi_row:
      case Algorithm::frozen:
      case Algorithm::d_dngt: {
        const MatrixXd g_old = debias(v, grads(problem, x));
        MatrixXd x_new;
        if (a == Algorithm::xi_row) {
          x_new = r * x - al * y;
        } else if (a == Algorithm::frozen) {
          const MatrixXd s_new = r * x - al * y;
          x_new = s_new + be * (s_new - s);
          s = s_new;
        } else {
          const MatrixXd s_new = r * x + be * (s - s_prev) - al * y;
          x_new = s_new + be * (s_new - s);
          s_prev = s;
          s = s_new;
        }
        v = r * v;
        y = r * y + debias(v, grads(problem, x_new)) - g_old;
        x = x_new;
        out.push_back(x);
        break;
      }
      case Algorithm::ab:
      case Algorithm::abm:
      case Algorithm::push_pull: {
        const MatrixXd g_old = grads(problem, x);
        MatrixXd x_new;
        if (a == Algorithm::push_pull) {
          x_new = r * (x - al * y);
        } else if (a == Algorithm::ab) {
          x_new = r * x - al * y;
        } else {
          x_new = r * x - al * y + be * (x - x_prev);
        }
        const MatrixXd g_new = grads(problem, x_new);
        if (a == Algorithm::abm && abm_combine_then_adapt) {
          y = b * y + g_new - g_old;
        } else {
          y = b * (y + g_new - g_old);
        }
        x_prev = x;
        x = x_new;
        out.push_back(x);
        break;
      }
      case Algorithm::abn: {
        const MatrixXd g_old = grads(problem, x);
        const MatrixXd s_new = r * x - al * y;
        const MatrixXd x_new = s_new + be * (s_new - s);
        y = b * y + grads(problem, x_new) - g_old;
        s = s_new;
        x = x_new;
        out.push_back(x);
        break;
      }
      case Algorithm::push_diging: {
        const MatrixXd g_old = grads(problem, z);
        w = b * w;
        x = b * (x - al * y);
        z = w.cwiseInverse().asDiagonal() * x;
        y = b * y + grads(problem, z) - g_old;
        out.push_back(z);
        break;
      }
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> gradient_descent(const LocalObjective& f, double alpha,
                                              const Eigen::VectorXd& x0, std::size_t rounds) {
  std::vector<Eigen::VectorXd> out{x0};
  Eigen::VectorXd x = x0;
  for (std::size_t k = 0; k < rounds; ++k) {
    x = x - alpha * f.grad(x);
    out.push_back(x);
  }
  return out;
}

double dense_second_eigenvalue_modulus(const MatrixXd& r) {
  Eigen::EigenSolver<MatrixXd> es(r, false);
  const auto ev = es.eigenvalues();
  Eigen::Index closest = 0;
  for (Eigen::Index i = 1; i < ev.size(); ++i) {
    if (std::abs(ev[i] - 1.0) < std::abs(ev[closest] - 1.0)) closest = i;
  }
  double rho = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (i != closest) rho = std::max(rho, std::abs(ev[i]));
  }
  return rho;
}

Eigen::VectorXd dense_stationary(const MatrixXd& r) {
  Eigen::EigenSolver<MatrixXd> es(r.transpose());
  const auto ev = es.eigenvalues();
  Eigen::Index closest = 0;
  for (Eigen::Index i = 1; i < ev.size(); ++i) {
    if (std::abs(ev[i] - 1.0) < std::abs(ev[closest] - 1.0)) closest = i;
  }
  Eigen::VectorXd pi = es.eigenvectors().col(closest).real();
  return pi / pi.sum();
}

double max_relative_deviation(const std::vector<MatrixXd>& a, const std::vector<MatrixXd>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sequence lengths differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double scale = std::max(1.0, b[k].cwiseAbs().maxCoeff());
    worst = std::max(worst, (a[k] - b[k]).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

}  // namespace frsd::testing
