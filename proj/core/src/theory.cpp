#include "frsd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <nlohmann/json.hpp>

#include "frsd/engine.hpp"
#include "frsd/error.hpp"

namespace frsd {

namespace {

constexpr double kDecayFloor = 1e-13;
constexpr double kEnvelopeMargin = 0.02;
constexpr std::size_t kEnvelopeFitTerms = 5;

Eigen::MatrixXd gradient_stack(const ProblemInstance& problem, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    g.row(i) = problem.local(static_cast<std::size_t>(i)).grad(x.row(i).transpose()).transpose();
  }
  return g;
}

// Largest singular value by power iteration on A^T A, warm-started from `v`.
double two_norm(const Eigen::MatrixXd& a, Eigen::VectorXd& v) {
  double sigma = 0.0;
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd av = a * v;
    Eigen::VectorXd w = a.transpose() * av;
    const double norm = w.norm();
    if (norm == 0.0) return av.norm();
    const double next = std::sqrt(norm);
    v = w / norm;
    if (std::abs(next - sigma) <= 1e-12 * next) return next;
    sigma = next;
  }
  return sigma;
}

}  // namespace

Eigen::MatrixXd lazy_chain(const Eigen::MatrixXd& r, double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw DomainError("lazy chain weight must lie in [0, 1]");
  if (r.rows() != r.cols()) throw DimensionMismatch("lazy chain needs a square matrix");
  return (1.0 - c) * Eigen::MatrixXd::Identity(r.rows(), r.cols()) + c * r;
}

double eta(double alpha, std::size_t n, double lipschitz, double mu) {
  if (n == 0) throw DomainError("eta needs n >= 1");
  if (!(mu > 0.0 && lipschitz >= mu)) throw DomainError("eta needs L >= mu > 0");
  const double nd = static_cast<double>(n);
  if (!(alpha > 0.0 && alpha < 2.0 / (nd * lipschitz))) {
    throw DomainError("eta needs 0 < alpha < 2 / (n L)");
  }
  return std::max(std::abs(1.0 - nd * lipschitz * alpha), std::abs(1.0 - nd * mu * alpha));
}

DecayCheck power_decay_check(const Eigen::MatrixXd& r, const Eigen::VectorXd& pi,
                             std::size_t max_power) {
  const Eigen::Index n = r.rows();
  if (r.cols() != n || pi.size() != n) throw DimensionMismatch("power_decay_check shapes");

  DecayCheck out;
  out.rho = deflated_spectral_radius(r, pi);
  const Eigen::SparseMatrix<double> rs = r.sparseView();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - Eigen::VectorXd::Ones(n) * pi.transpose();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  for (std::size_t k = 0;; ++k) {
    const double d = two_norm(a, v);
    out.distances.push_back(d);
    if (d < kDecayFloor || k == max_power) break;
    // (R - 1 pi^T)^{k+1} = R^{k+1} - 1 pi^T. Deflating every step keeps the
    // rounding error in pi from settling into a constant floor.
    a = rs * a;
    a -= Eigen::VectorXd::Ones(n) * (pi.transpose() * a);
  }

  const auto& d = out.distances;
  const std::size_t m = d.size();
  // Ratio: exp of the least-squares slope of log d_k over the second half.
  const std::size_t half = (m - 1) / 2;
  {
    double sk = 0.0, sl = 0.0, skk = 0.0, skl = 0.0, count = 0.0;
    for (std::size_t k = half; k < m; ++k) {
      if (d[k] <= 0.0) continue;
      const double kd = static_cast<double>(k);
      const double l = std::log(d[k]);
      sk += kd;
      sl += l;
      skk += kd * kd;
      skl += kd * l;
      count += 1.0;
    }
    const double denom = count * skk - sk * sk;
    if (count >= 2.0 && denom > 0.0) out.ratio = std::exp((count * skl - sk * sl) / denom);
  }
  const std::size_t tail = (3 * (m - 1)) / 4;

  const double log_rate = std::log(out.rho + kEnvelopeMargin);
  double log_c = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < std::min(m, kEnvelopeFitTerms); ++k) {
    if (d[k] > 0.0) log_c = std::max(log_c, std::log(d[k]) - static_cast<double>(k) * log_rate);
  }
  out.passed = true;
  for (std::size_t k = tail; k < m; ++k) {
    if (d[k] <= 0.0) continue;
    if (std::log(d[k]) > log_c + static_cast<double>(k) * log_rate + 1e-9) {
      out.passed = false;
      break;
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> frsd_x_only_oracle(const Eigen::MatrixXd& r,
                                                const ProblemInstance& problem, double alpha,
                                                double beta, const Eigen::MatrixXd& x0,
                                                std::size_t rounds, XOnlyForm form) {
  const Eigen::Index n = r.rows();
  if (r.cols() != n || x0.rows() != n ||
      static_cast<std::size_t>(x0.cols()) != problem.dimension() ||
      problem.node_count() != static_cast<std::size_t>(n)) {
    throw DimensionMismatch("x-only oracle shapes");
  }
  const double c = alpha * beta;
  if (!(c < 1.0)) throw DomainError("x-only recursion needs alpha * beta < 1");
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

  // g(k) = diag(R^k)^{-1} grad f(x(k))
  Eigen::MatrixXd power = eye;
  auto scaled = [&](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd g = gradient_stack(problem, x);
    for (Eigen::Index i = 0; i < n; ++i) g.row(i) /= power(i, i);
    return g;
  };

  std::vector<Eigen::MatrixXd> xs{x0};
  if (rounds == 0) return xs;
  Eigen::MatrixXd g_prev = scaled(x0);
  xs.push_back(r * x0 - alpha * g_prev);
  power = r;

  const Eigen::MatrixXd direct = (1.0 + c) * r + (1.0 - c) * eye;
  const Eigen::MatrixXd r2 = r * r;
  for (std::size_t k = 0; k + 2 <= rounds; ++k) {
    const Eigen::MatrixXd& x1 = xs[k + 1];
    const Eigen::MatrixXd& x_0 = xs[k];
    const Eigen::MatrixXd g = scaled(x1);
    Eigen::MatrixXd next;
    if (form == XOnlyForm::direct) {
      next = direct * x1 - r * x_0;
    } else {
      const Eigen::MatrixXd delta = (1.0 - c) * (eye - r) * x1 - r * (eye - r) * x_0;
      next = 2.0 * r * x1 - r2 * x_0 + delta;
    }
    next -= alpha * (g - g_prev);
    xs.push_back(std::move(next));
    g_prev = g;
    power = r * power;
  }
  return xs;
}

PrimalDualComparison primal_dual_equivalence_oracle(const MixingMatrix& w,
                                                    const ProblemInstance& problem,
                                                    double alpha, double beta,
                                                    const Eigen::VectorXd& x0,
                                                    std::size_t rounds) {
  const Eigen::MatrixXd& wm = w.weights();
  const Eigen::Index n = wm.rows();
  if ((wm - wm.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw NotDoublyStochastic("W is not symmetric");
  }
  if ((wm.rowwise().sum() - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() > 1e-12) {
    throw NotDoublyStochastic("W rows do not sum to one");
  }
  if (!(alpha > 0.0 && beta > 0.0 && alpha * beta < 1.0)) {
    throw DomainError("primal-dual comparison needs alpha, beta > 0 and alpha * beta < 1");
  }
  const double theta = 1.0 / (alpha * beta);
  const Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n) - wm;

  PrimalDualComparison out;
  Eigen::MatrixXd x = x0.transpose().replicate(n, 1);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, x0.size());
  out.primal_dual.push_back(x);
  for (std::size_t k = 0; k < rounds; ++k) {
    if (k > 0) y += beta * lap * x;
    out.duals.push_back(y);
    x = x - alpha * (gradient_stack(problem, x) + y + theta * beta * lap * x);
    out.primal_dual.push_back(x);
  }

  SimulationConfig config;
  config.algorithm = Algorithm::frsd;
  config.options.debias = false;
  config.graph = w.graph();
  config.problem = problem;
  config.hp = {alpha, beta};
  config.x0 = x0;
  config.row_weights = w;
  config.max_iterations = std::max<std::size_t>(rounds, 1);
  Simulator sim(std::move(config));
  out.frsd.push_back(sim.decisions());
  for (std::size_t k = 0; k < rounds; ++k) {
    sim.advance();
    out.frsd.push_back(sim.decisions());
  }

  for (std::size_t k = 0; k <= rounds; ++k) {
    const double scale = std::max(1.0, out.frsd[k].cwiseAbs().maxCoeff());
    const double dev = (out.frsd[k] - out.primal_dual[k]).cwiseAbs().maxCoeff() / scale;
    out.max_deviation = std::max(out.max_deviation, dev);
  }
  return out;
}

TheoryReport analyze(const DiGraph& g, double alpha, double beta, double lipschitz, double mu) {
  if (!(alpha > 0.0 && beta > 0.0 && alpha * beta < 1.0)) {
    throw DomainError("analyze needs 0 < alpha beta < 1");
  }
  if (!is_strongly_connected(g)) throw GraphError("graph is not strongly connected");
  const MixingMatrix r = build_uniform_row_stochastic(g);
  const StationaryDistribution pi = stationary_distribution(r);

  TheoryReport report;
  report.sigma_r = spectral_gap(r, pi);
  report.sigma_c = deflated_spectral_radius(lazy_chain(r.weights(), alpha * beta), pi.pi);
  const std::size_t n = g.node_count();
  report.alpha_ceiling = 1.0 / (static_cast<double>(n) * lipschitz);
  try {
    report.eta = eta(alpha, n, lipschitz, mu);
  } catch (const DomainError&) {
    report.eta.reset();
  }
  const DecayCheck decay = power_decay_check(r.weights(), pi.pi);
  report.decay_ok = decay.passed;
  report.decay_ratio = decay.ratio;
  return report;
}

std::string to_json(const TheoryReport& report) {
  nlohmann::ordered_json j;
  j["sigma_R_surrogate"] = report.sigma_r;
  j["sigma_C_surrogate"] = report.sigma_c;
  j["eta"] = report.eta ? nlohmann::ordered_json(*report.eta) : nlohmann::ordered_json(nullptr);
  j["alpha_ceiling"] = report.alpha_ceiling;
  j["decay_ok"] = report.decay_ok;
  j["decay_ratio"] = report.decay_ratio;
  return j.dump(2);
}

}  // namespace frsd
