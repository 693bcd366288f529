#include <algorithm>
#include <cmath>

#include "frsd/engine.hpp"
#include "frsd/error.hpp"

namespace frsd {

namespace {
constexpr double kResidualFloor = 1e-13;
constexpr std::size_t kMinFitPoints = 10;
}  // namespace

double residual(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_star,
                const Eigen::MatrixXd& x0) {
  if (x.rows() != x_star.rows() || x.cols() != x_star.cols() || x0.rows() != x.rows() ||
      x0.cols() != x.cols()) {
    throw DimensionMismatch("residual operands differ in shape");
  }
  const double denom = (x0 - x_star).norm();
  if (denom < 1e-300) throw DegenerateStart("x(0) coincides with the minimizer");
  return (x - x_star).norm() / denom;
}

double consensus_violation(const Eigen::MatrixXd& x, const DiGraph& g) {
  if (static_cast<std::size_t>(x.rows()) != g.node_count()) {
    throw DimensionMismatch("iterate stack does not match the graph");
  }
  double worst = 0.0;
  for (const Edge& e : g.edges()) {
    const auto a = static_cast<Eigen::Index>(e.from);
    const auto b = static_cast<Eigen::Index>(e.to);
    worst = std::max(worst, (x.row(a) - x.row(b)).norm());
  }
  return worst;
}

RateFit fit_linear_rate(const Trace& trace, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw DomainError("tail fraction must lie in (0, 1]");
  }
  // Points after the residual first reaches the floor are rounding noise.
  std::vector<const TracePoint*> usable;
  for (const TracePoint& pt : trace.points) {
    if (!(pt.residual >= kResidualFloor) || !std::isfinite(pt.residual)) break;
    usable.push_back(&pt);
  }
  const auto keep = static_cast<std::size_t>(
      std::ceil(tail_fraction * static_cast<double>(usable.size())));
  if (keep < kMinFitPoints) {
    throw InsufficientData("rate fit needs at least 10 points above the residual floor, got " +
                           std::to_string(keep));
  }
  const std::size_t first = usable.size() - keep;

  double mk = 0.0;
  double ml = 0.0;
  for (std::size_t i = first; i < usable.size(); ++i) {
    mk += static_cast<double>(usable[i]->k);
    ml += std::log(usable[i]->residual);
  }
  mk /= static_cast<double>(keep);
  ml /= static_cast<double>(keep);
  double skk = 0.0;
  double skl = 0.0;
  double sll = 0.0;
  for (std::size_t i = first; i < usable.size(); ++i) {
    const double dk = static_cast<double>(usable[i]->k) - mk;
    const double dl = std::log(usable[i]->residual) - ml;
    skk += dk * dk;
    skl += dk * dl;
    sll += dl * dl;
  }
  if (skk == 0.0) throw InsufficientData("rate fit needs distinct iteration indices");
  RateFit fit;
  fit.slope = skl / skk;
  const double ss_res = std::max(0.0, sll - fit.slope * skl);
  fit.r_squared = sll > 0.0 ? 1.0 - ss_res / sll : 1.0;
  return fit;
}

std::optional<std::size_t> iterations_to(const Trace& trace, double threshold) {
  for (const TracePoint& pt : trace.points) {
    if (pt.residual <= threshold) return pt.k;
  }
  return std::nullopt;
}

}  // namespace frsd
