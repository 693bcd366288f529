// Row-stochastic gradient-tracking baselines: Xi-row, FROZEN, D-DNGT.
//
// Shared update, with mix_* = sum_j r_ij (.)_j over the closed in-neighborhood:
//   x+ = <method-specific use of mix_x and y>
//   v+ = mix_v
//   y+ = mix_y + grad f_i(x+) / [v+]_i - grad f_i(x) / [v]_i
// Xi-row:  x+ = mix_x - alpha y
// FROZEN:  s+ = mix_x - alpha y,                        x+ = s+ + beta (s+ - s)
// D-DNGT:  s+ = mix_x + beta (s - s_prev) - alpha y,    x+ = s+ + beta (s+ - s)
// Broadcast: (x, y, v).

#include "frsd/error.hpp"
#include "frsd/protocols.hpp"
#include "protocol_support.hpp"

namespace frsd {

namespace {

class RowTrackingProtocol final : public Protocol {
 public:
  explicit RowTrackingProtocol(Algorithm a) : algorithm_(a) {}

  Algorithm algorithm() const override { return algorithm_; }

  NodeState init(NodeId i, std::size_t n, const Eigen::VectorXd& x0,
                 const LocalObjective& f, const HyperParams& /*hp*/) const override {
    if (i >= n) throw DomainError("node index out of range");
    RowTrackingState s;
    s.node = i;
    s.x = x0;
    s.v = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i));
    s.scaled_grad = f.grad(x0);  // [v_i(0)]_i = 1
    s.y = s.scaled_grad;
    if (algorithm_ != Algorithm::xi_row) s.s = x0;
    if (algorithm_ == Algorithm::d_dngt) s.s_prev = x0;
    return s;
  }

  Broadcast initial_broadcast(const NodeState& state, const HyperParams&) const override {
    return pack(std::get<RowTrackingState>(state));
  }

  StepResult step(const NodeState& state, std::size_t /*phase*/, const Inbox& inbox,
                  const LocalObjective& f, const HyperParams& hp) const override {
    const auto& s = std::get<RowTrackingState>(state);
    detail::require_step_size(hp);
    detail::require_weights(inbox, detail::Weights::row, algorithm_);
    const std::size_t p = detail::dim(s.x);
    const std::size_t n = detail::dim(s.v);
    detail::require_payload(inbox, 2 * p + n);
    detail::own_eigenvalue(s.v, s.node);

    const Eigen::VectorXd mix_x = detail::mix(inbox, detail::Weights::row, 0, p);
    const Eigen::VectorXd mix_y = detail::mix(inbox, detail::Weights::row, p, p);

    RowTrackingState next;
    next.node = s.node;
    next.round = s.round + 1;
    switch (algorithm_) {
      case Algorithm::xi_row:
        next.x = mix_x - hp.alpha * s.y;
        break;
      case Algorithm::frozen:
        next.s = mix_x - hp.alpha * s.y;
        next.x = next.s + hp.beta * (next.s - s.s);
        break;
      case Algorithm::d_dngt:
        next.s = mix_x + hp.beta * (s.s - s.s_prev) - hp.alpha * s.y;
        next.x = next.s + hp.beta * (next.s - s.s);
        next.s_prev = s.s;
        break;
      default:
        throw UnknownAlgorithm(std::string(algorithm_name(algorithm_)));
    }
    next.v = detail::mix(inbox, detail::Weights::row, 2 * p, n);
    const double own_next = detail::own_eigenvalue(next.v, next.node);
    next.scaled_grad = f.grad(next.x) / own_next;
    next.y = mix_y + next.scaled_grad - s.scaled_grad;

    Broadcast out = pack(next);
    return {std::move(next), std::move(out)};
  }

 private:
  static Broadcast pack(const RowTrackingState& s) {
    Broadcast out;
    out.payload.reserve(2 * detail::dim(s.x) + detail::dim(s.v));
    detail::append(out.payload, s.x);
    detail::append(out.payload, s.y);
    detail::append(out.payload, s.v);
    return out;
  }

  Algorithm algorithm_;
};

}  // namespace

namespace detail {
std::unique_ptr<Protocol> make_row_tracking(Algorithm a) {
  return std::make_unique<RowTrackingProtocol>(a);
}
}  // namespace detail

}  // namespace frsd
