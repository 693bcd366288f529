#include "frsd/error.hpp"
#include "frsd/protocols.hpp"
#include "protocol_support.hpp"

namespace frsd {

FrsdState frsd_init(NodeId i, const Eigen::VectorXd& x0, std::size_t n) {
  if (i >= n) throw DomainError("node index out of range");
  FrsdState s;
  s.node = i;
  s.x = x0;
  s.y = Eigen::VectorXd::Zero(x0.size());
  s.v = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i));
  return s;
}

StepResult frsd_step(const FrsdState& state, const Inbox& inbox, const LocalObjective& f,
                     const HyperParams& hp, bool corrected_step, bool debias) {
  const Algorithm algo = corrected_step ? Algorithm::frsd_cs : Algorithm::frsd;
  detail::require_step_size(hp);
  if (!(hp.alpha * hp.beta < 1.0)) throw DomainError("FRSD needs alpha * beta < 1");
  detail::require_weights(inbox, detail::Weights::row, algo);
  const std::size_t p = detail::dim(state.x);
  const std::size_t n = detail::dim(state.v);
  detail::require_payload(inbox, p + n);

  const double own = detail::own_eigenvalue(state.v, state.node);
  const Eigen::VectorXd mix_x = detail::mix(inbox, detail::Weights::row, 0, p);
  const Eigen::VectorXd mix_v = detail::mix(inbox, detail::Weights::row, p, n);

  FrsdState next;
  next.node = state.node;
  next.round = state.round + 1;
  // y(k) uses the current x(k) before it is overwritten; y(0) = 0.
  next.y = state.round > 0 ? Eigen::VectorXd(state.y + hp.beta * (state.x - mix_x))
                           : state.y;
  const Eigen::VectorXd grad = f.grad(state.x);
  if (corrected_step) {
    next.x = mix_x - hp.alpha * (own * next.y + grad);
  } else {
    const double scale = debias ? 1.0 / own : 1.0;
    next.x = mix_x - hp.alpha * (scale * grad + next.y);
  }
  next.v = mix_v;

  Broadcast out;
  out.payload.reserve(p + n);
  detail::append(out.payload, next.x);
  detail::append(out.payload, next.v);
  return {std::move(next), std::move(out)};
}

namespace {

class FrsdProtocol final : public Protocol {
 public:
  FrsdProtocol(bool corrected_step, bool debias)
      : corrected_step_(corrected_step), debias_(debias) {}

  Algorithm algorithm() const override {
    return corrected_step_ ? Algorithm::frsd_cs : Algorithm::frsd;
  }

  NodeState init(NodeId i, std::size_t n, const Eigen::VectorXd& x0,
                 const LocalObjective& /*f*/, const HyperParams& /*hp*/) const override {
    return frsd_init(i, x0, n);
  }

  Broadcast initial_broadcast(const NodeState& state, const HyperParams&) const override {
    const auto& s = std::get<FrsdState>(state);
    Broadcast out;
    detail::append(out.payload, s.x);
    detail::append(out.payload, s.v);
    return out;
  }

  StepResult step(const NodeState& state, std::size_t /*phase*/, const Inbox& inbox,
                  const LocalObjective& f, const HyperParams& hp) const override {
    return frsd_step(std::get<FrsdState>(state), inbox, f, hp, corrected_step_, debias_);
  }

 private:
  bool corrected_step_;
  bool debias_;
};

}  // namespace

namespace detail {
std::unique_ptr<Protocol> make_frsd(bool corrected_step, bool debias) {
  return std::make_unique<FrsdProtocol>(corrected_step, debias);
}
}  // namespace detail

}  // namespace frsd
