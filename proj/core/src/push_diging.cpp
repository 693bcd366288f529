// Push-DIGing over column-stochastic weights B:
//   v(k+1) = sum_j b_ij v_j(k)
//   x(k+1) = sum_j b_ij (x_j(k) - alpha y_j(k))
//   z(k+1) = x(k+1) / v(k+1)
//   y(k+1) = sum_j b_ij y_j(k) + grad f_i(z(k+1)) - grad f_i(z(k))
// Broadcast: (x - alpha y, y, v). The decision variable is z.

#include "frsd/error.hpp"
#include "frsd/protocols.hpp"
#include "protocol_support.hpp"

namespace frsd {

namespace {

class PushDigingProtocol final : public Protocol {
 public:
  Algorithm algorithm() const override { return Algorithm::push_diging; }

  NodeState init(NodeId i, std::size_t n, const Eigen::VectorXd& x0,
                 const LocalObjective& f, const HyperParams& /*hp*/) const override {
    if (i >= n) throw DomainError("node index out of range");
    PushDigingState s;
    s.node = i;
    s.x = x0;
    s.z = x0;
    s.v = 1.0;
    s.grad_z = f.grad(x0);
    s.y = s.grad_z;
    return s;
  }

  Broadcast initial_broadcast(const NodeState& state, const HyperParams& hp) const override {
    return pack(std::get<PushDigingState>(state), hp);
  }

  StepResult step(const NodeState& state, std::size_t /*phase*/, const Inbox& inbox,
                  const LocalObjective& f, const HyperParams& hp) const override {
    const auto& s = std::get<PushDigingState>(state);
    detail::require_step_size(hp);
    detail::require_weights(inbox, detail::Weights::column, Algorithm::push_diging);
    const std::size_t p = detail::dim(s.x);
    detail::require_payload(inbox, 2 * p + 1);

    PushDigingState next;
    next.node = s.node;
    next.round = s.round + 1;
    next.x = detail::mix(inbox, detail::Weights::column, 0, p);
    next.v = detail::mix(inbox, detail::Weights::column, 2 * p, 1)[0];
    if (!(next.v >= kEigenvalueFloor)) {
      throw DegenerateEigenvalue("push-sum weight fell below the floor at node " +
                                 std::to_string(s.node));
    }
    next.z = next.x / next.v;
    next.grad_z = f.grad(next.z);
    next.y = detail::mix(inbox, detail::Weights::column, p, p) + next.grad_z - s.grad_z;

    Broadcast out = pack(next, hp);
    return {std::move(next), std::move(out)};
  }

  const Eigen::VectorXd& decision(const NodeState& state) const override {
    return std::get<PushDigingState>(state).z;
  }

 private:
  static Broadcast pack(const PushDigingState& s, const HyperParams& hp) {
    Broadcast out;
    out.payload.reserve(2 * detail::dim(s.x) + 1);
    detail::append(out.payload, s.x - hp.alpha * s.y);
    detail::append(out.payload, s.y);
    out.payload.push_back(s.v);
    return out;
  }
};

}  // namespace

namespace detail {
std::unique_ptr<Protocol> make_push_diging() { return std::make_unique<PushDigingProtocol>(); }
}  // namespace detail

}  // namespace frsd
