// Methods mixing decisions with row weights R and gradient trackers with
// column weights B: AB, ABm, ABN and Push-Pull.
//
// AB / ABm (adapt-then-combine tracker):
//   x(k+1) = sum_j r_ij x_j(k) - alpha y_i(k) + beta (x_i(k) - x_i(k-1))
//   y(k+1) = sum_j b_ij (y_j(k) + grad f_j(x_j(k+1)) - grad f_j(x_j(k)))
// The tracker message w_j(k) = y_j(k) + grad f_j(x_j(k+1)) - grad f_j(x_j(k))
// only needs node j's own data, so it rides along with x_j(k+1): round k
// carries (x_j(k), w_j(k-1)) and y_i(k) is assembled on receipt. Round 0 uses
// the initialized y_i(0) and ignores the second half of the payload.
//
// ABm (combine-then-adapt) and ABN track with
//   y(k+1) = sum_j b_ij y_j(k) + grad f_i(x_i(k+1)) - grad f_i(x_i(k))
// and broadcast (x, y). ABN moves x through s:
//   s(k+1) = sum_j r_ij x_j(k) - alpha y_i(k),  x(k+1) = s(k+1) + beta (s(k+1) - s(k))
//
// Push-Pull: x(k+1) = sum_j r_ij (x_j(k) - alpha y_j(k)) with the AB tracker.
// Node j's tracker message depends on x_j(k+1), which depends on the
// neighbors' y(k), so one iteration needs two exchanges of p scalars each.

#include "frsd/error.hpp"
#include "frsd/protocols.hpp"
#include "protocol_support.hpp"

namespace frsd {

namespace {

using detail::Weights;

class PushPullFamilyProtocol final : public Protocol {
 public:
  PushPullFamilyProtocol(Algorithm a, bool combine_then_adapt)
      : algorithm_(a), combine_then_adapt_(a == Algorithm::abm && combine_then_adapt) {}

  Algorithm algorithm() const override { return algorithm_; }

  std::size_t phases() const override { return algorithm_ == Algorithm::push_pull ? 2 : 1; }

  std::size_t payload_size(std::size_t phase, std::size_t n, std::size_t p) const override {
    if (algorithm_ == Algorithm::push_pull) return p;
    return Protocol::payload_size(phase, n, p);
  }

  NodeState init(NodeId i, std::size_t n, const Eigen::VectorXd& x0,
                 const LocalObjective& f, const HyperParams& /*hp*/) const override {
    if (i >= n) throw DomainError("node index out of range");
    PushPullFamilyState s;
    s.node = i;
    s.x = x0;
    s.grad = f.grad(x0);
    s.y = s.grad;
    if (algorithm_ == Algorithm::abm) s.x_prev = x0;
    if (algorithm_ == Algorithm::abn) s.s = x0;
    return s;
  }

  Broadcast initial_broadcast(const NodeState& state, const HyperParams& hp) const override {
    const auto& s = std::get<PushPullFamilyState>(state);
    Broadcast out;
    if (algorithm_ == Algorithm::push_pull) {
      detail::append(out.payload, s.x - hp.alpha * s.y);
      return out;
    }
    detail::append(out.payload, s.x);
    if (tracks_after_combine()) {
      detail::append(out.payload, s.y);
    } else {
      // Placeholder for w(-1); round 0 reads y(0) from the state instead.
      detail::append(out.payload, Eigen::VectorXd::Zero(s.x.size()));
    }
    return out;
  }

  StepResult step(const NodeState& state, std::size_t phase, const Inbox& inbox,
                  const LocalObjective& f, const HyperParams& hp) const override {
    const auto& s = std::get<PushPullFamilyState>(state);
    detail::require_step_size(hp);
    detail::require_weights(inbox, Weights::row, algorithm_);
    detail::require_weights(inbox, Weights::column, algorithm_);
    const std::size_t p = detail::dim(s.x);
    if (algorithm_ == Algorithm::push_pull) {
      detail::require_payload(inbox, p);
      return phase == 0 ? push_pull_combine(s, inbox, f) : push_pull_track(s, inbox, hp);
    }
    detail::require_payload(inbox, 2 * p);

    const Eigen::VectorXd mix_x = detail::mix(inbox, Weights::row, 0, p);
    PushPullFamilyState next;
    next.node = s.node;
    next.round = s.round + 1;

    if (algorithm_ == Algorithm::abn) {
      next.s = mix_x - hp.alpha * s.y;
      next.x = next.s + hp.beta * (next.s - s.s);
    } else {
      const Eigen::VectorXd y = tracks_after_combine() || s.round == 0
                                    ? s.y
                                    : detail::mix(inbox, Weights::column, p, p);
      next.x = mix_x - hp.alpha * y;
      if (algorithm_ == Algorithm::abm) {
        next.x += hp.beta * (s.x - s.x_prev);
        next.x_prev = s.x;
      }
      next.y = y;
    }
    next.grad = f.grad(next.x);

    Broadcast out;
    out.payload.reserve(2 * p);
    detail::append(out.payload, next.x);
    if (tracks_after_combine()) {
      next.y = detail::mix(inbox, Weights::column, p, p) + next.grad - s.grad;
      detail::append(out.payload, next.y);
    } else {
      detail::append(out.payload, next.y + next.grad - s.grad);  // w_i(k)
    }
    return {std::move(next), std::move(out)};
  }

 private:
  bool tracks_after_combine() const {
    return algorithm_ == Algorithm::abn || combine_then_adapt_;
  }

  // Phase 0: receive x_j - alpha y_j, emit the tracker message.
  static StepResult push_pull_combine(const PushPullFamilyState& s, const Inbox& inbox,
                                      const LocalObjective& f) {
    const auto p = detail::dim(s.x);
    PushPullFamilyState next = s;
    next.x = detail::mix(inbox, Weights::row, 0, p);
    next.grad = f.grad(next.x);
    Broadcast out;
    detail::append(out.payload, s.y + next.grad - s.grad);
    return {std::move(next), std::move(out)};
  }

  // Phase 1: receive tracker messages, finish the iteration.
  static StepResult push_pull_track(const PushPullFamilyState& s, const Inbox& inbox,
                                    const HyperParams& hp) {
    const auto p = detail::dim(s.x);
    PushPullFamilyState next = s;
    next.round = s.round + 1;
    next.y = detail::mix(inbox, Weights::column, 0, p);
    Broadcast out;
    detail::append(out.payload, next.x - hp.alpha * next.y);
    return {std::move(next), std::move(out)};
  }

  Algorithm algorithm_;
  bool combine_then_adapt_;
};

}  // namespace

namespace detail {
std::unique_ptr<Protocol> make_push_pull_family(Algorithm a, bool combine_then_adapt) {
  return std::make_unique<PushPullFamilyProtocol>(a, combine_then_adapt);
}
}  // namespace detail

}  // namespace frsd
