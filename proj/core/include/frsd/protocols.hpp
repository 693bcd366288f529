#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "frsd/digraph.hpp"
#include "frsd/objectives.hpp"

namespace frsd {

enum class Algorithm {
  frsd,
  frsd_cs,
  xi_row,
  frozen,
  d_dngt,
  ab,
  abm,
  abn,
  push_pull,
  push_diging,
};

/// CLI name, e.g. "frsd-cs", "push-diging".
std::string_view algorithm_name(Algorithm a);
/// Inverse of algorithm_name; throws UnknownAlgorithm.
Algorithm parse_algorithm(std::string_view name);
std::span<const Algorithm> all_algorithms();

/// Scalars each node broadcasts per iteration.
std::size_t comm_size(Algorithm a, std::size_t n, std::size_t p);
/// Nominal per-node storage as tabulated for the method family.
std::size_t memory_size(Algorithm a, std::size_t n, std::size_t p);

struct WeightNeeds {
  bool row = false;
  bool column = false;
};
WeightNeeds required_weights(Algorithm a);

/// alpha: step size. beta: momentum (FRSD: dual step with alpha * beta < 1;
/// ignored by methods without a momentum term).
struct HyperParams {
  double alpha = 0.1;
  double beta = 0.0;
};

struct ProtocolOptions {
  /// FRSD only: divide the local gradient by the node's own eigenvector
  /// estimate. Disabled to recover the undirected primal-dual recursion.
  bool debias = true;
  /// ABm only: use the combine-then-adapt tracker update instead of the
  /// adapt-then-combine default.
  bool abm_combine_then_adapt = false;
};

/// Eigenvector estimates below this are treated as degenerate.
inline constexpr double kEigenvalueFloor = 1e-12;

// ---------------------------------------------------------------------------
// Per-algorithm node state. `round` counts completed iterations.

struct FrsdState {
  NodeId node = 0;
  std::size_t round = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd v;  // row of V(k), length n
};

/// Xi-row, FROZEN and D-DNGT share one layout; `s`/`s_prev` stay empty for
/// Xi-row and `s_prev` for FROZEN.
struct RowTrackingState {
  NodeId node = 0;
  std::size_t round = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd s;
  Eigen::VectorXd s_prev;
  Eigen::VectorXd v;
  Eigen::VectorXd scaled_grad;  // grad f_i(x) / [v]_i at the current iterate
};

/// AB, ABm, ABN and Push-Pull (row and column weights). `x_prev` is held by
/// ABm only, `s` by ABN only.
struct PushPullFamilyState {
  NodeId node = 0;
  std::size_t round = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd x_prev;  // ABm momentum
  Eigen::VectorXd y;       // gradient tracker y_i(k)
  Eigen::VectorXd s;       // ABN
  Eigen::VectorXd grad;    // grad f_i(x)
};

struct PushDigingState {
  NodeId node = 0;
  std::size_t round = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  double v = 1.0;
  Eigen::VectorXd grad_z;
};

using NodeState =
    std::variant<FrsdState, RowTrackingState, PushPullFamilyState, PushDigingState>;

/// Scalars actually held in a state (excluding the node id and counter).
std::size_t stored_scalars(const NodeState& state);

struct Broadcast {
  std::vector<double> payload;
};

/// One received message: the sender's payload and the receiver's weights for
/// that sender (r_ij and b_ij; the self-echo has sender == receiver).
struct InboxEntry {
  NodeId sender = 0;
  double row_weight = 0.0;
  double col_weight = 0.0;
  std::span<const double> payload;
};

struct Inbox {
  std::span<const InboxEntry> entries;
  bool has_row_weights = false;
  bool has_col_weights = false;
};

struct StepResult {
  NodeState state;
  Broadcast broadcast;
};

/// A node-local message-passing state machine.
///
/// An iteration consists of phases() exchanges. In each phase every node
/// consumes the snapshot of its closed in-neighborhood's last broadcasts and
/// emits the payload for the next exchange. Steps are pure.
class Protocol {
 public:
  virtual ~Protocol() = default;

  virtual Algorithm algorithm() const = 0;
  virtual std::size_t phases() const { return 1; }
  /// Length of the payload emitted before `phase` of an iteration.
  virtual std::size_t payload_size(std::size_t phase, std::size_t n, std::size_t p) const;

  virtual NodeState init(NodeId i, std::size_t n, const Eigen::VectorXd& x0,
                         const LocalObjective& f, const HyperParams& hp) const = 0;
  /// Payload consumed by phase 0 of iteration 0.
  virtual Broadcast initial_broadcast(const NodeState& state,
                                      const HyperParams& hp) const = 0;
  /// Throws MissingWeights or DegenerateEigenvalue.
  virtual StepResult step(const NodeState& state, std::size_t phase, const Inbox& inbox,
                          const LocalObjective& f, const HyperParams& hp) const = 0;
  /// The node's current estimate of the minimizer.
  virtual const Eigen::VectorXd& decision(const NodeState& state) const;
};

std::unique_ptr<Protocol> make_protocol(Algorithm a, ProtocolOptions options = {});

// ---------------------------------------------------------------------------
// FRSD, usable without the Protocol indirection.

/// x = x0, y = 0, v = e_i.
FrsdState frsd_init(NodeId i, const Eigen::VectorXd& x0, std::size_t n);

/// One FRSD round: with mix_x = sum_j r_ij x_j and mix_v = sum_j r_ij v_j,
///   y+ = y + beta (x - mix_x)                (skipped in round 0)
///   x+ = mix_x - alpha (grad f_i(x) / [v]_i + y+)
///   v+ = mix_v
/// and broadcasts (x+, v+). The corrected-step variant scales the whole
/// bracket by [v]_i instead. Throws DegenerateEigenvalue if [v]_i < 1e-12.
StepResult frsd_step(const FrsdState& state, const Inbox& inbox, const LocalObjective& f,
                     const HyperParams& hp, bool corrected_step = false,
                     bool debias = true);

}  // namespace frsd
