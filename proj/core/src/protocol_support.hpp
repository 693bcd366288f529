#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "frsd/error.hpp"
#include "frsd/protocols.hpp"

namespace frsd::detail {

enum class Weights { row, column };

inline void require_weights(const Inbox& inbox, Weights w, Algorithm a) {
  const bool ok = w == Weights::row ? inbox.has_row_weights : inbox.has_col_weights;
  if (!ok) {
    throw MissingWeights(std::string(algorithm_name(a)) + " needs " +
                         (w == Weights::row ? "row" : "column") +
                         "-stochastic weights");
  }
}

inline void require_payload(const Inbox& inbox, std::size_t size) {
  for (const InboxEntry& e : inbox.entries) {
    if (e.payload.size() != size) {
      throw DimensionMismatch("payload from node " + std::to_string(e.sender) +
                              " has " + std::to_string(e.payload.size()) +
                              " scalars, expected " + std::to_string(size));
    }
  }
}

/// sum_j w_ij payload_j[offset, offset + len).
inline Eigen::VectorXd mix(const Inbox& inbox, Weights w, std::size_t offset,
                           std::size_t len) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(len));
  for (const InboxEntry& e : inbox.entries) {
    const double weight = w == Weights::row ? e.row_weight : e.col_weight;
    out += weight * Eigen::Map<const Eigen::VectorXd>(e.payload.data() + offset,
                                                      static_cast<Eigen::Index>(len));
  }
  return out;
}

inline double own_eigenvalue(const Eigen::VectorXd& v, NodeId i) {
  const double value = v[static_cast<Eigen::Index>(i)];
  if (!(value >= kEigenvalueFloor)) {
    throw DegenerateEigenvalue("eigenvector estimate [v_i]_i = " + std::to_string(value) +
                               " fell below the floor");
  }
  return value;
}

inline void require_step_size(const HyperParams& hp) {
  if (!(hp.alpha > 0.0)) throw DomainError("step size alpha must be positive");
  if (!(hp.beta >= 0.0)) throw DomainError("momentum beta must be nonnegative");
}

inline void append(std::vector<double>& out, const Eigen::VectorXd& v) {
  out.insert(out.end(), v.data(), v.data() + v.size());
}

inline std::size_t dim(const Eigen::VectorXd& v) { return static_cast<std::size_t>(v.size()); }

}  // namespace frsd::detail

namespace frsd::detail {

std::unique_ptr<Protocol> make_frsd(bool corrected_step, bool debias);
std::unique_ptr<Protocol> make_row_tracking(Algorithm a);
std::unique_ptr<Protocol> make_push_pull_family(Algorithm a, bool combine_then_adapt);
std::unique_ptr<Protocol> make_push_diging();

}  // namespace frsd::detail
