#include "frsd/protocols.hpp"

#include <array>

#include "frsd/error.hpp"
#include "protocol_support.hpp"

namespace frsd {

namespace {

struct AlgorithmInfo {
  Algorithm algorithm;
  std::string_view name;
};

constexpr std::array<AlgorithmInfo, 10> kAlgorithms{{
    {Algorithm::frsd, "frsd"},
    {Algorithm::frsd_cs, "frsd-cs"},
    {Algorithm::xi_row, "xi-row"},
    {Algorithm::frozen, "frozen"},
    {Algorithm::d_dngt, "d-dngt"},
    {Algorithm::ab, "ab"},
    {Algorithm::abm, "abm"},
    {Algorithm::abn, "abn"},
    {Algorithm::push_pull, "push-pull"},
    {Algorithm::push_diging, "push-diging"},
}};

constexpr std::array<Algorithm, 10> kAll{
    Algorithm::frsd, Algorithm::frsd_cs, Algorithm::xi_row, Algorithm::frozen,
    Algorithm::d_dngt, Algorithm::ab, Algorithm::abm, Algorithm::abn,
    Algorithm::push_pull, Algorithm::push_diging};

}  // namespace

std::string_view algorithm_name(Algorithm a) {
  for (const auto& info : kAlgorithms) {
    if (info.algorithm == a) return info.name;
  }
  throw UnknownAlgorithm("#" + std::to_string(static_cast<int>(a)));
}

Algorithm parse_algorithm(std::string_view name) {
  for (const auto& info : kAlgorithms) {
    if (info.name == name) return info.algorithm;
  }
  throw UnknownAlgorithm(std::string(name));
}

std::span<const Algorithm> all_algorithms() { return kAll; }

std::size_t comm_size(Algorithm a, std::size_t n, std::size_t p) {
  switch (a) {
    case Algorithm::frsd:
    case Algorithm::frsd_cs:
      return p + n;
    case Algorithm::xi_row:
    case Algorithm::frozen:
    case Algorithm::d_dngt:
      return 2 * p + n;
    case Algorithm::push_diging:
      return 2 * p + 1;
    case Algorithm::ab:
    case Algorithm::abm:
    case Algorithm::abn:
    case Algorithm::push_pull:
      return 2 * p;
  }
  throw UnknownAlgorithm("#" + std::to_string(static_cast<int>(a)));
}

std::size_t memory_size(Algorithm a, std::size_t n, std::size_t p) {
  switch (a) {
    case Algorithm::frsd:
    case Algorithm::frsd_cs:
      return 2 * p + n;
    case Algorithm::xi_row:
      return 3 * p + n;
    case Algorithm::frozen:
      return 4 * p + n;
    case Algorithm::d_dngt:
      return 5 * p + n;
    case Algorithm::ab:
    case Algorithm::abm:
    case Algorithm::push_pull:
      return 3 * p;
    case Algorithm::abn:
      return 4 * p;
    case Algorithm::push_diging:
      return 3 * p + 1;
  }
  throw UnknownAlgorithm("#" + std::to_string(static_cast<int>(a)));
}

WeightNeeds required_weights(Algorithm a) {
  switch (a) {
    case Algorithm::frsd:
    case Algorithm::frsd_cs:
    case Algorithm::xi_row:
    case Algorithm::frozen:
    case Algorithm::d_dngt:
      return {.row = true, .column = false};
    case Algorithm::push_diging:
      return {.row = false, .column = true};
    case Algorithm::ab:
    case Algorithm::abm:
    case Algorithm::abn:
    case Algorithm::push_pull:
      return {.row = true, .column = true};
  }
  throw UnknownAlgorithm("#" + std::to_string(static_cast<int>(a)));
}

std::size_t stored_scalars(const NodeState& state) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FrsdState>) {
          return detail::dim(s.x) + detail::dim(s.y) + detail::dim(s.v);
        } else if constexpr (std::is_same_v<S, RowTrackingState>) {
          return detail::dim(s.x) + detail::dim(s.y) + detail::dim(s.s) +
                 detail::dim(s.s_prev) + detail::dim(s.v) + detail::dim(s.scaled_grad);
        } else if constexpr (std::is_same_v<S, PushPullFamilyState>) {
          return detail::dim(s.x) + detail::dim(s.x_prev) + detail::dim(s.y) +
                 detail::dim(s.s) + detail::dim(s.grad);
        } else {
          return detail::dim(s.x) + detail::dim(s.y) + detail::dim(s.z) + 1 +
                 detail::dim(s.grad_z);
        }
      },
      state);
}

std::size_t Protocol::payload_size(std::size_t /*phase*/, std::size_t n,
                                   std::size_t p) const {
  return comm_size(algorithm(), n, p);
}

const Eigen::VectorXd& Protocol::decision(const NodeState& state) const {
  return std::visit([](const auto& s) -> const Eigen::VectorXd& { return s.x; }, state);
}

std::unique_ptr<Protocol> make_protocol(Algorithm a, ProtocolOptions options) {
  switch (a) {
    case Algorithm::frsd:
      return detail::make_frsd(false, options.debias);
    case Algorithm::frsd_cs:
      return detail::make_frsd(true, options.debias);
    case Algorithm::xi_row:
    case Algorithm::frozen:
    case Algorithm::d_dngt:
      return detail::make_row_tracking(a);
    case Algorithm::ab:
    case Algorithm::abm:
    case Algorithm::abn:
    case Algorithm::push_pull:
      return detail::make_push_pull_family(a, options.abm_combine_then_adapt);
    case Algorithm::push_diging:
      return detail::make_push_diging();
  }
  throw UnknownAlgorithm("#" + std::to_string(static_cast<int>(a)));
}

}  // namespace frsd
