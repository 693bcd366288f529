#include <gtest/gtest.h>

#include "dense_oracles.hpp"
#include "frsd/digraph.hpp"
#include "frsd/error.hpp"
#include "frsd/mixing.hpp"

namespace frsd {
namespace {

TEST(UniformRow, RowsSumToOneOverClosedNeighborhood) {
  const DiGraph g(3, {{0, 1}, {2, 1}, {1, 0}, {1, 2}});
  const MixingMatrix r = build_uniform_row_stochastic(g);
  EXPECT_DOUBLE_EQ(r(1, 0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r(1, 1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(r(0, 2), 0.0);
  EXPECT_LE((r.weights().rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-15);
}

TEST(UniformColumn, ColumnsSumToOne) {
  const DiGraph g = generate_strongly_connected(15, 0.2, 5);
  const MixingMatrix b = build_uniform_column_stochastic(g);
  EXPECT_LE((b.weights().colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-15);
  for (const Edge& e : g.edges()) EXPECT_GT(b(e.to, e.from), 0.0);
}

TEST(MixingMatrix, RejectsWrongSupport) {
  const DiGraph g = directed_cycle(3);
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(3, 3, 1.0 / 3.0);
  EXPECT_THROW(MixingMatrix(MixingKind::row, w, g), GraphError);
}

TEST(Metropolis, SymmetricDoublyStochastic) {
  const MixingMatrix w = build_metropolis(complete_digraph(5));
  EXPECT_LE((w.weights() - w.weights().transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((w.weights().colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-15);
  EXPECT_THROW(build_metropolis(directed_cycle(3)), GraphError);
}

TEST(Stationary, MatchesDenseEigensolve) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const MixingMatrix r = build_uniform_row_stochastic(generate_strongly_connected(20, 0.1, seed));
    const Eigen::VectorXd pi = stationary_distribution(r).pi;
    EXPECT_LE((pi - testing::dense_stationary(r.weights())).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(pi.sum(), 1.0, 1e-14);
    EXPECT_GT(pi.minCoeff(), 0.0);
  }
}

TEST(Stationary, DenseOverloadAgrees) {
  const MixingMatrix r = build_uniform_row_stochastic(generate_strongly_connected(10, 0.3, 1));
  EXPECT_LE((stationary_distribution(r).pi - stationary_distribution(r.weights()).pi)
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(SpectralGap, MatchesSecondEigenvalueModulus) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const MixingMatrix r = build_uniform_row_stochastic(generate_strongly_connected(25, 0.1, seed));
    const double rho = spectral_gap(r, stationary_distribution(r));
    EXPECT_NEAR(rho, testing::dense_second_eigenvalue_modulus(r.weights()), 1e-6);
    EXPECT_LT(rho, 1.0);
  }
}

TEST(SpectralGap, CompleteGraphMixesInOneStep) {
  const MixingMatrix r = build_uniform_row_stochastic(complete_digraph(6));
  EXPECT_LE(spectral_gap(r, stationary_distribution(r)), 1e-12);
}

}  // namespace
}  // namespace frsd
