#include <gtest/gtest.h>

#include "frsd/error.hpp"
#include "frsd/objectives.hpp"

namespace frsd {
namespace {

TEST(Libsvm, SingleRow) {
  const Dataset ds = parse_libsvm("+1 1:0.5 3:-2");
  ASSERT_EQ(ds.rows.size(), 1u);
  EXPECT_EQ(ds.rows[0].label, 1);
  ASSERT_EQ(ds.rows[0].features.size(), 2u);
  EXPECT_EQ(ds.rows[0].features[1].first, 3u);
  EXPECT_DOUBLE_EQ(ds.rows[0].features[1].second, -2.0);
  EXPECT_EQ(ds.max_index, 3u);
}

TEST(Libsvm, EmptyInput) { EXPECT_TRUE(parse_libsvm("").rows.empty()); }

TEST(Libsvm, MaxIndex) {
  const Dataset ds = parse_libsvm("1 2:1.0\n-1 1:3");
  EXPECT_EQ(ds.rows.size(), 2u);
  EXPECT_EQ(ds.max_index, 2u);
  EXPECT_EQ(ds.rows[1].label, -1);
}

TEST(Libsvm, ZeroLabelMapsToMinusOne) {
  EXPECT_EQ(parse_libsvm("0 1:1").rows[0].label, -1);
}

TEST(Libsvm, Errors) {
  EXPECT_THROW(parse_libsvm("2 1:1"), LabelError);
  EXPECT_THROW(parse_libsvm("1 3:1 2:1"), ParseError);
  EXPECT_THROW(parse_libsvm("1 0:1"), ParseError);
  EXPECT_THROW(parse_libsvm("1 1:abc"), ParseError);
  try {
    parse_libsvm("1 1:1\n\n1 x");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Partition, ShapesAndIntercept) {
  const Dataset ds = synth_logistic_dataset(100, 14, 1);
  const ProblemInstance prob = partition_dataset(ds, 50, 10, 15, 0.01, 2);
  ASSERT_EQ(prob.node_count(), 50u);
  for (const LocalObjective& f : prob.locals()) {
    EXPECT_EQ(f.features().rows(), 10);
    EXPECT_EQ(f.features().cols(), 15);
    EXPECT_TRUE(f.features().col(14).isOnes());
  }
}

TEST(Partition, Deterministic) {
  const Dataset ds = synth_logistic_dataset(60, 5, 3);
  const ProblemInstance a = partition_dataset(ds, 4, 7, 6, 0.01, 5);
  const ProblemInstance b = partition_dataset(ds, 4, 7, 6, 0.01, 5);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.local(i).features(), b.local(i).features());
}

TEST(Partition, DimensionTooSmall) {
  const Dataset ds = parse_libsvm("1 3:1\n-1 1:1");
  EXPECT_THROW(partition_dataset(ds, 2, 2, 3, 0.01, 1), DimensionError);
  EXPECT_NO_THROW(partition_dataset(ds, 2, 2, 4, 0.01, 1));
}

}  // namespace
}  // namespace frsd
