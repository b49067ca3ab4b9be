#include <cmath>

#include <gtest/gtest.h>

#include "dppselect/allocation.hpp"
#include "dppselect/rng.hpp"

namespace dppselect {
namespace {

RelevanceVector rv(View v, std::initializer_list<double> values) {
  Eigen::VectorXd s(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) s(i++) = x;
  return RelevanceVector{v, s};
}

RelevanceVector constant(View v, Index n, double total) {
  return RelevanceVector{v, Eigen::VectorXd::Constant(n, total / static_cast<double>(n))};
}

TEST(SoftAllocate, SymmetricSplitsEvenly) {
  const BudgetSplit s = soft_allocate(constant(View::Ego, 20, 2.0), constant(View::Exo, 20, 2.0), 16);
  EXPECT_EQ(s, (BudgetSplit{8, 8, 16}));
}

TEST(SoftAllocate, WorkedRatio) {
  const BudgetSplit s = soft_allocate(constant(View::Ego, 10, 3.0), constant(View::Exo, 10, 1.0), 8);
  EXPECT_EQ(s, (BudgetSplit{6, 2, 8}));
}

TEST(SoftAllocate, CapacityCapTransfersOverflow) {
  EXPECT_EQ(soft_allocate(constant(View::Ego, 3, 1.0), constant(View::Exo, 20, 1.0), 10), (BudgetSplit{3, 7, 10}));
  EXPECT_EQ(soft_allocate(constant(View::Ego, 20, 1.0), constant(View::Exo, 2, 1.0), 10), (BudgetSplit{8, 2, 10}));
}

TEST(SoftAllocate, HalvesRoundAwayFromZero) {
  // 5 * 0.5 = 2.5 -> 3
  EXPECT_EQ(soft_allocate(constant(View::Ego, 10, 1.0), constant(View::Exo, 10, 1.0), 5).k_ego, 3);
  // 3 * 0.25 = 0.75 -> 1 ; 2 * 0.25 = 0.5 -> 1
  EXPECT_EQ(soft_allocate(constant(View::Ego, 10, 1.0), constant(View::Exo, 10, 3.0), 3).k_ego, 1);
  EXPECT_EQ(soft_allocate(constant(View::Ego, 10, 1.0), constant(View::Exo, 10, 3.0), 2).k_ego, 1);
}

TEST(SoftAllocate, Errors) {
  try {
    soft_allocate(constant(View::Ego, 3, 1.0), constant(View::Exo, 3, 1.0), 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetExceedsFrames);
  }
  EXPECT_THROW(soft_allocate(constant(View::Ego, 3, 1.0), constant(View::Exo, 3, 1.0), 0), Error);
}

TEST(SoftAllocate, ConservationMonotonicityAndDominance) {
  Rng rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const Index n_e = 1 + static_cast<Index>(rng.below(40));
    const Index n_x = 1 + static_cast<Index>(rng.below(40));
    const Index k = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n_e + n_x)));
    Eigen::VectorXd se(n_e), sx(n_x);
    for (Index i = 0; i < n_e; ++i) se(i) = std::max(1e-6, rng.uniform());
    for (Index i = 0; i < n_x; ++i) sx(i) = std::max(1e-6, rng.uniform());
    const RelevanceVector e{View::Ego, se}, x{View::Exo, sx};
    const BudgetSplit split = soft_allocate(e, x, k);
    EXPECT_EQ(split.k_ego + split.k_exo, k);
    EXPECT_LE(split.k_ego, n_e);
    EXPECT_LE(split.k_exo, n_x);

    const RelevanceVector boosted{View::Ego, se * (1.0 + 3.0 * rng.uniform())};
    EXPECT_GE(soft_allocate(boosted, x, k).k_ego, split.k_ego);

    const double ratio = se.sum() / (se.sum() + sx.sum());
    if (ratio > 1.0 - 1.0 / (2.0 * static_cast<double>(k)) && n_e >= k) EXPECT_EQ(split.k_ego, k);
  }
}

TEST(HardSelect, ElementwiseArgmaxWithEgoTies) {
  const auto mask = hard_select(rv(View::Ego, {0.9, 0.1}), rv(View::Exo, {0.2, 0.8}));
  EXPECT_EQ(mask, (std::vector<View>{View::Ego, View::Exo}));
  const auto ties = hard_select(rv(View::Ego, {0.3, 0.4, 0.5}), rv(View::Exo, {0.3, 0.4, 0.5}));
  EXPECT_EQ(ties, (std::vector<View>{View::Ego, View::Ego, View::Ego}));
}

TEST(HardSelect, RequiresSynchronizedStreams) {
  try {
    hard_select(rv(View::Ego, {0.1, 0.2, 0.3}), rv(View::Exo, {0.1, 0.2, 0.3, 0.4}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsynchronizedStreams);
  }
}

}  // namespace
}  // namespace dppselect
