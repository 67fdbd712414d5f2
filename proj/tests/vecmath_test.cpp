#include "vl/vecmath.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/oracles.hpp"
#include "support/test_helpers.hpp"
#include "vl/error.hpp"

using vl::ErrorCode;
using vltest::basis;
using vltest::max_abs_diff;
using vltest::uv;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const vl::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected vl::Error";
  return ErrorCode::kInternal;
}

}  // namespace

TEST(Normalize, ThreeFourFive) {
  const auto v = uv({3, 4});
  EXPECT_DOUBLE_EQ(v[0], 0.6);
  EXPECT_DOUBLE_EQ(v[1], 0.8);
}

TEST(Normalize, Diagonal) {
  const auto v = uv({1, 1});
  EXPECT_NEAR(v[0], 0.70711, 1e-5);
  EXPECT_NEAR(v[1], 0.70711, 1e-5);
  EXPECT_NEAR(vl::norm(v.components()), 1.0, 1e-9);
}

TEST(Normalize, ZeroVectorIsDegenerate) {
  EXPECT_EQ(code_of([] { uv(std::vector<double>(512, 0.0)); }), ErrorCode::kDegenerateVector);
}

TEST(Normalize, RejectsNonFinite) {
  EXPECT_EQ(code_of([] { uv({1.0, NAN}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { uv({INFINITY, 0.0}); }), ErrorCode::kInvalidArgument);
}

TEST(UnitVector, FromUnitChecksNorm) {
  EXPECT_NO_THROW(vl::UnitVector::from_unit({0.6, 0.8}));
  EXPECT_EQ(code_of([] { vl::UnitVector::from_unit({0.6, 0.9}); }), ErrorCode::kInvalidArgument);
}

TEST(Cosine, IdentityOrthogonalAntipodal) {
  const auto e1 = basis(3, 0);
  const auto e2 = basis(3, 1);
  const auto neg = uv({-1, 0, 0});
  EXPECT_DOUBLE_EQ(vl::cosine(e1, e1), 1.0);
  EXPECT_DOUBLE_EQ(vl::cosine(e1, e2), 0.0);
  EXPECT_DOUBLE_EQ(vl::cosine(e1, neg), -1.0);
}

TEST(Cosine, DimensionMismatch) {
  EXPECT_EQ(code_of([] { vl::cosine(basis(2, 0), basis(3, 0)); }), ErrorCode::kDimensionMismatch);
}

TEST(LerpCombine, SingleItemIdentity) {
  const auto e1 = basis(4, 0);
  const std::vector<vl::WeightedVector> items{{e1, 1.0}};
  EXPECT_LT(max_abs_diff(vl::lerp_combine(items), e1), 1e-12);
}

TEST(LerpCombine, WorkedPair) {
  // Frozen from tests/oracle/derive_constants.py: (1.0, 0.6) / sqrt(1.36).
  const std::vector<vl::WeightedVector> items{{basis(2, 0), 1.0}, {basis(2, 1), 0.6}};
  const auto v = vl::lerp_combine(items);
  EXPECT_NEAR(v[0], 0.85749, 1e-4);
  EXPECT_NEAR(v[1], 0.51450, 1e-4);
}

TEST(LerpCombine, ExactCancellationIsDegenerate) {
  const std::vector<vl::WeightedVector> items{{basis(2, 0), 1.0}, {basis(2, 0), -1.0}};
  EXPECT_EQ(code_of([&] { vl::lerp_combine(items); }), ErrorCode::kDegenerateVector);
}

TEST(LerpCombine, MixedDimensions) {
  const std::vector<vl::WeightedVector> items{{basis(2, 0), 1.0}, {basis(3, 0), 1.0}};
  EXPECT_EQ(code_of([&] { vl::lerp_combine(items); }), ErrorCode::kDimensionMismatch);
}

TEST(LerpCombine, EmptyInput) {
  EXPECT_EQ(code_of([] { vl::lerp_combine({}); }), ErrorCode::kInvalidArgument);
}

TEST(LerpCombine, PermutationInvariant) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<vl::WeightedVector> items;
    std::uniform_real_distribution<double> weight(-2.0, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      items.push_back({vl::normalize(oracle::random_unit(rng, 16)), weight(rng)});
    }
    items.front().weight = 3.0;
    const auto base = vl::lerp_combine(items);
    std::shuffle(items.begin(), items.end(), rng);
    EXPECT_LT(max_abs_diff(vl::lerp_combine(items), base), 1e-12);
  }
}

TEST(Slerp2, Endpoints) {
  const auto a = uv({1, 2, 3});
  const auto b = uv({-2, 1, 0.5});
  EXPECT_LT(max_abs_diff(vl::slerp2(a, b, 0.0), a), 1e-9);
  EXPECT_LT(max_abs_diff(vl::slerp2(a, b, 1.0), b), 1e-9);
}

TEST(Slerp2, OrthogonalMidpoint) {
  const auto v = vl::slerp2(basis(2, 0), basis(2, 1), 0.5);
  EXPECT_NEAR(v[0], 0.70711, 1e-5);
  EXPECT_NEAR(v[1], 0.70711, 1e-5);
}

TEST(Slerp2, ThreeQuarters) {
  // (cos 3pi/8, sin 3pi/8), frozen from the numpy oracle.
  const auto v = vl::slerp2(basis(2, 0), basis(2, 1), 0.75);
  EXPECT_NEAR(v[0], 0.38268, 1e-4);
  EXPECT_NEAR(v[1], 0.92388, 1e-4);
}

TEST(Slerp2, AntipodalRejected) {
  EXPECT_EQ(code_of([] { vl::slerp2(basis(3, 0), uv({-1, 0, 0}), 0.5); }), ErrorCode::kAntipodalVectors);
}

TEST(Slerp2, ParameterOutsideUnitInterval) {
  EXPECT_EQ(code_of([] { vl::slerp2(basis(2, 0), basis(2, 1), 1.5); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { vl::slerp2(basis(2, 0), basis(2, 1), -0.1); }), ErrorCode::kInvalidArgument);
}

TEST(Slerp2, IdenticalInputsUseLinearFallback) {
  const auto a = uv({0.3, -0.2, 0.9});
  EXPECT_LT(max_abs_diff(vl::slerp2(a, a, 0.37), a), 1e-12);
}

TEST(Slerp2, SmallAngleApproachesLerp) {
  std::mt19937_64 rng(3);
  for (double omega : {5e-5, 1e-5, 2e-6, 5e-7}) {
    const auto a = oracle::random_unit(rng, 8);
    const auto b = oracle::at_angle(rng, a, omega);
    for (double t : {0.1, 0.5, 0.9}) {
      const auto s = vl::slerp2(vl::normalize(a), vl::normalize(b), t);
      const auto l = oracle::unit(oracle::plus(oracle::scaled(a, 1 - t), oracle::scaled(b, t)));
      EXPECT_LT(max_abs_diff(s, l), 1e-6) << "omega=" << omega;
    }
  }
}

TEST(Slerp2, GeodesicPropertyMatchesOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(0.01, std::numbers::pi - 0.01);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 2 + rng() % 30;
    const auto a = oracle::random_unit(rng, d);
    const double omega = angle(rng);
    const auto b = oracle::at_angle(rng, a, omega);
    const double t = unit01(rng);
    const auto s = vl::slerp2(vl::normalize(a), vl::normalize(b), t);
    EXPECT_NEAR(vl::norm(s.components()), 1.0, 1e-9);
    EXPECT_NEAR(std::acos(vl::cosine(vl::normalize(a), s)), t * omega, 1e-6);
    EXPECT_LT(max_abs_diff(s, oracle::slerp(a, b, t)), 1e-9);
  }
}

TEST(HierarchicalSlerp, SingleItem) {
  const auto v = uv({1, 2, 2});
  const std::vector<vl::WeightedVector> items{{v, 4.0}};
  EXPECT_EQ(vl::hierarchical_slerp(items), v);
}

TEST(HierarchicalSlerp, PairUsesRightWeightFraction) {
  const std::vector<vl::WeightedVector> items{{basis(2, 0), 1.0}, {basis(2, 1), 3.0}};
  const auto v = vl::hierarchical_slerp(items);
  EXPECT_NEAR(v[0], 0.38268, 1e-4);
  EXPECT_NEAR(v[1], 0.92388, 1e-4);
}

TEST(HierarchicalSlerp, ThreeBasisVectorsMatchSecondTranscription) {
  const std::vector<vl::WeightedVector> items{{basis(3, 0), 1}, {basis(3, 1), 1}, {basis(3, 2), 1}};
  const auto expected = oracle::hierarchical_slerp({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {1, 1, 1});
  const auto v = vl::hierarchical_slerp(items);
  EXPECT_LT(max_abs_diff(v, expected), 1e-9);
  // Frozen numpy value: the odd element joins in the second round at t = 1/2.
  EXPECT_NEAR(v[0], 0.5, 1e-12);
  EXPECT_NEAR(v[1], 0.5, 1e-12);
  EXPECT_NEAR(v[2], std::sqrt(0.5), 1e-12);
}

TEST(HierarchicalSlerp, OrderMatters) {
  const std::vector<vl::WeightedVector> abc{{basis(3, 0), 1}, {basis(3, 1), 1}, {basis(3, 2), 1}};
  const std::vector<vl::WeightedVector> cab{{basis(3, 2), 1}, {basis(3, 0), 1}, {basis(3, 1), 1}};
  EXPECT_GT(max_abs_diff(vl::hierarchical_slerp(abc), vl::hierarchical_slerp(cab)), 1e-3);
}

TEST(HierarchicalSlerp, RejectsNonPositiveWeights) {
  const std::vector<vl::WeightedVector> zero{{basis(2, 0), 1.0}, {basis(2, 1), 0.0}};
  const std::vector<vl::WeightedVector> negative{{basis(2, 0), 1.0}, {basis(2, 1), -1.0}};
  EXPECT_EQ(code_of([&] { vl::hierarchical_slerp(zero); }), ErrorCode::kNonPositiveWeight);
  EXPECT_EQ(code_of([&] { vl::hierarchical_slerp(negative); }), ErrorCode::kNonPositiveWeight);
}

TEST(HierarchicalSlerp, PropagatesAntipodal) {
  const std::vector<vl::WeightedVector> items{{basis(2, 0), 1.0}, {uv({-1, 0}), 1.0}};
  EXPECT_EQ(code_of([&] { vl::hierarchical_slerp(items); }), ErrorCode::kAntipodalVectors);
}

TEST(HierarchicalSlerp, IdenticalInputsReturnThatVector) {
  const auto v = uv({0.1, 0.7, -0.2, 0.4});
  std::vector<vl::WeightedVector> items;
  for (int i = 0; i < 7; ++i) items.push_back({v, 1.0 + i});
  EXPECT_LT(max_abs_diff(vl::hierarchical_slerp(items), v), 1e-9);
  EXPECT_LT(max_abs_diff(vl::lerp_combine(items), v), 1e-9);
}
