#include "vl/vecmath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vl/error.hpp"

namespace vl {
namespace {

void require_same_dimension(std::size_t a, std::size_t b) {
  if (a != b) {
    fail(ErrorCode::kDimensionMismatch,
         "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

void require_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) fail(ErrorCode::kInvalidArgument, "vector has non-finite component");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

UnitVector UnitVector::from_unit(std::vector<double> components) {
  if (components.empty()) fail(ErrorCode::kInvalidArgument, "empty vector");
  require_finite(components);
  const double n = norm(components);
  if (n <= kZeroNormEpsilon) fail(ErrorCode::kDegenerateVector, "zero-norm vector");
  if (std::abs(n - 1.0) > kUnitTolerance) {
    fail(ErrorCode::kInvalidArgument, "vector is not unit norm (|v| = " + std::to_string(n) + ")");
  }
  return UnitVector(std::move(components));
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

UnitVector normalize(std::span<const double> raw) {
  if (raw.empty()) fail(ErrorCode::kInvalidArgument, "empty vector");
  require_finite(raw);
  const double n = norm(raw);
  if (!(n > kZeroNormEpsilon)) {
    fail(ErrorCode::kDegenerateVector, "vector norm " + std::to_string(n) + " is degenerate");
  }
  std::vector<double> out(raw.begin(), raw.end());
  for (double& x : out) x /= n;
  return UnitVector(std::move(out));
}

double cosine(const UnitVector& a, const UnitVector& b) {
  require_same_dimension(a.dimension(), b.dimension());
  return std::clamp(dot(a.components(), b.components()), -1.0, 1.0);
}

double angle_between(const UnitVector& a, const UnitVector& b) {
  return std::acos(cosine(a, b));
}

UnitVector lerp_combine(std::span<const WeightedVector> items) {
  if (items.empty()) fail(ErrorCode::kInvalidArgument, "lerp_combine needs at least one item");
  const std::size_t d = items.front().vector.dimension();
  std::vector<double> sum(d, 0.0);
  for (const auto& [vector, weight] : items) {
    require_same_dimension(d, vector.dimension());
    if (!std::isfinite(weight)) fail(ErrorCode::kInvalidArgument, "non-finite weight");
    for (std::size_t i = 0; i < d; ++i) sum[i] += weight * vector[i];
  }
  return normalize(sum);
}

UnitVector slerp2(const UnitVector& v0, const UnitVector& v1, double t) {
  require_same_dimension(v0.dimension(), v1.dimension());
  if (!(t >= 0.0 && t <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "slerp parameter t must lie in [0, 1]");
  }
  const double omega = angle_between(v0, v1);
  if (omega > std::numbers::pi - kAngleEpsilon) {
    fail(ErrorCode::kAntipodalVectors, "slerp between antipodal vectors is undefined");
  }

  const std::size_t d = v0.dimension();
  std::vector<double> out(d);
  if (omega < kAngleEpsilon) {
    for (std::size_t i = 0; i < d; ++i) out[i] = (1.0 - t) * v0[i] + t * v1[i];
    return normalize(out);
  }
  const double sin_omega = std::sin(omega);
  const double c0 = std::sin((1.0 - t) * omega) / sin_omega;
  const double c1 = std::sin(t * omega) / sin_omega;
  for (std::size_t i = 0; i < d; ++i) out[i] = c0 * v0[i] + c1 * v1[i];
  return normalize(out);
}

UnitVector hierarchical_slerp(std::span<const WeightedVector> items) {
  if (items.empty()) fail(ErrorCode::kInvalidArgument, "hierarchical_slerp needs at least one item");
  const std::size_t d = items.front().vector.dimension();
  for (const auto& item : items) {
    require_same_dimension(d, item.vector.dimension());
    if (!(item.weight > 0.0) || !std::isfinite(item.weight)) {
      fail(ErrorCode::kNonPositiveWeight, "slerp weights must be finite and strictly positive");
    }
  }

  std::vector<WeightedVector> level(items.begin(), items.end());
  while (level.size() > 1) {
    std::vector<WeightedVector> next;
    next.reserve(level.size() / 2 + 1);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      const double w_sum = level[i].weight + level[i + 1].weight;
      const double t = level[i + 1].weight / w_sum;
      next.push_back({slerp2(level[i].vector, level[i + 1].vector, t), w_sum / 2.0});
    }
    if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
    level = std::move(next);
  }
  return std::move(level.front().vector);
}

}  // namespace vl
