#pragma once

// Unit-sphere vector composition: normalization, cosine similarity, weighted
// linear combination (lerp), pairwise slerp and hierarchical slerp.
//
// All functions are pure and thread-safe. Failures throw vl::Error.

#include <cstddef>
#include <span>
#include <vector>

namespace vl {

/// Norms at or below this are treated as a fully cancelled combination.
inline constexpr double kZeroNormEpsilon = 1e-9;
/// Angular tolerance (radians) for the small-angle and antipodal cases.
inline constexpr double kAngleEpsilon = 1e-6;
/// Accepted deviation from norm 1 for vectors that arrive already normalized.
inline constexpr double kUnitTolerance = 1e-6;
inline constexpr std::size_t kDefaultDimension = 512;

/// A finite real vector with Euclidean norm 1.
///
/// The only ways to obtain one are normalize() and from_unit(); both enforce
/// the invariants, so any UnitVector in hand is valid.
class UnitVector {
 public:
  /// Adopts `components` if they are finite and already unit norm within
  /// kUnitTolerance; throws DegenerateVector / InvalidArgument otherwise.
  static UnitVector from_unit(std::vector<double> components);

  std::size_t dimension() const noexcept { return components_.size(); }
  std::span<const double> components() const noexcept { return components_; }
  double operator[](std::size_t i) const { return components_[i]; }

  friend bool operator==(const UnitVector&, const UnitVector&) = default;

 private:
  explicit UnitVector(std::vector<double> components)
      : components_(std::move(components)) {}

  std::vector<double> components_;

  friend UnitVector normalize(std::span<const double> raw);
};

struct WeightedVector {
  UnitVector vector;
  double weight;
};

double norm(std::span<const double> v);

/// Returns raw / |raw|. Throws DegenerateVector if |raw| <= kZeroNormEpsilon
/// and InvalidArgument on non-finite or empty input.
UnitVector normalize(std::span<const double> raw);

/// Dot product clamped to [-1, 1].
double cosine(const UnitVector& a, const UnitVector& b);

/// Angle between two unit vectors, arccos of cosine().
double angle_between(const UnitVector& a, const UnitVector& b);

/// normalize(sum of w_i * v_i). Negative weights are allowed.
UnitVector lerp_combine(std::span<const WeightedVector> items);

/// Geodesic interpolation from v0 (t = 0) to v1 (t = 1).
///
/// Falls back to normalized linear interpolation when the angle between the
/// inputs is below kAngleEpsilon, and throws AntipodalVectors when it is
/// within kAngleEpsilon of pi.
UnitVector slerp2(const UnitVector& v0, const UnitVector& v1, double t);

/// Merges adjacent pairs with slerp2 (t = w_right / (w_left + w_right), merged
/// weight = (w_left + w_right) / 2), carrying an odd trailing element to the
/// end of the next round, until one vector remains.
///
/// Order-dependent: pairing is positional and the input order is used as is.
/// All weights must be strictly positive (NonPositiveWeight otherwise).
UnitVector hierarchical_slerp(std::span<const WeightedVector> items);

}  // namespace vl
