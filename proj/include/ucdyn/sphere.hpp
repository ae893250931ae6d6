#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ucdyn/error.hpp"

namespace ucdyn {

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kZeroNorm = 1e-12;

/// A point on the unit sphere S^{d-1}, d >= 2.
///
/// The only ways to obtain one are project() (which normalizes) and
/// UnitVector::from_unit() (which checks the norm), so every instance
/// satisfies |norm - 1| <= kNormTolerance.
class UnitVector {
 public:
  UnitVector() = default;

  /// Wraps coordinates that are already unit norm; throws Validation otherwise.
  static UnitVector from_unit(std::vector<double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const noexcept { return coords_[i]; }

  UnitVector operator-() const;

  friend bool operator==(const UnitVector&, const UnitVector&) = default;

 private:
  explicit UnitVector(std::vector<double> coords) : coords_(std::move(coords)) {}
  friend UnitVector project(std::span<const double> x);

  std::vector<double> coords_;
};

double norm(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

/// x / |x|. Throws ZeroVector when |x| <= 1e-12 and DimensionMismatch when d < 2.
UnitVector project(std::span<const double> x);

/// Raw dot product; throws DimensionMismatch. Not clamped.
double inner(const UnitVector& x, const UnitVector& y);

/// inner() clamped to [-1, 1] for acos-style consumers.
double inner_clamped(const UnitVector& x, const UnitVector& y);

double distance(const UnitVector& x, const UnitVector& y);
double sq_distance(const UnitVector& x, const UnitVector& y);

/// Both sides of |x - y|^2 = 2 (1 - <x, y>).
std::pair<double, double> sq_distance_identity_check(const UnitVector& x, const UnitVector& y);

void require_same_dim(std::size_t a, std::size_t b);

}  // namespace ucdyn
