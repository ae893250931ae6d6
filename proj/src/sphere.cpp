#include "ucdyn/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ucdyn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateTail: return "DegenerateTail";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::NeedTwoCreators: return "NeedTwoCreators";
    case ErrorKind::FileFormat: return "FileFormat";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::OracleViolation: return "OracleViolation";
    case ErrorKind::Io: return "IoError";
  }
  return "Unknown";
}

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                "dimensions " + std::to_string(a) + " and " + std::to_string(b) + " differ");
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_dim(x.size(), y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

UnitVector UnitVector::from_unit(std::vector<double> coords) {
  if (coords.size() < 2) {
    throw Error(ErrorKind::DimensionMismatch, "unit vectors need d >= 2");
  }
  const double n = norm(coords);
  if (std::abs(n - 1.0) > kNormTolerance) {
    throw Error(ErrorKind::Validation, "vector norm " + std::to_string(n) + " is not 1");
  }
  return UnitVector(std::move(coords));
}

UnitVector UnitVector::operator-() const {
  UnitVector r = *this;
  for (double& c : r.coords_) c = -c;
  return r;
}

UnitVector project(std::span<const double> x) {
  if (x.size() < 2) {
    throw Error(ErrorKind::DimensionMismatch, "unit vectors need d >= 2");
  }
  const double n = norm(x);
  if (!(n > kZeroNorm)) {
    throw Error(ErrorKind::ZeroVector, "cannot project a vector of norm " + std::to_string(n));
  }
  std::vector<double> out(x.begin(), x.end());
  for (double& c : out) c /= n;
  return UnitVector(std::move(out));
}

double inner(const UnitVector& x, const UnitVector& y) { return dot(x.coords(), y.coords()); }

double inner_clamped(const UnitVector& x, const UnitVector& y) {
  return std::clamp(inner(x, y), -1.0, 1.0);
}

double sq_distance(const UnitVector& x, const UnitVector& y) {
  require_same_dim(x.dim(), y.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double diff = x[i] - y[i];
    s += diff * diff;
  }
  return s;
}

double distance(const UnitVector& x, const UnitVector& y) { return std::sqrt(sq_distance(x, y)); }

std::pair<double, double> sq_distance_identity_check(const UnitVector& x, const UnitVector& y) {
  return {sq_distance(x, y), 2.0 * (1.0 - inner(x, y))};
}

}  // namespace ucdyn
