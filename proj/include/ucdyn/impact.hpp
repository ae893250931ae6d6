#pragma once

#include <string>

#include "ucdyn/sphere.hpp"

namespace ucdyn {

/// Impact of a creator's content on a user, f(v, u).
///
/// Every family shares the sign of <v, u> and satisfies |f| <= 1.
///   inner_product:     f = <v, u>            (no positive lower bound L_f)
///   sign_affine(a, b): f = sign(<v,u>) a + b <v,u>,  a > 0, b >= 0, a + b <= 1
///   sign_only(a):      f = sign(<v,u>) a,           0 < a <= 1
struct UserImpactSpec {
  enum class Kind { InnerProduct, SignAffine, SignOnly };

  Kind kind = Kind::InnerProduct;
  double a = 0.0;
  double b = 0.0;

  static UserImpactSpec inner_product();
  static UserImpactSpec sign_affine(double a, double b);
  static UserImpactSpec sign_only(double a);

  /// Lower bound on |f| away from orthogonality; 0 for inner_product.
  double lower_bound() const noexcept;
  std::string name() const;
};

/// Impact of a user on a creator, g(u, v). Only the sign function is provided.
struct CreatorImpactSpec {
  enum class Kind { Sign };
  Kind kind = Kind::Sign;

  static CreatorImpactSpec sign() { return {}; }
  std::string name() const { return "sign"; }
};

/// sign(x) with exact zero mapped to 0 (no epsilon band).
inline double sign_of(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// f as a function of the inner product <v, u>.
double eval_f_from_inner(const UserImpactSpec& spec, double vu);
double eval_f(const UserImpactSpec& spec, const UnitVector& v, const UnitVector& u);

double eval_g_from_inner(const CreatorImpactSpec& spec, double uv);
double eval_g(const CreatorImpactSpec& spec, const UnitVector& u, const UnitVector& v);

}  // namespace ucdyn
