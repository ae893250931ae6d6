#include "ucdyn/impact.hpp"

#include <cmath>
#include <sstream>

namespace ucdyn {

UserImpactSpec UserImpactSpec::inner_product() { return {Kind::InnerProduct, 0.0, 0.0}; }

UserImpactSpec UserImpactSpec::sign_affine(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a > 0.0) || b < 0.0 || a + b > 1.0) {
    throw Error(ErrorKind::Validation, "sign_affine needs a > 0, b >= 0, a + b <= 1");
  }
  return {Kind::SignAffine, a, b};
}

UserImpactSpec UserImpactSpec::sign_only(double a) {
  if (!std::isfinite(a) || !(a > 0.0) || a > 1.0) {
    throw Error(ErrorKind::Validation, "sign_only needs 0 < a <= 1");
  }
  return {Kind::SignOnly, a, 0.0};
}

double UserImpactSpec::lower_bound() const noexcept {
  return kind == Kind::InnerProduct ? 0.0 : a;
}

std::string UserImpactSpec::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::InnerProduct: os << "inner_product"; break;
    case Kind::SignAffine: os << "sign_affine(a=" << a << ",b=" << b << ")"; break;
    case Kind::SignOnly: os << "sign_only(a=" << a << ")"; break;
  }
  return os.str();
}

double eval_f_from_inner(const UserImpactSpec& spec, double vu) {
  switch (spec.kind) {
    case UserImpactSpec::Kind::InnerProduct: return vu;
    case UserImpactSpec::Kind::SignAffine: return sign_of(vu) * spec.a + spec.b * vu;
    case UserImpactSpec::Kind::SignOnly: return sign_of(vu) * spec.a;
  }
  return 0.0;
}

double eval_f(const UserImpactSpec& spec, const UnitVector& v, const UnitVector& u) {
  return eval_f_from_inner(spec, inner(v, u));
}

double eval_g_from_inner(const CreatorImpactSpec&, double uv) { return sign_of(uv); }

double eval_g(const CreatorImpactSpec& spec, const UnitVector& u, const UnitVector& v) {
  return eval_g_from_inner(spec, inner(u, v));
}

}  // namespace ucdyn
