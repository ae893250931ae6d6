#include "ucdyn/dynamics.hpp"

#include <cmath>
#include <string>

namespace ucdyn {

void SystemState::validate() const {
  if (users.empty() || creators.empty()) {
    throw Error(ErrorKind::Validation, "state needs m >= 1 users and n >= 1 creators");
  }
  const std::size_t d = creators.front().dim();
  for (const auto& v : creators) require_same_dim(v.dim(), d);
  for (const auto& u : users) require_same_dim(u.dim(), d);
}

void RateSpec::validate(std::size_t dim) const {
  if (!std::isfinite(eta_u) || !(eta_u > 0.0)) {
    throw Error(ErrorKind::Validation, "eta_u must be finite and > 0");
  }
  if (!std::isfinite(eta_c) || !(eta_c > 0.0)) {
    throw Error(ErrorKind::Validation, "eta_c must be finite and > 0");
  }
  if (fixed_dims >= dim) {
    throw Error(ErrorKind::Validation, "fixed_dims must be < d");
  }
}

UnitVector user_update(const UnitVector& u, const UnitVector& v, const UserImpactSpec& f,
                       double eta_u) {
  require_same_dim(u.dim(), v.dim());
  const double w = eta_u * eval_f(f, v, u);
  std::vector<double> x(u.dim());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = u[i] + w * v[i];
  return project(x);
}

UnitVector user_update_fixed(const UnitVector& u, const UnitVector& v, const UserImpactSpec& f,
                             double eta_u, std::size_t fixed_dims) {
  require_same_dim(u.dim(), v.dim());
  if (fixed_dims == 0) return user_update(u, v, f, eta_u);
  if (fixed_dims >= u.dim()) {
    throw Error(ErrorKind::Validation, "fixed_dims must be < d");
  }
  const auto uc = u.coords();
  const auto vc = v.coords();
  const auto u_tail = uc.subspan(fixed_dims);
  const double tail_norm = norm(u_tail);
  if (!(tail_norm > kZeroNorm)) {
    throw Error(ErrorKind::DegenerateTail, "free coordinates of the user vector vanish");
  }

  const double w = eta_u * eval_f(f, v, u);
  const std::size_t tail_len = u.dim() - fixed_dims;
  std::vector<double> tail(tail_len);
  for (std::size_t i = 0; i < tail_len; ++i) tail[i] = u_tail[i] + w * vc[fixed_dims + i];
  const double tail_step_norm = norm(tail);
  if (!(tail_step_norm > kZeroNorm)) {
    throw Error(ErrorKind::ZeroVector, "updated free coordinates vanish");
  }

  std::vector<double> out(uc.begin(), uc.end());
  const double scale = tail_norm / tail_step_norm;
  for (std::size_t i = 0; i < tail_len; ++i) out[fixed_dims + i] = tail[i] * scale;
  return UnitVector::from_unit(std::move(out));
}

namespace {

// Shared by creator_update and step: audience given as indices into `users`.
UnitVector creator_update_indexed(const UnitVector& v, std::span<const UnitVector> users,
                                  std::span<const std::size_t> audience,
                                  const CreatorImpactSpec& g, double eta_c) {
  if (audience.empty()) return v;
  std::vector<double> sum(v.dim(), 0.0);
  for (std::size_t j : audience) {
    const UnitVector& u = users[j];
    require_same_dim(u.dim(), v.dim());
    const double w = eval_g(g, u, v);
    if (w == 0.0) continue;
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += w * u[k];
  }
  const double scale = eta_c / static_cast<double>(audience.size());
  std::vector<double> x(v.coords().begin(), v.coords().end());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] += scale * sum[k];
  return project(x);
}

}  // namespace

UnitVector creator_update(const UnitVector& v, std::span<const UnitVector> audience,
                          const CreatorImpactSpec& g, double eta_c) {
  std::vector<std::size_t> idx(audience.size());
  for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
  return creator_update_indexed(v, audience, idx, g, eta_c);
}

SystemState step(const SystemState& state, const Assignment& assignment, const UserImpactSpec& f,
                 const CreatorImpactSpec& g, const RateSpec& rates) {
  const std::size_t m = state.num_users();
  const std::size_t n = state.num_creators();
  if (assignment.size() != m) {
    throw Error(ErrorKind::Validation, "assignment has " + std::to_string(assignment.size()) +
                                           " entries for " + std::to_string(m) + " users");
  }

  std::vector<std::vector<std::size_t>> audiences(n);
  for (std::size_t j = 0; j < m; ++j) {
    if (!assignment[j]) continue;
    if (*assignment[j] >= n) {
      throw Error(ErrorKind::Validation, "user " + std::to_string(j) +
                                             " assigned to missing creator " +
                                             std::to_string(*assignment[j]));
    }
    audiences[*assignment[j]].push_back(j);
  }

  SystemState next;
  next.time = state.time + 1;
  next.users.reserve(m);
  next.creators.reserve(n);

  for (std::size_t j = 0; j < m; ++j) {
    if (!assignment[j]) {
      next.users.push_back(state.users[j]);
      continue;
    }
    try {
      next.users.push_back(user_update_fixed(state.users[j], state.creators[*assignment[j]], f,
                                             rates.eta_u, rates.fixed_dims));
    } catch (const Error& e) {
      throw e.with_context("step " + std::to_string(state.time) + ", user " + std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    try {
      next.creators.push_back(
          creator_update_indexed(state.creators[i], state.users, audiences[i], g, rates.eta_c));
    } catch (const Error& e) {
      throw e.with_context("step " + std::to_string(state.time) + ", creator " +
                           std::to_string(i));
    }
  }
  return next;
}

}  // namespace ucdyn
