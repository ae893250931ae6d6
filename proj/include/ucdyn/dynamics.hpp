#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ucdyn/impact.hpp"
#include "ucdyn/sphere.hpp"

namespace ucdyn {

/// Users and creators at one time step. All vectors share one dimension.
struct SystemState {
  std::vector<UnitVector> users;
  std::vector<UnitVector> creators;
  std::size_t time = 0;

  std::size_t dim() const noexcept { return creators.empty() ? 0 : creators.front().dim(); }
  std::size_t num_users() const noexcept { return users.size(); }
  std::size_t num_creators() const noexcept { return creators.size(); }

  /// Throws Validation/DimensionMismatch when empty or dimensions disagree.
  void validate() const;
};

/// Recommended creator per user; nullopt means the user got no recommendation.
using Assignment = std::vector<std::optional<std::size_t>>;

struct RateSpec {
  double eta_u = 0.1;
  double eta_c = 0.1;
  /// Leading user coordinates held fixed during user updates.
  std::size_t fixed_dims = 0;

  void validate(std::size_t dim) const;
};

UnitVector user_update(const UnitVector& u, const UnitVector& v, const UserImpactSpec& f,
                       double eta_u);

/// User update with the first `fixed_dims` coordinates frozen. f still sees the full
/// vectors; the tail keeps its norm so the result stays on the sphere.
UnitVector user_update_fixed(const UnitVector& u, const UnitVector& v, const UserImpactSpec& f,
                             double eta_u, std::size_t fixed_dims);

/// Creator update from the users it was recommended to. An empty audience is a no-op.
UnitVector creator_update(const UnitVector& v, std::span<const UnitVector> audience,
                          const CreatorImpactSpec& g, double eta_c);

/// One synchronous step: every update reads the time-t vectors, then all are committed.
SystemState step(const SystemState& state, const Assignment& assignment, const UserImpactSpec& f,
                 const CreatorImpactSpec& g, const RateSpec& rates);

}  // namespace ucdyn
