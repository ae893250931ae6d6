#pragma once

#include <cstddef>
#include <span>

#include "ucdyn/dynamics.hpp"
#include "ucdyn/policy.hpp"

namespace ucdyn {

/// Diagnostics of one state. Rows are those of the active policy at that state.
struct MeasureRecord {
  std::size_t time = 0;
  double cd = 0.0;  ///< creator diversity: mean pairwise distance between creators
  double rd = 0.0;  ///< recommendation diversity: mean weighted variance of recommended creators
  double rr = 0.0;  ///< recommendation relevance: mean weighted <u, v>
  double tp = 0.0;  ///< tendency to polarization: mean |<v_i, v_k>| over all ordered pairs
};

/// Needs n >= 2 (NeedTwoCreators).
double creator_diversity(std::span<const UnitVector> creators);

/// "none" rows count in the denominator but contribute 0.
double recommendation_diversity(const SystemState& state, std::span<const Row> rows);
double recommendation_relevance(const SystemState& state, std::span<const Row> rows);

/// Includes the diagonal, so the result lies in [1/n, 1].
double tendency_to_polarization(std::span<const UnitVector> creators);

MeasureRecord measure(const SystemState& state, std::span<const Row> rows);

}  // namespace ucdyn
