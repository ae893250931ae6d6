#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ucdyn/dynamics.hpp"
#include "ucdyn/impact.hpp"
#include "ucdyn/policy.hpp"

namespace ucdyn {

// ---------------------------------------------------------------------------
// Detectors
//
// Consensus, bi-polarization and clusters are defined existentially ("there is a
// c such that every vector is R-close to ..."). The detectors below propose centers
// (normalized means, refined by a few minimax iterations) and only report a positive
// result when every vector is within R of a proposed center. A positive report is
// therefore a certificate; a negative one is not a proof of absence.
// ---------------------------------------------------------------------------

struct PolarizationReport {
  enum class Kind { None, Consensus, Bipolar, Clusters };

  Kind kind = Kind::None;
  std::vector<UnitVector> centers;
  double radius_used = 0.0;
  /// Largest distance from any vector to its assigned center (or its negation, for bipolar).
  double max_residual = 0.0;
  /// Cluster index per user / creator (Clusters only).
  std::vector<std::size_t> user_labels;
  std::vector<std::size_t> creator_labels;

  bool positive() const noexcept { return kind != Kind::None; }
  std::size_t num_clusters() const noexcept { return centers.size(); }
};

std::string to_string(PolarizationReport::Kind kind);

PolarizationReport detect_consensus(const SystemState& state, double radius);
PolarizationReport detect_bipolarization(const SystemState& state, double radius);
PolarizationReport detect_clusters(const SystemState& state, double radius);

/// max over all vectors of |x - c|.
double consensus_residual(const SystemState& state, const UnitVector& c);
/// max over all vectors of min(|x - c|, |x + c|).
double bipolar_residual(const SystemState& state, const UnitVector& c);

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

inline constexpr double kOracleSlack = 1e-9;

struct OracleReport {
  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;
  /// Smallest (most negative) margin observed; violations have margin < -slack.
  double worst_margin = std::numeric_limits<double>::infinity();
  /// Description of the first violating instance, if any.
  std::string counterexample;

  bool passed() const noexcept { return violations == 0; }
};

/// Margins of the convex cone inequalities for x = P(sum a_i z_i):
///   first  = <x, y> - min_i <z_i, y>
///   second = max_i |z_i - y| - |x - y|
/// Throws ZeroVector if every weight is zero.
std::pair<double, double> convex_cone_margins(const std::vector<UnitVector>& zs,
                                              const std::vector<double>& weights,
                                              const UnitVector& y);

OracleReport oracle_convex_cone(std::size_t trials, std::mt19937_64& rng,
                                double slack = kOracleSlack);

/// Margins for x' = P(x + eta z), in order:
///   displacement: eta |z| - |x' - x|
///   pythagorean:  <x' - x, z> - |x' - x|^2 / eta
///   gain:         <x' - x, y> - eta / (1 + eta |z|) (<z, y> - |z| <x, y>)
std::vector<double> update_bound_margins(const UnitVector& x, std::span<const double> z,
                                         std::span<const double> y, double eta);

OracleReport oracle_update_bounds(std::size_t trials, std::mt19937_64& rng,
                                  double slack = kOracleSlack);

/// ceil(8 / (3 eta_u L_f) * ln(2 |J| / R^2)), or 0 when the log is non-positive.
std::size_t single_creator_steps(double eta_u, double lower_bound, std::size_t audience,
                                 double radius);

struct SingleCreatorParams {
  std::size_t audience = 20;  ///< |J|
  double radius = 0.1;        ///< R
  std::size_t dim = 10;
  double eta_u = 0.4;
  double eta_c = 0.1;
  double a = 0.5;  ///< L_f
  double b = 0.5;
  /// Steps simulated past the bound to check the potential stays below R^2.
  std::size_t extra_steps = 100;
  /// Flip the sign of some initial users; the check becomes R-bi-polarization around v^T.
  bool flipped_users = false;
};

/// One lone creator recommended to every user each step. After the bound's T steps,
/// sum_j |u_j - v|^2 <= R^2 (or each user R-close to +-v when flipped) and stays so.
OracleReport oracle_single_creator_bound(std::size_t instances, const SingleCreatorParams& params,
                                         std::mt19937_64& rng, double slack = kOracleSlack);

/// A point whose distance to `center` is exactly `chord` (a random direction on that circle).
UnitVector sample_at_distance(const UnitVector& center, double chord, std::mt19937_64& rng);

struct AbsorptionParams {
  std::size_t n = 50;
  std::size_t m = 100;
  std::size_t d = 10;
  double radius = 0.1;
  std::size_t steps = 200;
  double beta = 1.0;
  UserImpactSpec f = UserImpactSpec::sign_affine(0.5, 0.5);
  CreatorImpactSpec g = CreatorImpactSpec::sign();
  RateSpec rates{0.4, 0.1, 0};
  /// Put every vector near +c (consensus) instead of a mixed +-c split.
  bool consensus = false;
};

/// Builds (R, c)-bi-polarized states and runs softmax steps; a construction violates
/// if any vector ever leaves the R-neighbourhood of +-c (the same c throughout).
OracleReport check_absorbing_bipolar(std::size_t constructions, const AbsorptionParams& params,
                                     std::mt19937_64& rng, double slack = kOracleSlack);

struct ClusterParams {
  std::size_t n = 50;
  std::size_t m = 100;
  std::size_t d = 10;
  std::size_t k = 10;
  double radius = 0.05;
  std::size_t steps = 200;
  double beta = 1.0;
  UserImpactSpec f = UserImpactSpec::inner_product();
  CreatorImpactSpec g = CreatorImpactSpec::sign();
  RateSpec rates{0.1, 0.1, 0};
};

/// Builds floor(n/k) clusters (centers more than 4R apart, k creators each, users spread
/// over the balls) and runs top-k steps; a construction violates if any vector leaves its
/// ball or detect_clusters stops returning the same partition.
OracleReport check_absorbing_clusters(std::size_t constructions, const ClusterParams& params,
                                      std::mt19937_64& rng, double slack = kOracleSlack);

}  // namespace ucdyn
