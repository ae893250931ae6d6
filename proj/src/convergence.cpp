#include "ucdyn/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace ucdyn {

namespace {

constexpr std::size_t kRefineIterations = 100;

std::vector<double> gaussian(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(d);
  for (double& c : x) c = normal(rng);
  return x;
}

UnitVector random_unit(std::size_t d, std::mt19937_64& rng) {
  while (true) {
    auto x = gaussian(d, rng);
    if (norm(x) > kZeroNorm) return project(x);
  }
}

std::vector<double> mean_of(const std::vector<UnitVector>& pts) {
  std::vector<double> s(pts.front().dim(), 0.0);
  for (const auto& p : pts) {
    for (std::size_t k = 0; k < s.size(); ++k) s[k] += p[k];
  }
  return s;
}

double max_distance(const std::vector<UnitVector>& pts, const UnitVector& c) {
  double r = 0.0;
  for (const auto& p : pts) r = std::max(r, distance(p, c));
  return r;
}

// Best center found among the normalized mean and a few Badoiu-Clarkson minimax
// iterations started from it. Returns nullopt when the mean vanishes.
std::optional<std::pair<UnitVector, double>> propose_center(const std::vector<UnitVector>& pts,
                                                            double target) {
  const auto s = mean_of(pts);
  if (!(norm(s) > kZeroNorm)) return std::nullopt;
  UnitVector best = project(s);
  double best_r = max_distance(pts, best);
  if (best_r <= target) return std::make_pair(best, best_r);

  UnitVector c = best;
  for (std::size_t it = 1; it <= kRefineIterations; ++it) {
    const UnitVector* far = &pts.front();
    double far_d = -1.0;
    for (const auto& p : pts) {
      const double dd = distance(p, c);
      if (dd > far_d) {
        far_d = dd;
        far = &p;
      }
    }
    std::vector<double> next(c.dim());
    const double w = 1.0 / static_cast<double>(it + 1);
    for (std::size_t k = 0; k < next.size(); ++k) next[k] = c[k] + w * ((*far)[k] - c[k]);
    if (!(norm(next) > kZeroNorm)) break;
    c = project(next);
    const double r = max_distance(pts, c);
    if (r < best_r) {
      best_r = r;
      best = c;
    }
  }
  return std::make_pair(best, best_r);
}

std::vector<UnitVector> all_vectors(const SystemState& state) {
  std::vector<UnitVector> pts;
  pts.reserve(state.num_users() + state.num_creators());
  pts.insert(pts.end(), state.creators.begin(), state.creators.end());
  pts.insert(pts.end(), state.users.begin(), state.users.end());
  return pts;
}

std::string describe(const std::vector<double>& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

std::string describe(const UnitVector& x) {
  return describe(std::vector<double>(x.coords().begin(), x.coords().end()));
}

// Records one instance's margins into the report.
void tally(OracleReport& rep, std::span<const double> margins, double slack,
           const std::function<std::string()>& instance) {
  ++rep.trials;
  const double worst = *std::min_element(margins.begin(), margins.end());
  rep.worst_margin = std::min(rep.worst_margin, worst);
  if (worst < -slack) {
    if (rep.violations == 0) rep.counterexample = instance();
    ++rep.violations;
  }
}

}  // namespace

std::string to_string(PolarizationReport::Kind kind) {
  switch (kind) {
    case PolarizationReport::Kind::None: return "none";
    case PolarizationReport::Kind::Consensus: return "consensus";
    case PolarizationReport::Kind::Bipolar: return "bipolar";
    case PolarizationReport::Kind::Clusters: return "clusters";
  }
  return "none";
}

double consensus_residual(const SystemState& state, const UnitVector& c) {
  double r = 0.0;
  for (const auto& x : state.users) r = std::max(r, distance(x, c));
  for (const auto& x : state.creators) r = std::max(r, distance(x, c));
  return r;
}

double bipolar_residual(const SystemState& state, const UnitVector& c) {
  const UnitVector neg = -c;
  double r = 0.0;
  auto visit = [&](const UnitVector& x) {
    r = std::max(r, std::min(distance(x, c), distance(x, neg)));
  };
  for (const auto& x : state.users) visit(x);
  for (const auto& x : state.creators) visit(x);
  return r;
}

PolarizationReport detect_consensus(const SystemState& state, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::Validation, "radius must be > 0");
  PolarizationReport rep;
  rep.radius_used = radius;
  const auto pts = all_vectors(state);
  const auto proposal = propose_center(pts, radius);
  if (!proposal) return rep;
  rep.max_residual = consensus_residual(state, proposal->first);
  if (rep.max_residual <= radius) {
    rep.kind = PolarizationReport::Kind::Consensus;
    rep.centers = {proposal->first};
  }
  return rep;
}

PolarizationReport detect_bipolarization(const SystemState& state, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::Validation, "radius must be > 0");
  PolarizationReport rep;
  rep.radius_used = radius;
  if (state.creators.empty()) return rep;
  const UnitVector& ref = state.creators.front();
  auto pts = all_vectors(state);
  for (auto& p : pts) {
    if (inner(p, ref) < 0.0) p = -p;
  }
  const auto proposal = propose_center(pts, radius);
  if (!proposal) return rep;
  rep.max_residual = bipolar_residual(state, proposal->first);
  if (rep.max_residual <= radius) {
    rep.kind = PolarizationReport::Kind::Bipolar;
    rep.centers = {proposal->first};
  }
  return rep;
}

PolarizationReport detect_clusters(const SystemState& state, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::Validation, "radius must be > 0");
  PolarizationReport rep;
  rep.radius_used = radius;
  const auto pts = all_vectors(state);  // creators first, then users
  const std::size_t n = state.num_creators();

  // Two vectors in the same R-ball are at most 2R apart, and vectors in balls whose
  // 2R-enlargements are disjoint are more than 2R apart, so 2R linkage to a leader
  // recovers the balls of any clustered state.
  std::vector<std::size_t> leaders;
  std::vector<std::size_t> label(pts.size());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    bool placed = false;
    for (std::size_t l = 0; l < leaders.size() && !placed; ++l) {
      if (distance(pts[p], pts[leaders[l]]) <= 2.0 * radius) {
        label[p] = l;
        placed = true;
      }
    }
    if (!placed) {
      label[p] = leaders.size();
      leaders.push_back(p);
    }
  }

  std::vector<std::vector<UnitVector>> groups(leaders.size());
  std::vector<bool> has_creator(leaders.size(), false);
  for (std::size_t p = 0; p < pts.size(); ++p) {
    groups[label[p]].push_back(pts[p]);
    if (p < n) has_creator[label[p]] = true;
  }

  std::vector<UnitVector> centers;
  double residual = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    // A group with users but no creator is not a cluster of the recommender system.
    if (!has_creator[g]) return rep;
    const auto proposal = propose_center(groups[g], radius);
    if (!proposal) return rep;
    residual = std::max(residual, proposal->second);
    centers.push_back(proposal->first);
  }
  rep.max_residual = residual;
  if (residual > radius) return rep;
  for (std::size_t a = 0; a < centers.size(); ++a) {
    for (std::size_t b = a + 1; b < centers.size(); ++b) {
      if (!(distance(centers[a], centers[b]) > 4.0 * radius)) return rep;
    }
  }

  rep.kind = PolarizationReport::Kind::Clusters;
  rep.centers = std::move(centers);
  rep.creator_labels.assign(label.begin(), label.begin() + static_cast<std::ptrdiff_t>(n));
  rep.user_labels.assign(label.begin() + static_cast<std::ptrdiff_t>(n), label.end());
  return rep;
}

// --- oracles ----------------------------------------------------------------

std::pair<double, double> convex_cone_margins(const std::vector<UnitVector>& zs,
                                              const std::vector<double>& weights,
                                              const UnitVector& y) {
  if (zs.empty() || zs.size() != weights.size()) {
    throw Error(ErrorKind::Validation, "need one weight per cone generator");
  }
  std::vector<double> s(y.dim(), 0.0);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (weights[i] < 0.0) throw Error(ErrorKind::Validation, "weights must be >= 0");
    require_same_dim(zs[i].dim(), y.dim());
    for (std::size_t k = 0; k < s.size(); ++k) s[k] += weights[i] * zs[i][k];
  }
  const UnitVector x = project(s);  // ZeroVector when every weight is 0
  double min_inner = std::numeric_limits<double>::infinity();
  double max_dist = 0.0;
  for (const auto& z : zs) {
    min_inner = std::min(min_inner, inner(z, y));
    max_dist = std::max(max_dist, distance(z, y));
  }
  return {inner(x, y) - min_inner, max_dist - distance(x, y)};
}

OracleReport oracle_convex_cone(std::size_t trials, std::mt19937_64& rng, double slack) {
  OracleReport rep;
  rep.name = "convex_cone";
  std::uniform_int_distribution<std::size_t> dim_dist(2, 10);
  std::uniform_int_distribution<std::size_t> k_dist(1, 5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t d = dim_dist(rng);
    const std::size_t k = k_dist(rng);
    const UnitVector y = random_unit(d, rng);
    std::vector<UnitVector> zs;
    while (zs.size() < k) {
      UnitVector z = random_unit(d, rng);
      const double s = inner(z, y);
      if (s == 0.0) continue;
      zs.push_back(s > 0.0 ? z : -z);
    }
    std::vector<double> w(k);
    bool any = false;
    while (!any) {
      for (double& a : w) {
        a = unif(rng) < 0.2 ? 0.0 : unif(rng);
        any = any || a > 0.0;
      }
    }
    const auto [m1, m2] = convex_cone_margins(zs, w, y);
    const double margins[] = {m1, m2};
    tally(rep, margins, slack, [&] {
      std::ostringstream os;
      os << "y=" << describe(y) << " weights=" << describe(w);
      for (const auto& z : zs) os << " z=" << describe(z);
      return os.str();
    });
  }
  return rep;
}

std::vector<double> update_bound_margins(const UnitVector& x, std::span<const double> z,
                                         std::span<const double> y, double eta) {
  require_same_dim(x.dim(), z.size());
  require_same_dim(x.dim(), y.size());
  std::vector<double> moved(x.dim());
  for (std::size_t k = 0; k < moved.size(); ++k) moved[k] = x[k] + eta * z[k];
  const UnitVector next = project(moved);
  std::vector<double> delta(x.dim());
  for (std::size_t k = 0; k < delta.size(); ++k) delta[k] = next[k] - x[k];
  const double dn = norm(delta);
  const double zn = norm(z);
  const double gain_bound = eta / (1.0 + eta * zn) * (dot(z, y) - zn * dot(x.coords(), y));
  return {eta * zn - dn, dot(delta, z) - dn * dn / eta, dot(delta, y) - gain_bound};
}

OracleReport oracle_update_bounds(std::size_t trials, std::mt19937_64& rng, double slack) {
  OracleReport rep;
  rep.name = "update_bounds";
  std::uniform_int_distribution<std::size_t> dim_dist(2, 10);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_real_distribution<double> log_eta(std::log(1e-4), std::log(2.0));
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t d = dim_dist(rng);
    const UnitVector x = random_unit(d, rng);
    // z: |z| <= 1 and <x, z> >= 0.
    auto z_dir = random_unit(d, rng);
    if (inner(z_dir, x) < 0.0) z_dir = -z_dir;
    const double z_len = 1.0 - unif(rng);  // (0, 1]
    std::vector<double> z(d);
    for (std::size_t k = 0; k < d; ++k) z[k] = z_len * z_dir[k];
    // y: any length, <x, y> >= 0 and <z, y> >= 0.
    std::vector<double> y;
    do {
      auto y_dir = random_unit(d, rng);
      if (inner(y_dir, x) < 0.0) y_dir = -y_dir;
      const double y_len = 2.0 * unif(rng);
      y.assign(d, 0.0);
      for (std::size_t k = 0; k < d; ++k) y[k] = y_len * y_dir[k];
    } while (dot(z, y) < 0.0);
    const double eta = std::exp(log_eta(rng));

    const auto margins = update_bound_margins(x, z, y, eta);
    tally(rep, margins, slack, [&] {
      return "x=" + describe(x) + " z=" + describe(z) + " y=" + describe(y) +
             " eta=" + std::to_string(eta);
    });
  }
  return rep;
}

std::size_t single_creator_steps(double eta_u, double lower_bound, std::size_t audience,
                                 double radius) {
  const double log_term = std::log(2.0 * static_cast<double>(audience) / (radius * radius));
  if (!(log_term > 0.0)) return 0;
  return static_cast<std::size_t>(std::ceil(8.0 / (3.0 * eta_u * lower_bound) * log_term));
}

OracleReport oracle_single_creator_bound(std::size_t instances, const SingleCreatorParams& p,
                                         std::mt19937_64& rng, double slack) {
  OracleReport rep;
  rep.name = p.flipped_users ? "single_creator_bipolar" : "single_creator_bound";
  if (!(p.eta_u < 0.5) || p.eta_c > p.eta_u * p.a / 2.0) {
    throw Error(ErrorKind::Validation, "need eta_u < 1/2 and eta_c <= eta_u L_f / 2");
  }
  const auto f = UserImpactSpec::sign_affine(p.a, p.b);
  const auto g = CreatorImpactSpec::sign();
  const RateSpec rates{p.eta_u, p.eta_c, 0};
  const std::size_t horizon = single_creator_steps(p.eta_u, p.a, p.audience, p.radius);
  const Assignment all_to_zero(p.audience, std::size_t{0});
  std::bernoulli_distribution coin(0.5);

  for (std::size_t inst = 0; inst < instances; ++inst) {
    SystemState s;
    s.creators.push_back(random_unit(p.dim, rng));
    const UnitVector& v0 = s.creators.front();
    bool flipped_any = false;
    while (s.users.size() < p.audience) {
      UnitVector u = random_unit(p.dim, rng);
      const double ip = inner(u, v0);
      if (ip == 0.0) continue;
      if (ip < 0.0) u = -u;
      // In the flipped variant the last user is forced negative so the family is mixed.
      const bool flip = p.flipped_users &&
                        (coin(rng) || (!flipped_any && s.users.size() + 1 == p.audience));
      flipped_any = flipped_any || flip;
      s.users.push_back(flip ? -u : u);
    }
    const SystemState initial = s;

    // Potential after t steps; for the flipped variant each user is compared with the
    // nearer of +-v.
    auto potential = [&](const SystemState& st) {
      const UnitVector& v = st.creators.front();
      double sum = 0.0;
      for (const auto& u : st.users) {
        const double plus = sq_distance(u, v);
        sum += p.flipped_users ? std::min(plus, sq_distance(u, -v)) : plus;
      }
      return sum;
    };

    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t <= horizon + p.extra_steps; ++t) {
      if (t >= horizon) {
        const double r2 = p.radius * p.radius;
        worst = std::min(worst, r2 - potential(s));
        if (p.flipped_users) worst = std::min(worst, p.radius - bipolar_residual(s, s.creators.front()));
      }
      if (t < horizon + p.extra_steps) s = step(s, all_to_zero, f, g, rates);
    }
    const double margins[] = {worst};
    tally(rep, margins, slack, [&] {
      std::ostringstream os;
      os << "T=" << horizon << " v0=" << describe(initial.creators.front());
      for (const auto& u : initial.users) os << " u0=" << describe(u);
      return os.str();
    });
  }
  return rep;
}

UnitVector sample_at_distance(const UnitVector& center, double chord, std::mt19937_64& rng) {
  const std::size_t d = center.dim();
  // Random unit tangent direction at `center`.
  std::vector<double> w;
  while (true) {
    w = gaussian(d, rng);
    const double along = dot(w, center.coords());
    for (std::size_t k = 0; k < d; ++k) w[k] -= along * center[k];
    if (norm(w) > 1e-6) break;
  }
  const UnitVector tangent = project(w);
  const double theta = 2.0 * std::asin(std::clamp(chord / 2.0, 0.0, 1.0));
  std::vector<double> x(d);
  for (std::size_t k = 0; k < d; ++k) {
    x[k] = std::cos(theta) * center[k] + std::sin(theta) * tangent[k];
  }
  return project(x);
}

OracleReport check_absorbing_bipolar(std::size_t constructions, const AbsorptionParams& p,
                                     std::mt19937_64& rng, double slack) {
  OracleReport rep;
  rep.name = p.consensus ? "absorbing_consensus" : "absorbing_bipolar";
  if (!(p.radius > 0.0) || p.radius > 1.0) {
    throw Error(ErrorKind::Validation, "absorption check needs R in (0, 1]");
  }
  const PolicySpec policy = SoftmaxPolicy{p.beta};
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  for (std::size_t c_idx = 0; c_idx < constructions; ++c_idx) {
    const UnitVector c = random_unit(p.d, rng);
    const UnitVector neg = -c;
    auto place = [&](bool negative) {
      return sample_at_distance(negative ? neg : c, p.radius * unif(rng), rng);
    };
    SystemState s;
    for (std::size_t j = 0; j < p.m; ++j) s.users.push_back(place(!p.consensus && coin(rng)));
    for (std::size_t i = 0; i < p.n; ++i) s.creators.push_back(place(!p.consensus && coin(rng)));
    if (!p.consensus) {
      // Both poles populated.
      s.users.front() = place(false);
      s.users.back() = place(true);
    }
    const SystemState initial = s;

    const std::uint64_t seed = rng();
    auto recents = make_recent_lists(policy, p.m);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0;; ++t) {
      const double resid = p.consensus ? consensus_residual(s, c) : bipolar_residual(s, c);
      worst = std::min(worst, p.radius - resid);
      if (t == p.steps) break;
      const auto rows = policy_rows(policy, s, recents);
      const auto assignment = sample_from_rows(rows, SampleKey{seed, c_idx, t}, recents);
      s = step(s, assignment, p.f, p.g, p.rates);
    }
    const double margins[] = {worst};
    tally(rep, margins, slack, [&] {
      return "construction " + std::to_string(c_idx) + " c=" + describe(c) +
             " first user=" + describe(initial.users.front());
    });
  }
  return rep;
}

OracleReport check_absorbing_clusters(std::size_t constructions, const ClusterParams& p,
                                      std::mt19937_64& rng, double slack) {
  OracleReport rep;
  rep.name = "absorbing_clusters";
  if (p.k < 1 || p.k > p.n) throw Error(ErrorKind::KTooLarge, "need 1 <= k <= n");
  const std::size_t q = p.n / p.k;
  const PolicySpec policy = TopKPolicy{p.k, p.beta};
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_ball(0, q - 1);

  for (std::size_t c_idx = 0; c_idx < constructions; ++c_idx) {
    // Centers whose 2R-balls are disjoint.
    std::vector<UnitVector> centers;
    while (centers.size() < q) {
      UnitVector cand = random_unit(p.d, rng);
      bool ok = true;
      for (const auto& c : centers) ok = ok && distance(c, cand) > 4.0 * p.radius;
      if (ok) centers.push_back(std::move(cand));
    }
    // Members sit within R/2 of their center: an R-cluster state whose balls the
    // mean-based detector can certify at radius R.
    auto place = [&](std::size_t ball) {
      return sample_at_distance(centers[ball], 0.5 * p.radius * unif(rng), rng);
    };
    SystemState s;
    std::vector<std::size_t> creator_ball(p.n), user_ball(p.m);
    for (std::size_t i = 0; i < p.n; ++i) {
      // k creators per ball; any remainder (n mod k) is spread over the first balls.
      creator_ball[i] = i < q * p.k ? i / p.k : i % q;
      s.creators.push_back(place(creator_ball[i]));
    }
    for (std::size_t j = 0; j < p.m; ++j) {
      user_ball[j] = j < q ? j : pick_ball(rng);
      s.users.push_back(place(user_ball[j]));
    }

    // Same partition as the construction, up to relabeling.
    auto same_partition = [&](const PolarizationReport& r) {
      if (!r.positive() || r.num_clusters() != q) return false;
      std::vector<std::size_t> to_detected(q, q);
      auto consistent = [&](std::size_t ball, std::size_t label) {
        if (to_detected[ball] == q) to_detected[ball] = label;
        return to_detected[ball] == label;
      };
      for (std::size_t i = 0; i < p.n; ++i) {
        if (!consistent(creator_ball[i], r.creator_labels[i])) return false;
      }
      for (std::size_t j = 0; j < p.m; ++j) {
        if (!consistent(user_ball[j], r.user_labels[j])) return false;
      }
      return true;
    };

    const std::uint64_t seed = rng();
    auto recents = make_recent_lists(policy, p.m);
    double worst = std::numeric_limits<double>::infinity();
    std::string failure;
    for (std::size_t t = 0;; ++t) {
      double resid = 0.0;
      for (std::size_t i = 0; i < p.n; ++i) {
        resid = std::max(resid, distance(s.creators[i], centers[creator_ball[i]]));
      }
      for (std::size_t j = 0; j < p.m; ++j) {
        resid = std::max(resid, distance(s.users[j], centers[user_ball[j]]));
      }
      worst = std::min(worst, p.radius - resid);
      const auto detected = detect_clusters(s, p.radius);
      if (!same_partition(detected) && failure.empty()) {
        failure = "step " + std::to_string(t) + ": detector returned " +
                  to_string(detected.kind) + " with " + std::to_string(detected.num_clusters()) +
                  " clusters";
        worst = std::min(worst, -std::numeric_limits<double>::infinity());
      }
      if (t == p.steps) break;
      const auto rows = policy_rows(policy, s, recents);
      const auto assignment = sample_from_rows(rows, SampleKey{seed, c_idx, t}, recents);
      s = step(s, assignment, p.f, p.g, p.rates);
    }
    const double margins[] = {worst};
    tally(rep, margins, slack, [&] {
      return "construction " + std::to_string(c_idx) +
             (failure.empty() ? std::string(" left its ball") : ": " + failure);
    });
  }
  return rep;
}

}  // namespace ucdyn
