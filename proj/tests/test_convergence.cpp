#include <cmath>
#include <functional>
#include <random>

#include "support.hpp"
#include "ucdyn/convergence.hpp"

using namespace ucdyn;
using doctest::Approx;
using testing::vec;

namespace {

SystemState filled(std::size_t n, std::size_t m, const std::function<UnitVector(bool, std::size_t)>& make) {
  SystemState s;
  for (std::size_t j = 0; j < m; ++j) s.users.push_back(make(false, j));
  for (std::size_t i = 0; i < n; ++i) s.creators.push_back(make(true, i));
  return s;
}

// A positive report must hold up under direct distance computation.
void check_certificate(const SystemState& s, const PolarizationReport& r) {
  if (!r.positive()) return;
  using K = PolarizationReport::Kind;
  if (r.kind == K::Consensus) CHECK(consensus_residual(s, r.centers[0]) <= r.radius_used);
  if (r.kind == K::Bipolar) CHECK(bipolar_residual(s, r.centers[0]) <= r.radius_used);
  if (r.kind == K::Clusters) {
    for (std::size_t j = 0; j < s.num_users(); ++j) {
      CHECK(distance(s.users[j], r.centers[r.user_labels[j]]) <= r.radius_used);
    }
    for (std::size_t i = 0; i < s.num_creators(); ++i) {
      CHECK(distance(s.creators[i], r.centers[r.creator_labels[i]]) <= r.radius_used);
    }
    for (std::size_t a = 0; a < r.centers.size(); ++a) {
      for (std::size_t b = a + 1; b < r.centers.size(); ++b) {
        CHECK(distance(r.centers[a], r.centers[b]) > 4.0 * r.radius_used);
      }
    }
  }
}

}  // namespace

TEST_CASE("consensus detection") {
  const auto c = vec({0.2, 0.4, -0.3, 0.8});
  const auto s = filled(3, 5, [&](bool, std::size_t) { return c; });
  const auto r = detect_consensus(s, 1e-6);
  REQUIRE(r.kind == PolarizationReport::Kind::Consensus);
  CHECK(r.max_residual <= 1e-12);

  std::mt19937_64 rng(1);
  const auto near = filled(6, 12, [&](bool, std::size_t) { return sample_at_distance(c, 0.05, rng); });
  const auto rn = detect_consensus(near, 0.1);
  CHECK(rn.kind == PolarizationReport::Kind::Consensus);
  check_certificate(near, rn);

  const auto split = filled(2, 4, [&](bool, std::size_t k) { return k % 2 ? -c : c; });
  CHECK_FALSE(detect_consensus(split, 0.5).positive());
  // Even split: the mean vanishes.
  CHECK_FALSE(detect_consensus(split, 1.0).positive());
}

TEST_CASE("bipolar detection") {
  const auto c = vec({1, 2, 2});
  const auto split = filled(4, 6, [&](bool, std::size_t k) { return k % 3 ? -c : c; });
  const auto r = detect_bipolarization(split, 0.01);
  REQUIRE(r.kind == PolarizationReport::Kind::Bipolar);
  CHECK(r.max_residual <= 1e-12);

  // Consensus is bi-polarization with one empty pole.
  const auto one = filled(3, 3, [&](bool, std::size_t) { return c; });
  CHECK(detect_bipolarization(one, 0.01).positive());

  const std::vector<UnitVector> basis = {vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})};
  const auto orth = filled(3, 3, [&](bool, std::size_t k) { return basis[k]; });
  CHECK_FALSE(detect_bipolarization(orth, 0.1).positive());
}

TEST_CASE("cluster detection") {
  std::mt19937_64 rng(2);
  const std::vector<UnitVector> centers = {vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})};
  const auto s = filled(6, 9, [&](bool, std::size_t k) {
    return sample_at_distance(centers[k % 3], 0.02, rng);
  });
  const auto r = detect_clusters(s, 0.05);
  REQUIRE(r.kind == PolarizationReport::Kind::Clusters);
  CHECK(r.num_clusters() == 3);
  check_certificate(s, r);
  for (std::size_t j = 0; j < 9; ++j) CHECK(r.user_labels[j] == r.creator_labels[j % 3]);

  const auto single = filled(4, 4, [&](bool, std::size_t) { return sample_at_distance(centers[0], 0.01, rng); });
  CHECK(detect_clusters(single, 0.05).num_clusters() == 1);

  // A user group without a creator is not a cluster of the system.
  SystemState lonely = single;
  lonely.users.push_back(centers[1]);
  CHECK_FALSE(detect_clusters(lonely, 0.05).positive());
}

TEST_CASE("random states are not clustered at small radius") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto s = testing::random_state(50, 100, 10, rng);
    CHECK_FALSE(detect_clusters(s, 0.05).positive());
    CHECK_FALSE(detect_consensus(s, 0.05).positive());
    CHECK_FALSE(detect_bipolarization(s, 0.05).positive());
  }
}

TEST_CASE("detector outputs are certificates and respect inclusion") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const auto c = testing::random_unit(4, rng);
    const double spread = 0.3 * unif(rng);
    const bool mixed = t % 2;
    const auto s = filled(5, 10, [&](bool, std::size_t k) {
      return sample_at_distance(mixed && k % 2 ? -c : c, spread * unif(rng), rng);
    });
    for (double radius : {0.05, 0.1, 0.2}) {
      const auto cons = detect_consensus(s, radius);
      const auto bip = detect_bipolarization(s, radius);
      check_certificate(s, cons);
      check_certificate(s, bip);
      check_certificate(s, detect_clusters(s, radius));
      if (cons.positive()) CHECK(bipolar_residual(s, cons.centers[0]) <= radius);
    }
  }
}

TEST_CASE("convex cone margins") {
  const std::vector<UnitVector> zs = {vec({0.6, 0.8})};
  const auto [a, b] = convex_cone_margins(zs, {1.0}, vec({1, 0}));
  CHECK(a == Approx(0.0));
  CHECK(b == Approx(0.0));
  CHECK(testing::error_kind_of([&] { convex_cone_margins(zs, {0.0}, vec({1, 0})); }) ==
        ErrorKind::ZeroVector);
  std::mt19937_64 rng(5);
  const auto rep = oracle_convex_cone(20000, rng);
  CHECK(rep.trials == 20000);
  CHECK(rep.passed());
}

TEST_CASE("update bound margins") {
  const auto x = vec({0.6, 0.8});
  const std::vector<double> z = {0.6, 0.8}, y = {1.0, 0.0};
  // z = x: no movement, so the last two bounds hold with equality.
  const auto same = update_bound_margins(x, z, y, 0.3);
  CHECK(same[0] == Approx(0.3));
  CHECK(std::abs(same[1]) <= 1e-15);
  CHECK(std::abs(same[2]) <= 1e-15);
  // Displacement vanishes with eta.
  const std::vector<double> z2 = {0.8, -0.6};
  const auto small = update_bound_margins(x, z2, y, 1e-8);
  CHECK(small[0] >= -kOracleSlack);
  CHECK(small[0] <= 1e-8);
  std::mt19937_64 rng(6);
  CHECK(oracle_update_bounds(20000, rng).passed());
}

TEST_CASE("single-creator bound") {
  CHECK(single_creator_steps(0.4, 0.5, 20, 0.1) == 111);
  CHECK(single_creator_steps(0.4, 0.5, 1, 2.0) == 0);
  std::mt19937_64 rng(7);
  CHECK(oracle_single_creator_bound(30, SingleCreatorParams{}, rng).passed());
  SingleCreatorParams flipped;
  flipped.flipped_users = true;
  CHECK(oracle_single_creator_bound(30, flipped, rng).passed());

  SingleCreatorParams bad;
  bad.eta_c = 0.2;
  CHECK(testing::error_kind_of([&] { oracle_single_creator_bound(1, bad, rng); }) ==
        ErrorKind::Validation);
}

TEST_CASE("exact poles stay exact") {
  const auto c = vec({0.1, -0.7, 0.4});
  auto s = filled(6, 10, [&](bool, std::size_t k) { return k % 2 ? -c : c; });
  std::mt19937_64 rng(8);
  const PolicySpec policy = SoftmaxPolicy{1.0};
  for (std::size_t t = 0; t < 100; ++t) {
    const auto a = sample_assignment(s, policy, {}, SampleKey{1, 0, t});
    s = step(s, a, UserImpactSpec::sign_affine(0.5, 0.5), CreatorImpactSpec::sign(), RateSpec{0.4, 0.1, 0});
  }
  CHECK(bipolar_residual(s, c) <= 1e-12);
}

TEST_CASE("absorbing bipolar and consensus states") {
  std::mt19937_64 rng(9);
  AbsorptionParams p;
  p.n = 20;
  p.m = 40;
  p.steps = 100;
  CHECK(check_absorbing_bipolar(10, p, rng).passed());
  p.consensus = true;
  CHECK(check_absorbing_bipolar(5, p, rng).passed());
}

TEST_CASE("absorbing clusters") {
  std::mt19937_64 rng(10);
  ClusterParams p;
  p.n = 20;
  p.m = 40;
  p.k = 5;
  p.steps = 100;
  CHECK(check_absorbing_clusters(5, p, rng).passed());
  p.k = p.n;  // one cluster: consensus absorption
  CHECK(check_absorbing_clusters(3, p, rng).passed());
  p.n = 6;
  p.m = 12;
  p.k = 1;  // singletons
  CHECK(check_absorbing_clusters(3, p, rng).passed());
}
