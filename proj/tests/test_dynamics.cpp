#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"
#include "ucdyn/dynamics.hpp"

using namespace ucdyn;
using doctest::Approx;
using testing::vec;

namespace {

const auto kInner = UserImpactSpec::inner_product();
const auto kSign = CreatorImpactSpec::sign();

// Straight transcription of the update rules, written independently of the library.
std::vector<double> naive_normalize(std::vector<double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  s = std::sqrt(s);
  for (double& c : x) c /= s;
  return x;
}

double naive_dot(const UnitVector& a, const UnitVector& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) s += a[k] * b[k];
  return s;
}

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

SystemState naive_step(const SystemState& s, const Assignment& a, double eta_u, double eta_c) {
  SystemState out = s;
  out.time = s.time + 1;
  const std::size_t d = s.dim();
  for (std::size_t j = 0; j < s.users.size(); ++j) {
    if (!a[j]) continue;
    const auto& v = s.creators[*a[j]];
    const double fv = naive_dot(v, s.users[j]);
    std::vector<double> x(d);
    for (std::size_t k = 0; k < d; ++k) x[k] = s.users[j][k] + eta_u * fv * v[k];
    out.users[j] = UnitVector::from_unit(naive_normalize(x));
  }
  for (std::size_t i = 0; i < s.creators.size(); ++i) {
    std::vector<double> acc(d, 0.0);
    std::size_t count = 0;
    for (std::size_t j = 0; j < s.users.size(); ++j) {
      if (!a[j] || *a[j] != i) continue;
      ++count;
      const double gv = sgn(naive_dot(s.users[j], s.creators[i]));
      for (std::size_t k = 0; k < d; ++k) acc[k] += gv * s.users[j][k];
    }
    if (count == 0) continue;
    std::vector<double> x(d);
    for (std::size_t k = 0; k < d; ++k) {
      x[k] = s.creators[i][k] + eta_c / static_cast<double>(count) * acc[k];
    }
    out.creators[i] = UnitVector::from_unit(naive_normalize(x));
  }
  return out;
}

Assignment random_assignment(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, n);  // n means "none"
  Assignment a(m);
  for (auto& x : a) {
    const std::size_t i = pick(rng);
    if (i < n) x = i;
  }
  return a;
}

double max_coord_diff(const UnitVector& a, const UnitVector& b) {
  double r = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) r = std::max(r, std::abs(a[k] - b[k]));
  return r;
}

}  // namespace

TEST_CASE("user update worked example") {
  // u + 0.1 * 0.6 * v = (0.66, 0.8), then normalize.
  const auto u = user_update(vec({0.6, 0.8}), vec({1, 0}), kInner, 0.1);
  const double len = std::sqrt(0.66 * 0.66 + 0.8 * 0.8);
  CHECK(u[0] == Approx(0.66 / len).epsilon(1e-14));
  CHECK(u[1] == Approx(0.8 / len).epsilon(1e-14));
  CHECK(u[0] == Approx(0.636383).epsilon(1e-6));
  CHECK(u[1] == Approx(0.771373).epsilon(1e-6));
}

TEST_CASE("user update fixed points") {
  const auto u = vec({1, 0});
  CHECK(user_update(u, vec({0, 1}), kInner, 0.1) == u);
  const auto w = vec({0.6, 0.8});
  CHECK(max_coord_diff(user_update(w, w, kInner, 0.5), w) <= 1e-15);
}

TEST_CASE("fixed-dimension user update") {
  std::mt19937_64 rng(3);
  const auto u = testing::random_unit(5, rng);
  const auto v = testing::random_unit(5, rng);
  CHECK(user_update_fixed(u, v, kInner, 0.2, 0) == user_update(u, v, kInner, 0.2));

  // k = d - 1: the first d-1 coordinates stay, the last keeps its magnitude.
  const auto w = vec({0.3, 0.4, std::sqrt(0.75)});
  const auto aligned = vec({0.1, -0.5, 0.7});
  const auto r = user_update_fixed(w, aligned, kInner, 0.3, 2);
  CHECK(r[0] == w[0]);
  CHECK(r[1] == w[1]);
  CHECK(r[2] == Approx(w[2]));
  const auto r2 = user_update_fixed(w, testing::random_unit(3, rng), kInner, 0.3, 2);
  CHECK(r2[0] == w[0]);
  CHECK(std::abs(r2[2]) == Approx(std::abs(w[2])));

  // Orthogonal creator: f = 0.
  CHECK(max_coord_diff(user_update_fixed(vec({0, 1, 0}), vec({1, 0, 0}), kInner, 0.3, 1),
                       vec({0, 1, 0})) == 0.0);
}

TEST_CASE("fixed-dimension update keeps the frozen block for random instances") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 500; ++t) {
    const auto u = testing::random_unit(10, rng);
    const auto v = testing::random_unit(10, rng);
    const auto r = user_update_fixed(u, v, UserImpactSpec::sign_affine(0.5, 0.5), 0.4, 5);
    for (std::size_t k = 0; k < 5; ++k) CHECK(r[k] == u[k]);
    double tail_u = 0.0, tail_r = 0.0;
    for (std::size_t k = 5; k < 10; ++k) {
      tail_u += u[k] * u[k];
      tail_r += r[k] * r[k];
    }
    CHECK(std::sqrt(tail_r) == Approx(std::sqrt(tail_u)).epsilon(1e-12));
  }
}

TEST_CASE("fixed-dimension errors") {
  CHECK(testing::error_kind_of([] {
          user_update_fixed(vec({1, 0, 0}), vec({0, 0, 1}), kInner, 0.1, 2);
        }) == ErrorKind::DegenerateTail);
  CHECK(testing::error_kind_of([] {
          user_update_fixed(vec({1, 0, 0}), vec({0, 0, 1}), kInner, 0.1, 3);
        }) == ErrorKind::Validation);
}

TEST_CASE("creator update worked examples") {
  const std::vector<UnitVector> sym = {vec({0.6, 0.8}), vec({0.6, -0.8})};
  const auto v = creator_update(vec({1, 0}), sym, kSign, 0.1);
  CHECK(v[0] == Approx(1.0));
  CHECK(std::abs(v[1]) <= 1e-15);
  CHECK(creator_update(vec({1, 0}), {}, kSign, 0.1) == vec({1, 0}));
  const std::vector<UnitVector> orth = {vec({0, 1})};
  CHECK(creator_update(vec({1, 0}), orth, kSign, 0.1) == vec({1, 0}));
}

TEST_CASE("one step worked example") {
  SystemState s;
  s.users = {vec({0.6, 0.8})};
  s.creators = {vec({1, 0})};
  const auto next = step(s, {std::size_t{0}}, kInner, kSign, RateSpec{0.1, 0.1, 0});
  const double lu = std::sqrt(0.66 * 0.66 + 0.8 * 0.8);
  CHECK(next.users[0][0] == Approx(0.66 / lu).epsilon(1e-14));
  CHECK(next.users[0][1] == Approx(0.8 / lu).epsilon(1e-14));
  // The creator reads the time-t user: v + 0.1 * (0.6, 0.8) = (1.06, 0.08).
  const double lv = std::sqrt(1.06 * 1.06 + 0.08 * 0.08);
  CHECK(next.creators[0][0] == Approx(1.06 / lv).epsilon(1e-14));
  CHECK(next.creators[0][1] == Approx(0.08 / lv).epsilon(1e-14));
  CHECK(next.creators[0][0] == Approx(0.997164).epsilon(1e-6));
  CHECK(next.creators[0][1] == Approx(0.075258).epsilon(1e-5));
  CHECK(next.time == 1);
}

TEST_CASE("no recommendations leave the state alone") {
  std::mt19937_64 rng(5);
  const auto s = testing::random_state(4, 6, 3, rng);
  const auto next = step(s, Assignment(6), kInner, kSign, RateSpec{});
  CHECK(next.users == s.users);
  CHECK(next.creators == s.creators);
  CHECK(next.time == s.time + 1);
}

TEST_CASE("consensus state is a fixed point") {
  SystemState s;
  const auto c = vec({0.2, -0.5, 0.7, 0.1});
  s.users.assign(5, c);
  s.creators.assign(3, c);
  const Assignment a = {0, 1, 2, 0, std::nullopt};
  const auto next = step(s, a, kInner, kSign, RateSpec{0.4, 0.3, 0});
  for (const auto& x : next.users) CHECK(max_coord_diff(x, c) <= 1e-9);
  for (const auto& x : next.creators) CHECK(max_coord_diff(x, c) <= 1e-9);
}

TEST_CASE("step matches a naive transcription on random states") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 300; ++t) {
    const auto s = testing::random_state(1 + t % 6, 1 + t % 9, 2 + t % 5, rng);
    const auto a = random_assignment(s.num_users(), s.num_creators(), rng);
    const auto got = step(s, a, kInner, kSign, RateSpec{0.3, 0.2, 0});
    const auto want = naive_step(s, a, 0.3, 0.2);
    for (std::size_t j = 0; j < s.num_users(); ++j) CHECK(max_coord_diff(got.users[j], want.users[j]) <= 1e-12);
    for (std::size_t i = 0; i < s.num_creators(); ++i) {
      CHECK(max_coord_diff(got.creators[i], want.creators[i]) <= 1e-12);
    }
  }
}

TEST_CASE("step preserves norms and is permutation equivariant and odd") {
  std::mt19937_64 rng(7);
  const auto f = UserImpactSpec::sign_affine(0.5, 0.5);
  for (int t = 0; t < 100; ++t) {
    const auto s = testing::random_state(5, 8, 4, rng);
    const auto a = random_assignment(8, 5, rng);
    const RateSpec rates{0.4, 0.1, 0};
    const auto next = step(s, a, f, kSign, rates);
    for (const auto& x : next.users) CHECK(std::abs(norm(x.coords()) - 1.0) <= 1e-12);
    for (const auto& x : next.creators) CHECK(std::abs(norm(x.coords()) - 1.0) <= 1e-12);

    // Reverse the users and relabel creators by a rotation.
    std::vector<std::size_t> cperm(5);
    std::iota(cperm.begin(), cperm.end(), 0);
    std::rotate(cperm.begin(), cperm.begin() + 2, cperm.end());  // new i holds old cperm[i]
    std::vector<std::size_t> inv(5);
    for (std::size_t i = 0; i < 5; ++i) inv[cperm[i]] = i;
    SystemState p;
    Assignment pa(8);
    for (std::size_t j = 0; j < 8; ++j) {
      p.users.push_back(s.users[7 - j]);
      if (a[7 - j]) pa[j] = inv[*a[7 - j]];
    }
    for (std::size_t i = 0; i < 5; ++i) p.creators.push_back(s.creators[cperm[i]]);
    const auto pn = step(p, pa, f, kSign, rates);
    for (std::size_t j = 0; j < 8; ++j) CHECK(max_coord_diff(pn.users[j], next.users[7 - j]) <= 1e-14);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(max_coord_diff(pn.creators[i], next.creators[cperm[i]]) <= 1e-14);
    }

    // Reflecting every vector reflects the step, since f and g are odd.
    SystemState r = s;
    for (auto& x : r.users) x = -x;
    for (auto& x : r.creators) x = -x;
    const auto rn = step(r, a, f, kSign, rates);
    for (std::size_t j = 0; j < 8; ++j) CHECK(max_coord_diff(rn.users[j], -next.users[j]) <= 1e-14);
    for (std::size_t i = 0; i < 5; ++i) CHECK(max_coord_diff(rn.creators[i], -next.creators[i]) <= 1e-14);
  }
}

TEST_CASE("step argument checks") {
  std::mt19937_64 rng(8);
  const auto s = testing::random_state(2, 3, 3, rng);
  CHECK(testing::error_kind_of([&] { step(s, Assignment(2), kInner, kSign, RateSpec{}); }) ==
        ErrorKind::Validation);
  CHECK(testing::error_kind_of([&] {
          step(s, Assignment{std::size_t{5}, std::nullopt, std::nullopt}, kInner, kSign, RateSpec{});
        }) == ErrorKind::Validation);
  CHECK(testing::error_kind_of([] { RateSpec{0.0, 0.1, 0}.validate(3); }) == ErrorKind::Validation);
  CHECK(testing::error_kind_of([] { RateSpec{0.1, 0.1, 3}.validate(3); }) == ErrorKind::Validation);
}
