#pragma once

#include <cstddef>
#include <initializer_list>
#include <random>
#include <vector>

#include "doctest.h"
#include "ucdyn/dynamics.hpp"
#include "ucdyn/error.hpp"
#include "ucdyn/sphere.hpp"

namespace testing {

inline ucdyn::UnitVector vec(std::initializer_list<double> xs) {
  return ucdyn::project(std::vector<double>(xs));
}

inline ucdyn::UnitVector random_unit(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> x(d);
  for (double& c : x) c = normal(rng);
  return ucdyn::project(x);
}

inline ucdyn::SystemState random_state(std::size_t n, std::size_t m, std::size_t d,
                                       std::mt19937_64& rng) {
  ucdyn::SystemState s;
  for (std::size_t j = 0; j < m; ++j) s.users.push_back(random_unit(d, rng));
  for (std::size_t i = 0; i < n; ++i) s.creators.push_back(random_unit(d, rng));
  return s;
}

template <class F>
ucdyn::ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const ucdyn::Error& e) {
    return e.kind();
  }
  FAIL("expected a ucdyn::Error");
  return ucdyn::ErrorKind::Io;
}

}  // namespace testing
