#include <sstream>

#include "support.hpp"
#include "ucdyn/embeddings.hpp"

using namespace ucdyn;
using doctest::Approx;

namespace {

Embeddings parse(const std::string& text) {
  std::istringstream in(text);
  return parse_embeddings(in, "test");
}

}  // namespace

TEST_CASE("header and rows") {
  const auto e = parse("2 1 3\n3 4 0\n1 0 0\n0 0 5\n");
  REQUIRE(e.users.size() == 2);
  REQUIRE(e.creators.size() == 1);
  CHECK(e.users[0][0] == Approx(0.6));
  CHECK(e.users[0][1] == Approx(0.8));
  CHECK(e.users[0][2] == 0.0);
  CHECK(e.creators[0][2] == 1.0);
}

TEST_CASE("comments and blank lines are skipped") {
  const auto e = parse("# generated\n\n1 1 2\n  1 1\n# creator\n-2 0\n");
  CHECK(e.creators[0][0] == -1.0);
}

TEST_CASE("format errors") {
  auto kind = [](const std::string& text) { return testing::error_kind_of([&] { parse(text); }); };
  CHECK(kind("") == ErrorKind::FileFormat);
  CHECK(kind("2 1\n") == ErrorKind::FileFormat);
  CHECK(kind("1 1 2\n1 x\n0 1\n") == ErrorKind::FileFormat);
  CHECK(kind("1 1 2\n1 0 0\n0 1\n") == ErrorKind::FileFormat);
  CHECK(kind("3 2 2\n1 0\n0 1\n1 1\n1 2\n") == ErrorKind::CountMismatch);
  CHECK(kind("1 1 2\n1 0\n0 1\n5 5\n") == ErrorKind::CountMismatch);
  CHECK(kind("1 1 2\n0 0\n0 1\n") == ErrorKind::ZeroVector);
}

TEST_CASE("written states parse back exactly") {
  std::mt19937_64 rng(1);
  const auto s = testing::random_state(3, 5, 4, rng);
  std::ostringstream out;
  write_state(out, s);
  const auto e = parse(out.str());
  REQUIRE(e.users.size() == 5);
  for (std::size_t j = 0; j < 5; ++j) {
    for (std::size_t k = 0; k < 4; ++k) CHECK(e.users[j][k] == Approx(s.users[j][k]).epsilon(1e-15));
  }
}

TEST_CASE("missing file") {
  CHECK(testing::error_kind_of([] { load_embeddings("/nonexistent/ucdyn.txt"); }) == ErrorKind::Io);
}
