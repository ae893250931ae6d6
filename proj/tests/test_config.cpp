#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "ucdyn/config.hpp"

using namespace ucdyn;

TEST_CASE("minimal config gives the desk-scale defaults") {
  const auto parsed = parse_config("[run]\nreps = 100\n");
  REQUIRE(std::holds_alternative<RunConfig>(parsed));
  const auto& c = std::get<RunConfig>(parsed);
  CHECK(c.d == 10);
  CHECK(c.n == 50);
  CHECK(c.m == 100);
  CHECK(c.horizon == 1000);
  CHECK(c.rates.eta_u == 0.1);
  CHECK(c.rates.eta_c == 0.1);
  CHECK(policy_beta(c.policy) == 1.0);
  CHECK(std::holds_alternative<SoftmaxPolicy>(c.policy));
  CHECK(c.f.kind == UserImpactSpec::Kind::InnerProduct);
}

TEST_CASE("every section is read") {
  const auto parsed = parse_config(R"(
; comment
[system]
d = 3
n = 8
m = 20
[rates]
eta_u = 0.4
eta_c = 0.05
fixed_dims = 1
[impact]
f = sign_affine
a = 0.4
b = 0.3
g = sign
[policy]
kind = diversity
beta = 2
rho = 1.5
list_len = 4
[run]
horizon = 30
reps = 2
seed = 18446744073709551615
record_every = 3
snapshot_every = 10
stop_tp_at_least = 0.99
)");
  const auto& c = std::get<RunConfig>(parsed);
  CHECK(c.d == 3);
  CHECK(c.rates.fixed_dims == 1);
  CHECK(c.f.kind == UserImpactSpec::Kind::SignAffine);
  CHECK(c.f.a == 0.4);
  const auto& p = std::get<DiversityPolicy>(c.policy);
  CHECK(p.rho == 1.5);
  CHECK(p.list_len == 4);
  CHECK(p.beta == 2.0);
  CHECK(c.master_seed == 18446744073709551615ULL);
  CHECK(*c.stop_tp_at_least == 0.99);
}

TEST_CASE("sweep axes") {
  const auto parsed = parse_config("[policy]\nkind = topk\n[sweep]\npolicy.k = [1, 5, 10]\n");
  REQUIRE(std::holds_alternative<SweepSpec>(parsed));
  const auto& s = std::get<SweepSpec>(parsed);
  CHECK(s.num_cells() == 3);
  CHECK(std::get<TopKPolicy>(s.cell(1).policy).k == 5);

  const auto grid = std::get<SweepSpec>(
      parse_config("[policy]\nkind = topk\n[sweep]\npolicy.beta = 1, 3\npolicy.k = 50, 1\n"));
  REQUIRE(grid.num_cells() == 4);
  const auto params = grid.cell_params(1);
  CHECK(params[0].second == "1");
  CHECK(params[1].second == "1");
  const auto c3 = grid.cell(3);
  CHECK(std::get<TopKPolicy>(c3.policy).beta == 3.0);
  CHECK(std::get<TopKPolicy>(c3.policy).k == 1);
}

TEST_CASE("parse errors") {
  auto kind = [](const std::string& text) { return testing::error_kind_of([&] { parse_config(text); }); };
  CHECK(kind("[policy]\nkind = truncation\nettau = 0.5\n") == ErrorKind::Parse);
  CHECK(kind("[system]\nd = ten\n") == ErrorKind::Parse);
  CHECK(kind("[system]\nd = -3\n") == ErrorKind::Parse);
  CHECK(kind("[nonsense]\nx = 1\n") == ErrorKind::Parse);
  CHECK(kind("d = 3\n") == ErrorKind::Parse);
  CHECK(kind("[system]\nd = 3\nd = 4\n") == ErrorKind::Parse);
  CHECK(kind("[policy]\nkind = greedy\n") == ErrorKind::Parse);
  CHECK(kind("[sweep]\npolicy.kk = 1, 2\n") == ErrorKind::Parse);
  CHECK(kind("[sweep]\nrun.reps = 1,,2\n") == ErrorKind::Parse);
}

TEST_CASE("validation errors") {
  auto kind = [](const std::string& text) { return testing::error_kind_of([&] { parse_config(text); }); };
  CHECK(kind("[system]\nd = 1\n") == ErrorKind::Validation);
  CHECK(kind("[system]\nn = 5\n[policy]\nkind = topk\nk = 6\n") == ErrorKind::KTooLarge);
  CHECK(kind("[policy]\nkind = softmax\nk = 3\n") == ErrorKind::Validation);
  CHECK(kind("[impact]\nf = sign_affine\na = 0.8\nb = 0.5\n") == ErrorKind::Validation);
  CHECK(kind("[run]\nhorizon = 10\nrecord_every = 20\n") == ErrorKind::Validation);
  // A bad cell fails the whole sweep up front.
  CHECK(kind("[system]\nn = 5\n[policy]\nkind = topk\n[sweep]\npolicy.k = 1, 9\n") == ErrorKind::KTooLarge);
}

TEST_CASE("load_config resolves init files next to the config") {
  const auto dir = std::filesystem::temp_directory_path() / "ucdyn_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "c.ini") << "[run]\ninit_file = init.txt\n";
  const auto c = std::get<RunConfig>(load_config(dir / "c.ini"));
  CHECK(c.init_file == (dir / "init.txt").string());
  CHECK(testing::error_kind_of([&] { load_config(dir / "missing.ini"); }) == ErrorKind::Io);
  std::filesystem::remove_all(dir);
}
