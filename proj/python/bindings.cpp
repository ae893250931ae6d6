// Python bindings. Vectors cross the boundary as lists of floats and are projected
// onto the sphere on the way in.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "ucdyn/config.hpp"
#include "ucdyn/convergence.hpp"
#include "ucdyn/embeddings.hpp"
#include "ucdyn/engine.hpp"
#include "ucdyn/error.hpp"
#include "ucdyn/harness.hpp"

namespace py = pybind11;
using namespace ucdyn;

namespace {

using Coords = std::vector<double>;

std::vector<UnitVector> to_units(const std::vector<Coords>& xs) {
  std::vector<UnitVector> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(project(x));
  return out;
}

std::vector<Coords> to_lists(const std::vector<UnitVector>& xs) {
  std::vector<Coords> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.emplace_back(x.coords().begin(), x.coords().end());
  return out;
}

SystemState make_state(const std::vector<Coords>& users, const std::vector<Coords>& creators,
                       std::size_t time) {
  SystemState s;
  s.users = to_units(users);
  s.creators = to_units(creators);
  s.time = time;
  s.validate();
  return s;
}

// Thin holder so Python sees one Policy type with named constructors.
struct Policy {
  PolicySpec spec;
};

py::dict record_dict(const MeasureRecord& r) {
  py::dict d;
  d["t"] = r.time;
  d["cd"] = r.cd;
  d["rd"] = r.rd;
  d["rr"] = r.rr;
  d["tp"] = r.tp;
  return d;
}

py::dict trajectory_dict(const Trajectory& tr) {
  py::list records;
  for (const auto& r : tr.records) records.append(record_dict(r));
  py::dict d;
  d["records"] = records;
  d["final_state"] = tr.final_state;
  d["snapshots"] = tr.snapshots;
  d["stopped_early"] = tr.termination == Trajectory::Termination::StopCondition;
  d["stop_step"] = tr.stop_step;
  return d;
}

py::dict report_dict(const PolarizationReport& r) {
  py::dict d;
  d["kind"] = to_string(r.kind);
  d["centers"] = to_lists(r.centers);
  d["radius"] = r.radius_used;
  d["max_residual"] = r.max_residual;
  d["user_labels"] = r.user_labels;
  d["creator_labels"] = r.creator_labels;
  return d;
}

py::dict oracle_dict(const OracleReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["trials"] = r.trials;
  d["violations"] = r.violations;
  d["worst_margin"] = r.worst_margin;
  d["counterexample"] = r.counterexample;
  d["passed"] = r.passed();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "User-creator feature dynamics on the unit sphere";

  static py::exception<Error> error(m, "UcdynError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error.ptr())(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("project", [](const Coords& x) {
    const UnitVector u = project(x);
    return Coords(u.coords().begin(), u.coords().end());
  }, py::arg("x"), "x / |x|; raises UcdynError for a (near) zero vector");

  py::class_<SystemState>(m, "State")
      .def(py::init(&make_state), py::arg("users"), py::arg("creators"), py::arg("time") = 0)
      .def_property_readonly("users", [](const SystemState& s) { return to_lists(s.users); })
      .def_property_readonly("creators", [](const SystemState& s) { return to_lists(s.creators); })
      .def_readonly("time", &SystemState::time)
      .def_property_readonly("dim", &SystemState::dim)
      .def_property_readonly("num_users", &SystemState::num_users)
      .def_property_readonly("num_creators", &SystemState::num_creators)
      .def("__str__", [](const SystemState& s) {
        std::ostringstream out;
        write_state(out, s);
        return out.str();
      })
      .def("save", [](const SystemState& s, const std::filesystem::path& p) { save_state(p, s); });

  m.def("load_embeddings", [](const std::filesystem::path& p) {
    auto e = load_embeddings(p);
    SystemState s;
    s.users = std::move(e.users);
    s.creators = std::move(e.creators);
    return s;
  }, py::arg("path"));

  py::class_<UserImpactSpec>(m, "UserImpact")
      .def_static("inner_product", &UserImpactSpec::inner_product)
      .def_static("sign_affine", &UserImpactSpec::sign_affine, py::arg("a"), py::arg("b"))
      .def_static("sign_only", &UserImpactSpec::sign_only, py::arg("a"))
      .def_property_readonly("lower_bound", &UserImpactSpec::lower_bound)
      .def_property_readonly("name", &UserImpactSpec::name)
      .def("__call__", [](const UserImpactSpec& f, double vu) { return eval_f_from_inner(f, vu); },
           py::arg("inner"));

  py::class_<CreatorImpactSpec>(m, "CreatorImpact")
      .def_static("sign", &CreatorImpactSpec::sign)
      .def_property_readonly("name", &CreatorImpactSpec::name)
      .def("__call__", [](const CreatorImpactSpec& g, double uv) { return eval_g_from_inner(g, uv); },
           py::arg("inner"));

  py::class_<Policy>(m, "Policy")
      .def_static("softmax", [](double beta) { return Policy{SoftmaxPolicy{beta}}; },
                  py::arg("beta") = 1.0)
      .def_static("topk", [](std::size_t k, double beta) { return Policy{TopKPolicy{k, beta}}; },
                  py::arg("k"), py::arg("beta") = 1.0)
      .def_static("truncation",
                  [](double tau, double beta) { return Policy{TruncationPolicy{tau, beta}}; },
                  py::arg("tau"), py::arg("beta") = 1.0)
      .def_static("diversity",
                  [](double rho, double beta, std::size_t list_len) {
                    return Policy{DiversityPolicy{rho, beta, list_len}};
                  },
                  py::arg("rho"), py::arg("beta") = 1.0, py::arg("list_len") = 10)
      .def_static("uniform_mix",
                  [](double eps, double beta) { return Policy{UniformMixPolicy{eps, beta}}; },
                  py::arg("eps"), py::arg("beta") = 1.0)
      .def_property_readonly("name", [](const Policy& p) { return policy_name(p.spec); })
      .def_property_readonly("beta", [](const Policy& p) { return policy_beta(p.spec); });

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("d", &RunConfig::d)
      .def_readwrite("n", &RunConfig::n)
      .def_readwrite("m", &RunConfig::m)
      .def_readwrite("horizon", &RunConfig::horizon)
      .def_readwrite("reps", &RunConfig::reps)
      .def_readwrite("seed", &RunConfig::master_seed)
      .def_readwrite("f", &RunConfig::f)
      .def_readwrite("g", &RunConfig::g)
      .def_readwrite("init_file", &RunConfig::init_file)
      .def_readwrite("record_every", &RunConfig::record_every)
      .def_readwrite("snapshot_every", &RunConfig::snapshot_every)
      .def_readwrite("stop_tp_at_least", &RunConfig::stop_tp_at_least)
      .def_property("eta_u", [](const RunConfig& c) { return c.rates.eta_u; },
                    [](RunConfig& c, double v) { c.rates.eta_u = v; })
      .def_property("eta_c", [](const RunConfig& c) { return c.rates.eta_c; },
                    [](RunConfig& c, double v) { c.rates.eta_c = v; })
      .def_property("fixed_dims", [](const RunConfig& c) { return c.rates.fixed_dims; },
                    [](RunConfig& c, std::size_t v) { c.rates.fixed_dims = v; })
      .def_property("policy", [](const RunConfig& c) { return Policy{c.policy}; },
                    [](RunConfig& c, const Policy& p) { c.policy = p.spec; })
      .def("validate", &RunConfig::validate);

  m.def("parse_config", [](const std::string& text) -> py::object {
    auto parsed = parse_config(text);
    if (auto* c = std::get_if<RunConfig>(&parsed)) return py::cast(*c);
    throw Error(ErrorKind::Validation, "config has a [sweep] section; use run_sweep");
  }, py::arg("text"), "RunConfig from INI text without a [sweep] section");

  m.def("policy_rows", [](const Policy& p, const SystemState& s) {
    validate_policy(p.spec, s.num_creators());
    return policy_rows(p.spec, s, {});
  }, py::arg("policy"), py::arg("state"),
     "Recommendation probabilities per user; None where a user gets no recommendation");

  m.def("measure", [](const SystemState& s, const Policy& p) {
    validate_policy(p.spec, s.num_creators());
    auto rec = measure(s, policy_rows(p.spec, s, {}));
    rec.time = s.time;
    return record_dict(rec);
  }, py::arg("state"), py::arg("policy") = Policy{SoftmaxPolicy{1.0}});

  m.def("sample_assignment",
        [](const SystemState& s, const Policy& p, std::uint64_t seed, std::uint64_t rep,
           std::uint64_t t) {
          validate_policy(p.spec, s.num_creators());
          auto recents = make_recent_lists(p.spec, s.num_users());
          return sample_assignment(s, p.spec, recents, SampleKey{seed, rep, t});
        },
        py::arg("state"), py::arg("policy"), py::arg("seed") = 0, py::arg("rep") = 0,
        py::arg("step") = 0);

  m.def("step",
        [](const SystemState& s, const Assignment& a, const UserImpactSpec& f,
           const CreatorImpactSpec& g, double eta_u, double eta_c, std::size_t fixed_dims) {
          return step(s, a, f, g, RateSpec{eta_u, eta_c, fixed_dims});
        },
        py::arg("state"), py::arg("assignment"), py::arg("f") = UserImpactSpec::inner_product(),
        py::arg("g") = CreatorImpactSpec::sign(), py::arg("eta_u") = 0.1, py::arg("eta_c") = 0.1,
        py::arg("fixed_dims") = 0);

  m.def("run", [](const RunConfig& c, std::size_t rep) {
    Trajectory tr;
    {
      py::gil_scoped_release release;
      tr = run(c, rep);
    }
    return trajectory_dict(tr);
  }, py::arg("config"), py::arg("rep") = 0);

  m.def("run_reps", [](const RunConfig& c, std::size_t parallelism) {
    std::vector<Trajectory> trs;
    {
      py::gil_scoped_release release;
      trs = run_reps(c, parallelism);
    }
    py::list out;
    for (const auto& tr : trs) out.append(trajectory_dict(tr));
    return out;
  }, py::arg("config"), py::arg("parallelism") = 1);

  m.def("run_sweep", [](const std::string& text, std::size_t parallelism) {
    const SweepSpec spec = as_sweep(parse_config(text));
    SweepResult res;
    {
      py::gil_scoped_release release;
      res = run_sweep(spec, parallelism);
    }
    py::list cells;
    for (const auto& cell : res.cells) {
      py::dict d;
      d["run_id"] = cell.run_id;
      d["params"] = cell.params;
      d["policy"] = policy_name(cell.config.policy);
      d["reps"] = cell.reps;
      for (std::size_t w = 0; w < 4; ++w) {
        d[py::str(std::string(kMeasureNames[w]) + "_mean")] = cell.stats[w].mean;
        d[py::str(std::string(kMeasureNames[w]) + "_std")] = cell.stats[w].std;
      }
      cells.append(d);
    }
    std::ostringstream raw, agg;
    write_raw_csv(raw, res);
    write_aggregate_csv(agg, spec, res);
    py::dict out;
    out["cells"] = cells;
    out["raw_csv"] = raw.str();
    out["aggregate_csv"] = agg.str();
    return out;
  }, py::arg("config_text"), py::arg("parallelism") = 1,
     "Runs every cell of an INI config (with or without [sweep]) and aggregates final measures");

  m.def("detect_consensus", [](const SystemState& s, double r) {
    return report_dict(detect_consensus(s, r));
  }, py::arg("state"), py::arg("radius"));
  m.def("detect_bipolarization", [](const SystemState& s, double r) {
    return report_dict(detect_bipolarization(s, r));
  }, py::arg("state"), py::arg("radius"));
  m.def("detect_clusters", [](const SystemState& s, double r) {
    return report_dict(detect_clusters(s, r));
  }, py::arg("state"), py::arg("radius"));

  m.def("single_creator_steps", &single_creator_steps, py::arg("eta_u"), py::arg("lower_bound"),
        py::arg("audience"), py::arg("radius"));

  m.def("oracle_convex_cone", [](std::size_t trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return oracle_dict(oracle_convex_cone(trials, rng));
  }, py::arg("trials"), py::arg("seed") = 0);
  m.def("oracle_update_bounds", [](std::size_t trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return oracle_dict(oracle_update_bounds(trials, rng));
  }, py::arg("trials"), py::arg("seed") = 0);
  m.def("oracle_single_creator_bound", [](std::size_t instances, std::uint64_t seed, bool flipped) {
    std::mt19937_64 rng(seed);
    SingleCreatorParams p;
    p.flipped_users = flipped;
    return oracle_dict(oracle_single_creator_bound(instances, p, rng));
  }, py::arg("instances"), py::arg("seed") = 0, py::arg("flipped_users") = false);
  m.def("check_absorbing_bipolar", [](std::size_t constructions, std::uint64_t seed, bool consensus) {
    std::mt19937_64 rng(seed);
    AbsorptionParams p;
    p.consensus = consensus;
    return oracle_dict(check_absorbing_bipolar(constructions, p, rng));
  }, py::arg("constructions"), py::arg("seed") = 0, py::arg("consensus") = false);
  m.def("check_absorbing_clusters", [](std::size_t constructions, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return oracle_dict(check_absorbing_clusters(constructions, ClusterParams{}, rng));
  }, py::arg("constructions"), py::arg("seed") = 0);
}
