// ucdyn: run, sweep, verify and measure from the command line.
//
// Exit codes: 0 success, 1 parse/validation error, 2 runtime error or oracle violation.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ucdyn/config.hpp"
#include "ucdyn/convergence.hpp"
#include "ucdyn/embeddings.hpp"
#include "ucdyn/error.hpp"
#include "ucdyn/format.hpp"
#include "ucdyn/harness.hpp"

namespace fs = std::filesystem;
using namespace ucdyn;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kRuntimeError = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::size_t parallelism = 1;
  bool quiet = false;
};

// Input problems are reported as exit 1, everything after inputs load as exit 2.
struct InputError {
  std::string message;
};

template <class F>
auto load_input(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw InputError{e.what()};
  }
}

SweepSpec load_sweep(const Common& c, bool require_single) {
  return load_input([&] {
    if (c.config.empty()) throw Error(ErrorKind::Parse, "--config is required");
    const auto parsed = load_config(c.config);
    if (require_single && std::holds_alternative<SweepSpec>(parsed)) {
      throw Error(ErrorKind::Validation, c.config + " has a [sweep] section; use 'ucdyn sweep'");
    }
    SweepSpec spec = as_sweep(parsed);
    if (c.seed) {
      spec.base.master_seed = *c.seed;
      if (!spec.axes.empty()) spec.base_values["run.seed"] = std::to_string(*c.seed);
    }
    // Initial-state files are inputs: load them now so their errors exit with 1.
    for (std::size_t i = 0; i < spec.num_cells(); ++i) {
      const RunConfig cell = spec.cell(i);
      if (!cell.init_file.empty()) (void)init_state(cell, 0);
    }
    return spec;
  });
}

void print_aggregate(const SweepResult& res) {
  std::cout << std::fixed << std::setprecision(3);
  for (const auto& cell : res.cells) {
    std::cout << "cell " << cell.run_id << " [" << policy_name(cell.config.policy);
    for (const auto& [k, v] : cell.params) std::cout << ' ' << k << '=' << v;
    std::cout << "] reps=" << cell.reps;
    for (std::size_t w = 0; w < 4; ++w) {
      std::cout << "  " << kMeasureNames[w] << ' ' << cell.stats[w].mean << " +- " << cell.stats[w].std;
    }
    std::cout << '\n';
  }
}

int cmd_sweep(const Common& c, bool single) {
  const SweepSpec spec = load_sweep(c, single);
  const auto start = std::chrono::steady_clock::now();
  const SweepResult res = run_sweep(spec, c.parallelism);
  const auto files = write_sweep_outputs(spec, res, c.out);
  if (single) {
    const auto dir = fs::path(c.out) / "final";
    fs::create_directories(dir);
    for (std::size_t r = 0; r < res.runs.front().size(); ++r) {
      save_state(dir / ("rep" + std::to_string(r) + ".txt"), res.runs.front()[r].final_state);
    }
  }
  if (!c.quiet) {
    print_aggregate(res);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << std::defaultfloat << "wrote " << files.size() << " files to " << c.out << " in "
              << std::setprecision(3) << secs << " s\n";
  }
  return kOk;
}

int cmd_verify(const Common& c, bool quick) {
  std::mt19937_64 rng(c.seed.value_or(0));
  const std::size_t scale_div = quick ? 10 : 1;
  std::vector<OracleReport> reports;

  reports.push_back(oracle_convex_cone(100000 / scale_div, rng));
  reports.push_back(oracle_update_bounds(100000 / scale_div, rng));
  reports.push_back(oracle_single_creator_bound(100 / scale_div, SingleCreatorParams{}, rng));
  SingleCreatorParams flipped;
  flipped.flipped_users = true;
  reports.push_back(oracle_single_creator_bound(100 / scale_div, flipped, rng));
  reports.push_back(check_absorbing_bipolar(100 / scale_div, AbsorptionParams{}, rng));
  AbsorptionParams consensus;
  consensus.consensus = true;
  reports.push_back(check_absorbing_bipolar(20 / std::min<std::size_t>(scale_div, 4), consensus, rng));
  reports.push_back(check_absorbing_clusters(50 / scale_div, ClusterParams{}, rng));

  bool ok = true;
  std::ostringstream table;
  table << "oracle,trials,violations,worst_margin,status\n";
  for (const auto& r : reports) {
    ok = ok && r.passed();
    table << r.name << ',' << r.trials << ',' << r.violations << ',' << format_double(r.worst_margin)
          << ',' << (r.passed() ? "pass" : "FAIL") << '\n';
  }
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    std::ofstream(fs::path(c.out) / "verify.csv") << table.str();
  }
  if (!c.quiet) {
    std::cout << std::left << std::setw(26) << "oracle" << std::setw(9) << "trials" << std::setw(12)
              << "violations" << std::setw(14) << "worst margin" << "status\n";
    for (const auto& r : reports) {
      std::cout << std::setw(26) << r.name << std::setw(9) << r.trials << std::setw(12)
                << r.violations << std::setw(14) << std::setprecision(3) << r.worst_margin
                << (r.passed() ? "pass" : "FAIL") << '\n';
    }
  }
  for (const auto& r : reports) {
    if (!r.passed()) std::cerr << r.name << " counterexample: " << r.counterexample << '\n';
  }
  return ok ? kOk : kRuntimeError;
}

int cmd_measure(const Common& c, const std::string& state_path, std::optional<double> radius) {
  const auto [state, policy] = load_input([&] {
    PolicySpec spec = SoftmaxPolicy{1.0};
    if (!c.config.empty()) spec = as_sweep(load_config(c.config)).base.policy;
    auto emb = load_embeddings(state_path);
    SystemState s;
    s.users = std::move(emb.users);
    s.creators = std::move(emb.creators);
    validate_policy(spec, s.num_creators());
    return std::make_pair(std::move(s), spec);
  });
  const auto rows = policy_rows(policy, state, {});
  const auto rec = measure(state, rows);
  std::ostringstream out;
  out << "cd,rd,rr,tp\n"
      << format_double(rec.cd) << ',' << format_double(rec.rd) << ',' << format_double(rec.rr) << ','
      << format_double(rec.tp) << '\n';
  std::cout << out.str();
  if (radius) {
    for (const auto& rep : {detect_consensus(state, *radius), detect_bipolarization(state, *radius),
                            detect_clusters(state, *radius)}) {
      if (rep.positive()) {
        std::cout << to_string(rep.kind) << " at R=" << *radius << ": " << rep.num_clusters()
                  << " center(s), max residual " << rep.max_residual << '\n';
      }
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate and analyse user-creator feature dynamics on the unit sphere"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Configuration file");
    sub->add_option("--seed", common.seed, "Override the master seed");
    sub->add_option("--out", common.out, "Output directory")->capture_default_str();
    sub->add_option("--parallelism", common.parallelism, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_flag("--quiet", common.quiet, "Suppress progress output");
  };

  auto* run_cmd = app.add_subcommand("run", "Run every repetition of one configuration");
  add_common(run_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep and aggregate per cell");
  add_common(sweep_cmd);
  auto* verify_cmd = app.add_subcommand("verify", "Run the convergence oracles");
  add_common(verify_cmd);
  bool quick = false;
  verify_cmd->add_flag("--quick", quick, "Run a tenth of the instances");
  auto* measure_cmd = app.add_subcommand("measure", "Measures of a state file");
  add_common(measure_cmd);
  std::string state_path;
  measure_cmd->add_option("--state,state", state_path, "State file (embedding format)")->required();
  std::optional<double> radius;
  measure_cmd->add_option("--radius", radius, "Also report consensus/bi-polarization/clusters at R");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (run_cmd->parsed()) return cmd_sweep(common, true);
    if (sweep_cmd->parsed()) return cmd_sweep(common, false);
    if (verify_cmd->parsed()) return cmd_verify(common, quick);
    if (measure_cmd->parsed()) return cmd_measure(common, state_path, radius);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.message << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kInputError;
}
