#include "ucdyn/engine.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "ucdyn/embeddings.hpp"
#include "ucdyn/rng.hpp"

namespace ucdyn {

void RunConfig::validate() const {
  if (d < 2) throw Error(ErrorKind::Validation, "d must be >= 2");
  if (n < 1 || m < 1) throw Error(ErrorKind::Validation, "n and m must be >= 1");
  if (reps < 1) throw Error(ErrorKind::Validation, "reps must be >= 1");
  if (record_every < 1) throw Error(ErrorKind::Validation, "record_every must be >= 1");
  if (horizon > 0 && record_every > horizon) {
    throw Error(ErrorKind::Validation, "record_every must not exceed the horizon");
  }
  if (stop_tp_at_least && !std::isfinite(*stop_tp_at_least)) {
    throw Error(ErrorKind::Validation, "stop threshold must be finite");
  }
  rates.validate(d);
  validate_policy(policy, n);
}

SystemState init_state(const RunConfig& config, std::size_t rep) {
  SystemState s;
  if (!config.init_file.empty()) {
    auto emb = load_embeddings(config.init_file);
    if (emb.users.size() != config.m || emb.creators.size() != config.n) {
      throw Error(ErrorKind::CountMismatch, config.init_file + " holds " +
                                                std::to_string(emb.users.size()) + " users and " +
                                                std::to_string(emb.creators.size()) +
                                                " creators; config expects m = " +
                                                std::to_string(config.m) + ", n = " +
                                                std::to_string(config.n));
    }
    require_same_dim(emb.creators.front().dim(), config.d);
    s.users = std::move(emb.users);
    s.creators = std::move(emb.creators);
    return s;
  }

  std::mt19937_64 gen(substream_seed(
      {static_cast<std::uint64_t>(StreamTag::Init), config.master_seed, rep}));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&] {
    std::vector<double> x(config.d);
    // A draw of norm <= 1e-12 has probability ~0; redraw rather than fail.
    while (true) {
      for (double& c : x) c = normal(gen);
      if (norm(x) > kZeroNorm) return project(x);
    }
  };
  s.users.reserve(config.m);
  s.creators.reserve(config.n);
  for (std::size_t j = 0; j < config.m; ++j) s.users.push_back(draw());
  for (std::size_t i = 0; i < config.n; ++i) s.creators.push_back(draw());
  return s;
}

Trajectory run(const RunConfig& config, std::size_t rep) {
  config.validate();
  Trajectory traj;
  SystemState state = init_state(config, rep);
  auto recents = make_recent_lists(config.policy, config.m);

  for (std::size_t t = 0;; ++t) {
    const auto rows = policy_rows(config.policy, state, recents);
    const bool at_horizon = t == config.horizon;
    if (t % config.record_every == 0 || at_horizon) {
      traj.records.push_back(measure(state, rows));
      if (config.stop_tp_at_least && traj.records.back().tp >= *config.stop_tp_at_least) {
        traj.termination = Trajectory::Termination::StopCondition;
        traj.stop_step = t;
        break;
      }
    }
    if (config.snapshot_every > 0 && t % config.snapshot_every == 0) {
      traj.snapshots.push_back(state);
    }
    if (at_horizon) {
      traj.stop_step = t;
      break;
    }
    const auto assignment =
        sample_from_rows(rows, SampleKey{config.master_seed, rep, t}, recents);
    try {
      state = step(state, assignment, config.f, config.g, config.rates);
    } catch (const Error& e) {
      throw e.with_context("rep " + std::to_string(rep));
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

void parallel_for(std::size_t count, std::size_t parallelism,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(parallelism, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        while (!failed.load()) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<Trajectory> run_reps(const RunConfig& config, std::size_t parallelism) {
  config.validate();
  std::vector<Trajectory> out(config.reps);
  parallel_for(config.reps, parallelism, [&](std::size_t r) { out[r] = run(config, r); });
  return out;
}

}  // namespace ucdyn
