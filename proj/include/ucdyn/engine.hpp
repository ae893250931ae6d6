#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ucdyn/dynamics.hpp"
#include "ucdyn/impact.hpp"
#include "ucdyn/measures.hpp"
#include "ucdyn/policy.hpp"

namespace ucdyn {

/// Complete, seedable description of one experiment. Defaults are the desk-scale
/// synthetic setup: d=10, n=50, m=100, T=1000, softmax beta=1, eta_u=eta_c=0.1,
/// f=inner_product, g=sign.
struct RunConfig {
  std::size_t d = 10;
  std::size_t n = 50;
  std::size_t m = 100;
  std::size_t horizon = 1000;
  std::size_t reps = 100;
  std::uint64_t master_seed = 0;
  RateSpec rates{};
  UserImpactSpec f = UserImpactSpec::inner_product();
  CreatorImpactSpec g = CreatorImpactSpec::sign();
  PolicySpec policy = SoftmaxPolicy{1.0};
  /// Empty: random points on the sphere. Otherwise an embedding file (see load_embeddings).
  std::string init_file;
  std::size_t record_every = 1;
  std::size_t snapshot_every = 0;
  /// Stop after the first recorded TP at or above this value.
  std::optional<double> stop_tp_at_least;

  void validate() const;
};

struct Trajectory {
  enum class Termination { Horizon, StopCondition };

  std::vector<MeasureRecord> records;
  SystemState final_state;
  std::vector<SystemState> snapshots;
  Termination termination = Termination::Horizon;
  std::size_t stop_step = 0;
};

/// Random (or file-loaded) initial state for repetition `rep`; depends only on
/// (master_seed, rep).
SystemState init_state(const RunConfig& config, std::size_t rep);

/// policy rows -> sample -> step, recording measures at t=0, every record_every
/// steps, and at termination. Bit-identical for identical (config, rep).
Trajectory run(const RunConfig& config, std::size_t rep);

/// Runs fn(0..count-1) on up to `parallelism` threads. The first exception thrown
/// by any task is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t parallelism,
                  const std::function<void(std::size_t)>& fn);

/// All repetitions of `config`, indexed by rep.
std::vector<Trajectory> run_reps(const RunConfig& config, std::size_t parallelism = 1);

}  // namespace ucdyn
