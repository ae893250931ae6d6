#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ucdyn/config.hpp"
#include "ucdyn/engine.hpp"

namespace ucdyn {

inline constexpr std::array<const char*, 4> kMeasureNames = {"cd", "rd", "rr", "tp"};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation; 0 for a single value
};

MeanStd mean_std(std::span<const double> xs);

/// Final-step statistics of one sweep cell.
struct AggregateCell {
  std::size_t run_id = 0;
  std::vector<std::pair<std::string, std::string>> params;
  RunConfig config;
  std::array<MeanStd, 4> stats{};  ///< cd, rd, rr, tp
  std::size_t reps = 0;

  const MeanStd& cd() const { return stats[0]; }
  const MeanStd& rd() const { return stats[1]; }
  const MeanStd& rr() const { return stats[2]; }
  const MeanStd& tp() const { return stats[3]; }
};

struct SweepResult {
  std::vector<AggregateCell> cells;
  /// runs[cell][rep]
  std::vector<std::vector<Trajectory>> runs;
};

double measure_value(const MeasureRecord& r, std::size_t which);

/// Aggregates the final record of each trajectory.
std::array<MeanStd, 4> aggregate_final(std::span<const Trajectory> reps);

/// Runs every (cell, rep) pair on up to `parallelism` threads. Seeds depend on
/// (master_seed, rep) only, so all cells share initial states rep by rep.
SweepResult run_sweep(const SweepSpec& spec, std::size_t parallelism = 1);

/// Columns: run_id, beta, k, tau, rho, eps, rep, t, cd, rd, rr, tp.
void write_raw_csv(std::ostream& out, const SweepResult& result);
/// One row per cell: run_id, beta, k, tau, rho, eps, the non-policy axis values,
/// reps, then mean and std of each measure.
void write_aggregate_csv(std::ostream& out, const SweepSpec& spec, const SweepResult& result);

/// Recomputes final-step aggregates from a raw CSV, indexed by run_id.
std::vector<std::array<MeanStd, 4>> aggregate_from_raw_csv(std::istream& in);

/// Writes <measure>.csv (t, mean, std across reps) for each measure and, when
/// snapshots were recorded, snapshots/rep<r>_t<t>.txt in the embedding format.
/// Returns the paths written.
std::vector<std::filesystem::path> emit_plot_data(std::span<const Trajectory> reps,
                                                  const std::filesystem::path& out_dir);

/// raw.csv, aggregate.csv and per-cell plot data under cell<id>/.
std::vector<std::filesystem::path> write_sweep_outputs(const SweepSpec& spec,
                                                       const SweepResult& result,
                                                       const std::filesystem::path& out_dir);

}  // namespace ucdyn
