#include "ucdyn/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ucdyn/embeddings.hpp"
#include "ucdyn/error.hpp"
#include "ucdyn/format.hpp"

namespace ucdyn {

namespace {

constexpr const char* kRawHeader = "run_id,beta,k,tau,rho,eps,rep,t,cd,rd,rr,tp";

// beta, k, tau, rho, eps with empty fields where the policy has no such parameter.
std::string policy_columns(const PolicySpec& spec) {
  std::string beta = format_double(policy_beta(spec));
  std::string k, tau, rho, eps;
  if (const auto* p = std::get_if<TopKPolicy>(&spec)) k = std::to_string(p->k);
  if (const auto* p = std::get_if<TruncationPolicy>(&spec)) tau = format_double(p->tau);
  if (const auto* p = std::get_if<DiversityPolicy>(&spec)) rho = format_double(p->rho);
  if (const auto* p = std::get_if<UniformMixPolicy>(&spec)) eps = format_double(p->eps);
  return beta + "," + k + "," + tau + "," + rho + "," + eps;
}

bool is_policy_column(const std::string& path) {
  return path == "policy.beta" || path == "policy.k" || path == "policy.tau" ||
         path == "policy.rho" || path == "policy.eps";
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class T>
T parse_field(const std::string& s, const char* what) {
  T x{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::FileFormat, std::string("raw csv: bad ") + what + " '" + s + "'");
  }
  return x;
}

}  // namespace

MeanStd mean_std(std::span<const double> xs) {
  MeanStd r;
  if (xs.empty()) return r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return r;
}

double measure_value(const MeasureRecord& r, std::size_t which) {
  switch (which) {
    case 0: return r.cd;
    case 1: return r.rd;
    case 2: return r.rr;
    case 3: return r.tp;
  }
  throw Error(ErrorKind::Validation, "measure index out of range");
}

std::array<MeanStd, 4> aggregate_final(std::span<const Trajectory> reps) {
  std::array<MeanStd, 4> out{};
  std::vector<double> xs(reps.size());
  for (std::size_t w = 0; w < 4; ++w) {
    for (std::size_t r = 0; r < reps.size(); ++r) xs[r] = measure_value(reps[r].records.back(), w);
    out[w] = mean_std(xs);
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec, std::size_t parallelism) {
  SweepResult res;
  const std::size_t cells = spec.num_cells();
  std::vector<RunConfig> configs;
  configs.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) configs.push_back(spec.cell(c));

  // Flattened (cell, rep) jobs so cells with few reps still fill the workers.
  std::vector<std::size_t> offset(cells + 1, 0);
  for (std::size_t c = 0; c < cells; ++c) offset[c + 1] = offset[c] + configs[c].reps;
  res.runs.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) res.runs[c].resize(configs[c].reps);

  parallel_for(offset.back(), parallelism, [&](std::size_t job) {
    const std::size_t c =
        static_cast<std::size_t>(std::upper_bound(offset.begin(), offset.end(), job) - offset.begin()) - 1;
    const std::size_t rep = job - offset[c];
    try {
      res.runs[c][rep] = run(configs[c], rep);
    } catch (const Error& e) {
      throw e.with_context("cell " + std::to_string(c) + ", rep " + std::to_string(rep));
    }
  });

  res.cells.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    AggregateCell cell;
    cell.run_id = c;
    cell.params = spec.cell_params(c);
    cell.config = configs[c];
    cell.stats = aggregate_final(res.runs[c]);
    cell.reps = res.runs[c].size();
    res.cells.push_back(std::move(cell));
  }
  return res;
}

void write_raw_csv(std::ostream& out, const SweepResult& result) {
  out << kRawHeader << '\n';
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const std::string prefix =
        std::to_string(result.cells[c].run_id) + "," + policy_columns(result.cells[c].config.policy);
    for (std::size_t rep = 0; rep < result.runs[c].size(); ++rep) {
      for (const auto& r : result.runs[c][rep].records) {
        out << prefix << ',' << rep << ',' << r.time << ',' << format_double(r.cd) << ','
            << format_double(r.rd) << ',' << format_double(r.rr) << ',' << format_double(r.tp)
            << '\n';
      }
    }
  }
}

void write_aggregate_csv(std::ostream& out, const SweepSpec& spec, const SweepResult& result) {
  std::vector<std::size_t> extra;
  for (std::size_t a = 0; a < spec.axes.size(); ++a) {
    if (!is_policy_column(spec.axes[a].path)) extra.push_back(a);
  }
  out << "run_id,beta,k,tau,rho,eps";
  for (std::size_t a : extra) out << ',' << spec.axes[a].path;
  out << ",reps";
  for (const char* m : kMeasureNames) out << ',' << m << "_mean," << m << "_std";
  out << '\n';
  for (const auto& cell : result.cells) {
    out << cell.run_id << ',' << policy_columns(cell.config.policy);
    for (std::size_t a : extra) out << ',' << cell.params[a].second;
    out << ',' << cell.reps;
    for (const auto& s : cell.stats) out << ',' << format_double(s.mean) << ',' << format_double(s.std);
    out << '\n';
  }
}

std::vector<std::array<MeanStd, 4>> aggregate_from_raw_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRawHeader) {
    throw Error(ErrorKind::FileFormat, "raw csv: unexpected header");
  }
  // (run_id, rep) -> last record seen, which is the final step since rows are time-ordered.
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::array<double, 4>>> last;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 12) throw Error(ErrorKind::FileFormat, "raw csv: expected 12 fields: " + line);
    const auto id = parse_field<std::size_t>(f[0], "run_id");
    const auto rep = parse_field<std::size_t>(f[6], "rep");
    const auto t = parse_field<std::size_t>(f[7], "t");
    std::array<double, 4> vals{};
    for (std::size_t w = 0; w < 4; ++w) vals[w] = parse_field<double>(f[8 + w], kMeasureNames[w]);
    auto& slot = last[{id, rep}];
    if (t >= slot.first) slot = {t, vals};
  }
  std::vector<std::vector<std::array<double, 4>>> per_cell;
  for (const auto& [key, rec] : last) {
    if (key.first >= per_cell.size()) per_cell.resize(key.first + 1);
    per_cell[key.first].push_back(rec.second);
  }
  std::vector<std::array<MeanStd, 4>> out(per_cell.size());
  for (std::size_t c = 0; c < per_cell.size(); ++c) {
    std::vector<double> xs(per_cell[c].size());
    for (std::size_t w = 0; w < 4; ++w) {
      for (std::size_t r = 0; r < xs.size(); ++r) xs[r] = per_cell[c][r][w];
      out[c][w] = mean_std(xs);
    }
  }
  return out;
}

std::vector<std::filesystem::path> emit_plot_data(std::span<const Trajectory> reps,
                                                  const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  if (reps.empty()) return written;
  const auto& grid = reps.front().records;
  for (const auto& tr : reps) {
    bool same = tr.records.size() == grid.size();
    for (std::size_t i = 0; same && i < grid.size(); ++i) same = tr.records[i].time == grid[i].time;
    if (!same) {
      throw Error(ErrorKind::Validation,
                  "plot data needs a common record grid; a stop condition ended reps at different steps");
    }
  }
  std::filesystem::create_directories(out_dir);

  std::vector<double> xs(reps.size());
  for (std::size_t w = 0; w < 4; ++w) {
    const auto path = out_dir / (std::string(kMeasureNames[w]) + ".csv");
    auto out = open_out(path);
    out << "t,mean,std\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t r = 0; r < reps.size(); ++r) xs[r] = measure_value(reps[r].records[i], w);
      const auto s = mean_std(xs);
      out << grid[i].time << ',' << format_double(s.mean) << ',' << format_double(s.std) << '\n';
    }
    written.push_back(path);
  }

  for (std::size_t r = 0; r < reps.size(); ++r) {
    for (const auto& snap : reps[r].snapshots) {
      const auto dir = out_dir / "snapshots";
      std::filesystem::create_directories(dir);
      const auto path = dir / ("rep" + std::to_string(r) + "_t" + std::to_string(snap.time) + ".txt");
      save_state(path, snap);
      written.push_back(path);
    }
  }
  return written;
}

std::vector<std::filesystem::path> write_sweep_outputs(const SweepSpec& spec,
                                                       const SweepResult& result,
                                                       const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  {
    const auto path = out_dir / "raw.csv";
    auto out = open_out(path);
    write_raw_csv(out, result);
    written.push_back(path);
  }
  {
    const auto path = out_dir / "aggregate.csv";
    auto out = open_out(path);
    write_aggregate_csv(out, spec, result);
    written.push_back(path);
  }
  for (std::size_t c = 0; c < result.runs.size(); ++c) {
    const auto dir = result.runs.size() == 1 ? out_dir : out_dir / ("cell" + std::to_string(c));
    const auto& runs = result.runs[c];
    bool common = true;
    for (const auto& tr : runs) common = common && tr.records.size() == runs.front().records.size();
    if (common) {
      auto files = emit_plot_data(runs, dir);
      written.insert(written.end(), files.begin(), files.end());
    }
  }
  return written;
}

}  // namespace ucdyn
