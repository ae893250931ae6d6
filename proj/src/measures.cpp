#include "ucdyn/measures.hpp"

#include <cmath>
#include <string>

namespace ucdyn {

namespace {

void require_rows(const SystemState& state, std::span<const Row> rows) {
  if (rows.size() != state.num_users()) {
    throw Error(ErrorKind::Validation, "expected one row per user");
  }
  for (const auto& row : rows) {
    if (row && row->size() != state.num_creators()) {
      throw Error(ErrorKind::Validation, "row length differs from the number of creators");
    }
  }
}

}  // namespace

double creator_diversity(std::span<const UnitVector> creators) {
  const std::size_t n = creators.size();
  if (n < 2) throw Error(ErrorKind::NeedTwoCreators, "creator diversity needs n >= 2");
  // Distances are symmetric: sum the upper triangle and count it twice.
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) sum += distance(creators[i], creators[k]);
  }
  return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double recommendation_diversity(const SystemState& state, std::span<const Row> rows) {
  require_rows(state, rows);
  const std::size_t d = state.dim();
  double total = 0.0;
  std::vector<double> mean(d);
  for (const auto& row : rows) {
    if (!row) continue;
    const auto& p = *row;
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0) continue;
      const auto v = state.creators[i].coords();
      for (std::size_t k = 0; k < d; ++k) mean[k] += p[i] * v[k];
    }
    double var = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0) continue;
      const auto v = state.creators[i].coords();
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) sq += (v[k] - mean[k]) * (v[k] - mean[k]);
      var += p[i] * sq;
    }
    total += var;
  }
  return total / static_cast<double>(rows.size());
}

double recommendation_relevance(const SystemState& state, std::span<const Row> rows) {
  require_rows(state, rows);
  double total = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (!rows[j]) continue;
    const auto& p = *rows[j];
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] != 0.0) total += p[i] * inner(state.users[j], state.creators[i]);
    }
  }
  return total / static_cast<double>(rows.size());
}

double tendency_to_polarization(std::span<const UnitVector> creators) {
  const std::size_t n = creators.size();
  if (n < 1) throw Error(ErrorKind::Validation, "tendency to polarization needs n >= 1");
  double off = 0.0;
  double diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diag += std::abs(inner(creators[i], creators[i]));
    for (std::size_t k = i + 1; k < n; ++k) off += std::abs(inner(creators[i], creators[k]));
  }
  const double nn = static_cast<double>(n);
  return (diag + 2.0 * off) / (nn * nn);
}

MeasureRecord measure(const SystemState& state, std::span<const Row> rows) {
  MeasureRecord r;
  r.time = state.time;
  r.cd = state.num_creators() >= 2 ? creator_diversity(state.creators) : 0.0;
  r.rd = recommendation_diversity(state, rows);
  r.rr = recommendation_relevance(state, rows);
  r.tp = tendency_to_polarization(state.creators);
  return r;
}

}  // namespace ucdyn
