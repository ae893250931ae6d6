#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ucdyn/dynamics.hpp"

namespace ucdyn {

struct SoftmaxPolicy {
  double beta = 1.0;
};

/// Softmax restricted to the k most relevant creators (ties go to the lower index).
struct TopKPolicy {
  std::size_t k = 1;
  double beta = 1.0;
};

/// Softmax over creators with <u, v> >= tau; no recommendation if none qualify.
struct TruncationPolicy {
  double tau = 0.0;
  double beta = 1.0;
};

/// Softmax over <u, v_i> + rho * sum_{i' in recent} (1 - <v_i', v_i>).
struct DiversityPolicy {
  double rho = 0.0;
  double beta = 1.0;
  std::size_t list_len = 10;
};

/// (1 - eps) * softmax + eps * uniform.
struct UniformMixPolicy {
  double eps = 0.0;
  double beta = 1.0;
};

using PolicySpec =
    std::variant<SoftmaxPolicy, TopKPolicy, TruncationPolicy, DiversityPolicy, UniformMixPolicy>;

/// Throws Validation (or KTooLarge) if `spec` is unusable with `num_creators` creators.
void validate_policy(const PolicySpec& spec, std::size_t num_creators);
std::string policy_name(const PolicySpec& spec);
double policy_beta(const PolicySpec& spec);

/// The last `capacity` creators recommended to one user, oldest first.
class RecentList {
 public:
  explicit RecentList(std::size_t capacity = 10) : capacity_(capacity) {}

  void push(std::size_t creator);
  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return items_.empty(); }
  const std::deque<std::size_t>& items() const noexcept { return items_; }

 private:
  std::size_t capacity_;
  std::deque<std::size_t> items_;
};

/// A probability vector over creators, or nullopt when the user gets no recommendation.
using Row = std::optional<std::vector<double>>;

std::vector<double> softmax_row(const UnitVector& u, std::span<const UnitVector> creators,
                                double beta);
std::vector<double> topk_row(const UnitVector& u, std::span<const UnitVector> creators,
                             std::size_t k, double beta);
Row truncation_row(const UnitVector& u, std::span<const UnitVector> creators, double tau,
                   double beta);
std::vector<double> diversity_row(const UnitVector& u, std::span<const UnitVector> creators,
                                  const RecentList& recent, double rho, double beta);
std::vector<double> uniform_mix_row(std::span<const double> base, double eps);

/// Row for one user under any policy. `recent` is only read by the diversity policy.
Row policy_row(const PolicySpec& spec, const UnitVector& u, std::span<const UnitVector> creators,
               const RecentList& recent);

/// Rows for every user. `recents` must be empty or hold one list per user.
std::vector<Row> policy_rows(const PolicySpec& spec, const SystemState& state,
                             std::span<const RecentList> recents);

std::vector<RecentList> make_recent_lists(const PolicySpec& spec, std::size_t num_users);

/// Identifies the random substream used for one step of one repetition.
struct SampleKey {
  std::uint64_t master_seed = 0;
  std::uint64_t rep = 0;
  std::uint64_t step = 0;
};

/// Inverse-CDF draw from `row` using uniform `r` in [0, 1); never returns a zero-mass index.
std::size_t sample_index(std::span<const double> row, double r);

/// Samples one creator per user from precomputed rows and records it in `recents`.
Assignment sample_from_rows(std::span<const Row> rows, const SampleKey& key,
                            std::span<RecentList> recents);

/// policy_rows + sample_from_rows. Deterministic in (state, spec, key).
Assignment sample_assignment(const SystemState& state, const PolicySpec& spec,
                             std::span<RecentList> recents, const SampleKey& key);

}  // namespace ucdyn
