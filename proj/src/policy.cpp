#include "ucdyn/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ucdyn/rng.hpp"

namespace ucdyn {

namespace {

void require_finite_beta(double beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw Error(ErrorKind::Validation, "beta must be finite and >= 0");
  }
}

std::vector<double> inner_products(const UnitVector& u, std::span<const UnitVector> creators) {
  std::vector<double> s(creators.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = inner(u, creators[i]);
  return s;
}

// Softmax of beta * scores over the entries with mask[i] set; others get 0.
// Requires at least one set entry.
std::vector<double> masked_softmax(std::span<const double> scores, double beta,
                                   const std::vector<bool>* mask = nullptr) {
  auto on = [&](std::size_t i) { return mask == nullptr || (*mask)[i]; };
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (on(i)) best = std::max(best, scores[i]);
  }
  std::vector<double> p(scores.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!on(i)) continue;
    p[i] = std::exp(beta * (scores[i] - best));
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

}  // namespace

void validate_policy(const PolicySpec& spec, std::size_t num_creators) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        require_finite_beta(p.beta);
        if constexpr (std::is_same_v<T, TopKPolicy>) {
          if (p.k < 1) throw Error(ErrorKind::Validation, "top-k needs k >= 1");
          if (p.k > num_creators) {
            throw Error(ErrorKind::KTooLarge, "k = " + std::to_string(p.k) + " exceeds n = " +
                                                  std::to_string(num_creators));
          }
        } else if constexpr (std::is_same_v<T, TruncationPolicy>) {
          if (!std::isfinite(p.tau) || p.tau < -1.0 || p.tau > 1.0) {
            throw Error(ErrorKind::Validation, "tau must lie in [-1, 1]");
          }
        } else if constexpr (std::is_same_v<T, DiversityPolicy>) {
          if (!std::isfinite(p.rho) || p.rho < 0.0) {
            throw Error(ErrorKind::Validation, "rho must be finite and >= 0");
          }
          if (p.list_len < 1) throw Error(ErrorKind::Validation, "list_len must be >= 1");
        } else if constexpr (std::is_same_v<T, UniformMixPolicy>) {
          if (!std::isfinite(p.eps) || p.eps < 0.0 || p.eps > 1.0) {
            throw Error(ErrorKind::Validation, "eps must lie in [0, 1]");
          }
        }
      },
      spec);
}

std::string policy_name(const PolicySpec& spec) {
  std::ostringstream os;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SoftmaxPolicy>) {
          os << "softmax(beta=" << p.beta << ")";
        } else if constexpr (std::is_same_v<T, TopKPolicy>) {
          os << "topk(k=" << p.k << ",beta=" << p.beta << ")";
        } else if constexpr (std::is_same_v<T, TruncationPolicy>) {
          os << "truncation(tau=" << p.tau << ",beta=" << p.beta << ")";
        } else if constexpr (std::is_same_v<T, DiversityPolicy>) {
          os << "diversity(rho=" << p.rho << ",beta=" << p.beta << ",list_len=" << p.list_len
             << ")";
        } else {
          os << "uniform_mix(eps=" << p.eps << ",beta=" << p.beta << ")";
        }
      },
      spec);
  return os.str();
}

double policy_beta(const PolicySpec& spec) {
  return std::visit([](const auto& p) { return p.beta; }, spec);
}

void RecentList::push(std::size_t creator) {
  if (capacity_ == 0) return;
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(creator);
}

std::vector<double> softmax_row(const UnitVector& u, std::span<const UnitVector> creators,
                                double beta) {
  require_finite_beta(beta);
  if (creators.empty()) throw Error(ErrorKind::Validation, "no creators");
  const auto s = inner_products(u, creators);
  return masked_softmax(s, beta);
}

std::vector<double> topk_row(const UnitVector& u, std::span<const UnitVector> creators,
                             std::size_t k, double beta) {
  require_finite_beta(beta);
  const std::size_t n = creators.size();
  if (k < 1) throw Error(ErrorKind::Validation, "top-k needs k >= 1");
  if (k > n) {
    throw Error(ErrorKind::KTooLarge,
                "k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  }
  const auto s = inner_products(u, creators);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return s[a] > s[b] || (s[a] == s[b] && a < b);
                    });
  std::vector<bool> mask(n, false);
  for (std::size_t r = 0; r < k; ++r) mask[order[r]] = true;
  return masked_softmax(s, beta, &mask);
}

Row truncation_row(const UnitVector& u, std::span<const UnitVector> creators, double tau,
                   double beta) {
  require_finite_beta(beta);
  const auto s = inner_products(u, creators);
  std::vector<bool> mask(s.size());
  bool any = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    mask[i] = s[i] >= tau;
    any = any || mask[i];
  }
  if (!any) return std::nullopt;
  return masked_softmax(s, beta, &mask);
}

std::vector<double> diversity_row(const UnitVector& u, std::span<const UnitVector> creators,
                                  const RecentList& recent, double rho, double beta) {
  require_finite_beta(beta);
  auto s = inner_products(u, creators);
  if (rho != 0.0 && !recent.empty()) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      double div = 0.0;
      for (std::size_t prev : recent.items()) div += 1.0 - inner(creators[prev], creators[i]);
      s[i] += rho * div;
    }
  }
  return masked_softmax(s, beta);
}

std::vector<double> uniform_mix_row(std::span<const double> base, double eps) {
  const double share = 1.0 / static_cast<double>(base.size());
  std::vector<double> p(base.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = (1.0 - eps) * base[i] + eps * share;
  return p;
}

Row policy_row(const PolicySpec& spec, const UnitVector& u, std::span<const UnitVector> creators,
               const RecentList& recent) {
  return std::visit(
      [&](const auto& p) -> Row {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SoftmaxPolicy>) {
          return softmax_row(u, creators, p.beta);
        } else if constexpr (std::is_same_v<T, TopKPolicy>) {
          return topk_row(u, creators, p.k, p.beta);
        } else if constexpr (std::is_same_v<T, TruncationPolicy>) {
          return truncation_row(u, creators, p.tau, p.beta);
        } else if constexpr (std::is_same_v<T, DiversityPolicy>) {
          return diversity_row(u, creators, recent, p.rho, p.beta);
        } else {
          return uniform_mix_row(softmax_row(u, creators, p.beta), p.eps);
        }
      },
      spec);
}

std::vector<Row> policy_rows(const PolicySpec& spec, const SystemState& state,
                             std::span<const RecentList> recents) {
  if (!recents.empty() && recents.size() != state.num_users()) {
    throw Error(ErrorKind::Validation, "one recent list per user is required");
  }
  const RecentList none(0);
  std::vector<Row> rows;
  rows.reserve(state.num_users());
  for (std::size_t j = 0; j < state.num_users(); ++j) {
    rows.push_back(
        policy_row(spec, state.users[j], state.creators, recents.empty() ? none : recents[j]));
  }
  return rows;
}

std::vector<RecentList> make_recent_lists(const PolicySpec& spec, std::size_t num_users) {
  std::size_t capacity = 10;
  if (const auto* d = std::get_if<DiversityPolicy>(&spec)) capacity = d->list_len;
  return std::vector<RecentList>(num_users, RecentList(capacity));
}

std::size_t sample_index(std::span<const double> row, double r) {
  double cum = 0.0;
  std::size_t last = row.size();
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] <= 0.0) continue;
    last = i;
    cum += row[i];
    if (r < cum) return i;
  }
  if (last == row.size()) throw Error(ErrorKind::Validation, "row has no positive mass");
  return last;  // rounding left cum slightly below r
}

Assignment sample_from_rows(std::span<const Row> rows, const SampleKey& key,
                            std::span<RecentList> recents) {
  Assignment out(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (!rows[j]) continue;
    const std::uint64_t bits = splitmix64(substream_seed(
        {static_cast<std::uint64_t>(StreamTag::Sample), key.master_seed, key.rep, key.step, j}));
    out[j] = sample_index(*rows[j], to_unit_interval(bits));
    if (!recents.empty()) recents[j].push(*out[j]);
  }
  return out;
}

Assignment sample_assignment(const SystemState& state, const PolicySpec& spec,
                             std::span<RecentList> recents, const SampleKey& key) {
  const auto rows = policy_rows(spec, state, recents);
  return sample_from_rows(rows, key, recents);
}

}  // namespace ucdyn
