#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ucdyn/engine.hpp"

namespace ucdyn {

// Configuration files are INI-style:
//
//   [system]  d, n, m
//   [rates]   eta_u, eta_c, fixed_dims
//   [impact]  f (inner_product | sign_affine | sign_only), a, b, g (sign)
//   [policy]  kind (softmax | topk | truncation | diversity | uniform_mix),
//             beta, k, tau, rho, list_len, eps
//   [run]     horizon, reps, seed, init_file, record_every, snapshot_every,
//             stop_tp_at_least
//   [sweep]   section.key = v1, v2, ...   (one axis per line)
//
// Every key is optional; omitted keys keep the RunConfig defaults. Policy keys
// that the chosen kind does not use are rejected.

/// Flat "section.key" -> raw text.
using ConfigValues = std::map<std::string, std::string>;

struct SweepAxis {
  std::string path;
  std::vector<std::string> values;
};

struct SweepSpec {
  RunConfig base;
  ConfigValues base_values;
  std::vector<SweepAxis> axes;

  /// Product of the axis lengths (1 with no axes).
  std::size_t num_cells() const;
  /// Axis values of cell `index`; the last axis varies fastest.
  std::vector<std::pair<std::string, std::string>> cell_params(std::size_t index) const;
  /// Validated config of cell `index`.
  RunConfig cell(std::size_t index) const;
};

using ParsedConfig = std::variant<RunConfig, SweepSpec>;

/// The set of recognised "section.key" paths.
const std::vector<std::string>& config_keys();

/// Builds and validates a RunConfig from flat values. Unknown keys and malformed
/// values throw Parse; constraint failures throw Validation.
RunConfig build_run_config(const ConfigValues& values);

/// RunConfig when the text has no [sweep] section, SweepSpec otherwise.
ParsedConfig parse_config(std::string_view text, const std::string& source = "<config>");
/// As parse_config; a relative run.init_file is resolved against the file's directory.
ParsedConfig load_config(const std::filesystem::path& path);

/// Promotes a plain RunConfig to a one-cell sweep.
SweepSpec as_sweep(const ParsedConfig& parsed);

}  // namespace ucdyn
