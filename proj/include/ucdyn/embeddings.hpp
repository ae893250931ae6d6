#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ucdyn/dynamics.hpp"

namespace ucdyn {

// Embedding / state file format (plain text):
//
//   m n d
//   <m user rows, d whitespace-separated decimals each>
//   <n creator rows>
//
// Blank lines and lines starting with '#' are ignored. Rows are projected onto the sphere.

struct Embeddings {
  std::vector<UnitVector> users;
  std::vector<UnitVector> creators;
};

Embeddings parse_embeddings(std::istream& in, const std::string& source = "<stream>");
Embeddings load_embeddings(const std::filesystem::path& path);

/// Writes users and creators in the format above with round-trip precision.
void write_state(std::ostream& out, const SystemState& state);
void save_state(const std::filesystem::path& path, const SystemState& state);

}  // namespace ucdyn
