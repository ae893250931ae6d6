#include "ucdyn/embeddings.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ucdyn/format.hpp"

namespace ucdyn {

namespace {

bool is_content(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos != std::string::npos && line[pos] != '#';
}

std::vector<double> parse_numbers(const std::string& line, const std::string& where) {
  std::vector<double> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw Error(ErrorKind::FileFormat, where + ": '" + tok + "' is not a number");
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace

Embeddings parse_embeddings(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (is_content(line)) return true;
    }
    return false;
  };
  auto where = [&] { return source + ":" + std::to_string(lineno); };

  if (!next_line()) throw Error(ErrorKind::FileFormat, source + ": missing 'm n d' header");
  const auto header = parse_numbers(line, where());
  if (header.size() != 3) throw Error(ErrorKind::FileFormat, where() + ": header must be 'm n d'");
  for (double h : header) {
    if (h < 1 || h != static_cast<double>(static_cast<long long>(h))) {
      throw Error(ErrorKind::FileFormat, where() + ": header values must be positive integers");
    }
  }
  const auto m = static_cast<std::size_t>(header[0]);
  const auto n = static_cast<std::size_t>(header[1]);
  const auto d = static_cast<std::size_t>(header[2]);

  Embeddings out;
  out.users.reserve(m);
  out.creators.reserve(n);
  for (std::size_t r = 0; r < m + n; ++r) {
    if (!next_line()) {
      throw Error(ErrorKind::CountMismatch, source + ": header promises " +
                                                std::to_string(m + n) + " rows, found " +
                                                std::to_string(r));
    }
    const auto row = parse_numbers(line, where());
    if (row.size() != d) {
      throw Error(ErrorKind::FileFormat, where() + ": expected " + std::to_string(d) +
                                             " values, found " + std::to_string(row.size()));
    }
    try {
      (r < m ? out.users : out.creators).push_back(project(row));
    } catch (const Error& e) {
      throw e.with_context(where());
    }
  }
  if (next_line()) {
    throw Error(ErrorKind::CountMismatch,
                where() + ": more rows than the header's " + std::to_string(m + n));
  }
  return out;
}

Embeddings load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return parse_embeddings(in, path.string());
}

void write_state(std::ostream& out, const SystemState& state) {
  out << state.num_users() << ' ' << state.num_creators() << ' ' << state.dim() << '\n';
  auto write_rows = [&](const std::vector<UnitVector>& vs) {
    for (const auto& v : vs) {
      for (std::size_t k = 0; k < v.dim(); ++k) {
        if (k) out << ' ';
        out << format_double(v[k]);
      }
      out << '\n';
    }
  };
  write_rows(state.users);
  write_rows(state.creators);
}

void save_state(const std::filesystem::path& path, const SystemState& state) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_state(out, state);
}

}  // namespace ucdyn
