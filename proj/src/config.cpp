#include "ucdyn/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ucdyn/error.hpp"

namespace ucdyn {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

Error parse_error(const std::string& key, const std::string& text, const char* want) {
  return Error(ErrorKind::Parse, key + ": '" + text + "' is not " + want);
}

std::size_t to_size(const std::string& key, const std::string& text) {
  std::size_t x = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw parse_error(key, text, "a nonnegative integer");
  }
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw parse_error(key, text, "a 64-bit unsigned integer");
  }
  return x;
}

double to_double(const std::string& key, const std::string& text) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw parse_error(key, text, "a number");
  }
  return x;
}

std::vector<std::string> split_list(const std::string& key, std::string text) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']') {
    text = text.substr(1, text.size() - 2);
  }
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) throw Error(ErrorKind::Parse, "sweep." + key + ": empty list item");
    out.push_back(item);
  }
  if (out.empty()) throw Error(ErrorKind::Parse, "sweep." + key + ": empty value list");
  return out;
}

ConfigValues with_overrides(ConfigValues values,
                            const std::vector<std::pair<std::string, std::string>>& params) {
  for (const auto& [k, v] : params) values[k] = v;
  return values;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "system.d",        "system.n",         "system.m",         "rates.eta_u",
      "rates.eta_c",     "rates.fixed_dims", "impact.f",         "impact.a",
      "impact.b",        "impact.g",         "policy.kind",      "policy.beta",
      "policy.k",        "policy.tau",       "policy.rho",       "policy.list_len",
      "policy.eps",      "run.horizon",      "run.reps",         "run.seed",
      "run.init_file",   "run.record_every", "run.snapshot_every", "run.stop_tp_at_least",
  };
  return keys;
}

RunConfig build_run_config(const ConfigValues& values) {
  const auto& known = config_keys();
  for (const auto& [k, v] : values) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw Error(ErrorKind::Parse, "unknown key '" + k + "'");
    }
  }
  auto get = [&](const std::string& k) -> const std::string* {
    const auto it = values.find(k);
    return it == values.end() ? nullptr : &it->second;
  };
  auto size_or = [&](const std::string& k, std::size_t dflt) {
    const auto* v = get(k);
    return v ? to_size(k, *v) : dflt;
  };
  auto double_or = [&](const std::string& k, double dflt) {
    const auto* v = get(k);
    return v ? to_double(k, *v) : dflt;
  };

  RunConfig c;
  c.d = size_or("system.d", c.d);
  c.n = size_or("system.n", c.n);
  c.m = size_or("system.m", c.m);

  c.rates.eta_u = double_or("rates.eta_u", c.rates.eta_u);
  c.rates.eta_c = double_or("rates.eta_c", c.rates.eta_c);
  c.rates.fixed_dims = size_or("rates.fixed_dims", c.rates.fixed_dims);

  const std::string f = get("impact.f") ? *get("impact.f") : "inner_product";
  if (f == "inner_product") {
    if (get("impact.a") || get("impact.b")) {
      throw Error(ErrorKind::Validation, "impact.a/impact.b do not apply to f = inner_product");
    }
    c.f = UserImpactSpec::inner_product();
  } else if (f == "sign_affine") {
    c.f = UserImpactSpec::sign_affine(double_or("impact.a", 0.5), double_or("impact.b", 0.5));
  } else if (f == "sign_only") {
    if (get("impact.b")) throw Error(ErrorKind::Validation, "impact.b does not apply to sign_only");
    c.f = UserImpactSpec::sign_only(double_or("impact.a", 1.0));
  } else {
    throw Error(ErrorKind::Parse, "impact.f: unknown impact function '" + f + "'");
  }
  if (const auto* g = get("impact.g"); g && *g != "sign") {
    throw Error(ErrorKind::Parse, "impact.g: unknown impact function '" + *g + "'");
  }
  c.g = CreatorImpactSpec::sign();

  const std::string kind = get("policy.kind") ? *get("policy.kind") : "softmax";
  std::vector<std::string> allowed = {"policy.kind", "policy.beta"};
  const double beta = double_or("policy.beta", 1.0);
  if (kind == "softmax") {
    c.policy = SoftmaxPolicy{beta};
  } else if (kind == "topk") {
    c.policy = TopKPolicy{size_or("policy.k", c.n), beta};
    allowed.push_back("policy.k");
  } else if (kind == "truncation") {
    c.policy = TruncationPolicy{double_or("policy.tau", 0.0), beta};
    allowed.push_back("policy.tau");
  } else if (kind == "diversity") {
    c.policy = DiversityPolicy{double_or("policy.rho", 0.0), beta, size_or("policy.list_len", 10)};
    allowed.push_back("policy.rho");
    allowed.push_back("policy.list_len");
  } else if (kind == "uniform_mix") {
    c.policy = UniformMixPolicy{double_or("policy.eps", 0.0), beta};
    allowed.push_back("policy.eps");
  } else {
    throw Error(ErrorKind::Parse, "policy.kind: unknown policy '" + kind + "'");
  }
  for (const auto& [k, v] : values) {
    if (k.starts_with("policy.") && std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw Error(ErrorKind::Validation, k + " does not apply to policy " + kind);
    }
  }

  c.horizon = size_or("run.horizon", c.horizon);
  c.reps = size_or("run.reps", c.reps);
  if (const auto* s = get("run.seed")) c.master_seed = to_u64("run.seed", *s);
  if (const auto* p = get("run.init_file")) c.init_file = *p;
  c.record_every = size_or("run.record_every", c.record_every);
  c.snapshot_every = size_or("run.snapshot_every", c.snapshot_every);
  if (get("run.stop_tp_at_least")) c.stop_tp_at_least = double_or("run.stop_tp_at_least", 1.0);

  c.validate();
  return c;
}

std::size_t SweepSpec::num_cells() const {
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.values.size();
  return total;
}

std::vector<std::pair<std::string, std::string>> SweepSpec::cell_params(std::size_t index) const {
  if (index >= num_cells()) throw Error(ErrorKind::Validation, "sweep cell index out of range");
  std::vector<std::pair<std::string, std::string>> out(axes.size());
  for (std::size_t a = axes.size(); a-- > 0;) {
    const auto& vals = axes[a].values;
    out[a] = {axes[a].path, vals[index % vals.size()]};
    index /= vals.size();
  }
  return out;
}

RunConfig SweepSpec::cell(std::size_t index) const {
  if (axes.empty()) {
    if (index != 0) throw Error(ErrorKind::Validation, "sweep cell index out of range");
    return base;
  }
  const auto params = cell_params(index);
  std::string where = "sweep cell " + std::to_string(index) + " (";
  for (std::size_t i = 0; i < params.size(); ++i) {
    where += (i ? ", " : "") + params[i].first + "=" + params[i].second;
  }
  where += ")";
  try {
    return build_run_config(with_overrides(base_values, params));
  } catch (const Error& e) {
    throw e.with_context(where);
  }
}

ParsedConfig parse_config(std::string_view text, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::Parse, source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  ConfigValues values;
  std::vector<SweepAxis> axes;
  bool has_sweep = false;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw Error(ErrorKind::Parse, source + ": key '" + section + "' is outside any section");
    }
    if (section == "sweep") {
      has_sweep = true;
      for (const auto& [key, node] : body) {
        const auto& known = config_keys();
        if (std::find(known.begin(), known.end(), key) == known.end()) {
          throw Error(ErrorKind::Parse, source + ": sweep axis '" + key + "' is not a known key");
        }
        axes.push_back({key, split_list(key, node.data())});
      }
      continue;
    }
    for (const auto& [key, node] : body) {
      values[section + "." + key] = trim(node.data());
    }
  }

  try {
    RunConfig base = build_run_config(values);
    if (!has_sweep) return base;
    SweepSpec spec{std::move(base), std::move(values), std::move(axes)};
    // Fail fast on any unusable cell.
    for (std::size_t i = 0; i < spec.num_cells(); ++i) (void)spec.cell(i);
    return spec;
  } catch (const Error& e) {
    throw e.with_context(source);
  }
}

ParsedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  ParsedConfig parsed = parse_config(buf.str(), path.string());
  // A relative init_file is taken relative to the config file.
  auto resolve = [&](std::string& file) {
    if (!file.empty() && std::filesystem::path(file).is_relative()) {
      file = (path.parent_path() / file).string();
    }
  };
  if (auto* c = std::get_if<RunConfig>(&parsed)) {
    resolve(c->init_file);
  } else {
    auto& spec = std::get<SweepSpec>(parsed);
    resolve(spec.base.init_file);
    if (auto it = spec.base_values.find("run.init_file"); it != spec.base_values.end()) {
      resolve(it->second);
    }
  }
  return parsed;
}

SweepSpec as_sweep(const ParsedConfig& parsed) {
  if (const auto* s = std::get_if<SweepSpec>(&parsed)) return *s;
  return SweepSpec{std::get<RunConfig>(parsed), {}, {}};
}

}  // namespace ucdyn
