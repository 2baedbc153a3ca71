#include "aglab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "aglab/errors.hpp"

namespace aglab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x)) throw ConfigError("not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("not an integer: '" + v + "'");
  return x;
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string fmt(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

struct Key {
  std::string section, name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Key number(std::string sec, std::string name, T ExperimentConfig::*field) {
  return {sec, name,
          [field](ExperimentConfig& c, const std::string& v) {
            if constexpr (std::is_floating_point_v<T>) {
              c.*field = to_double(v);
            } else {
              const long long x = to_int(v);
              if (x < 0) throw ConfigError("negative value: '" + v + "'");
              c.*field = static_cast<T>(x);
            }
          },
          [field](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return fmt(c.*field);
            else return std::to_string(c.*field);
          }};
}

template <class T>
Key domain_number(std::string name, T DomainSpec::*field) {
  return {"domain", name, [field](ExperimentConfig& c, const std::string& v) { c.domain.*field = to_double(v); },
          [field](const ExperimentConfig& c) { return fmt(c.domain.*field); }};
}

Key text(std::string sec, std::string name, std::string ExperimentConfig::*field) {
  return {sec, name, [field](ExperimentConfig& c, const std::string& v) { c.*field = v; },
          [field](const ExperimentConfig& c) { return c.*field; }};
}

Key list(std::string sec, std::string name, std::vector<double> ExperimentConfig::*field) {
  return {sec, name, [field](ExperimentConfig& c, const std::string& v) { c.*field = to_list(v); },
          [field](const ExperimentConfig& c) { return fmt(c.*field); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> k{
      {"domain", "kind", [](ExperimentConfig& c, const std::string& v) { c.domain.kind = v; },
       [](const ExperimentConfig& c) { return c.domain.kind; }},
      domain_number("a", &DomainSpec::a),
      domain_number("b", &DomainSpec::b),
      domain_number("L", &DomainSpec::L),
      domain_number("R", &DomainSpec::R),
      domain_number("delta", &DomainSpec::delta),
      number("grid", "resolution", &ExperimentConfig::resolution),
      list("minimize", "eps_list", &ExperimentConfig::eps_list),
      number("minimize", "max_iter", &ExperimentConfig::max_iter),
      number("minimize", "tol", &ExperimentConfig::tol),
      number("minimize", "eta0", &ExperimentConfig::eta0),
      number("minimize", "eta_min", &ExperimentConfig::eta_min),
      text("minimize", "optimizer", &ExperimentConfig::optimizer),
      number("minimize", "hessian_power", &ExperimentConfig::hessian_power),
      text("minimize", "warm_start", &ExperimentConfig::warm_start),
      list("diagnostics", "entropy_frames", &ExperimentConfig::entropy_frames),
      list("diagnostics", "kinetic_betas", &ExperimentConfig::kinetic_betas),
      number("diagnostics", "ensemble_size", &ExperimentConfig::ensemble_size),
      number("diagnostics", "ensemble_T", &ExperimentConfig::ensemble_T),
      number("diagnostics", "ensemble_dt", &ExperimentConfig::ensemble_dt),
      number("diagnostics", "curve_dump", &ExperimentConfig::curve_dump),
      text("output", "directory", &ExperimentConfig::output),
      number("output", "seed", &ExperimentConfig::seed),
  };
  return k;
}

void validate(const ExperimentConfig& c, const std::map<std::string, int>& lines) {
  auto fail = [&](const std::string& key, const std::string& what) {
    const auto it = lines.find(key);
    throw ConfigError(key + ": " + what, it == lines.end() ? 0 : it->second);
  };
  if (c.domain.kind != "ellipse" && c.domain.kind != "stadium") fail("domain.kind", "expected ellipse or stadium");
  if (c.domain.kind == "ellipse") {
    if (!(c.domain.b > 0.0)) fail("domain.b", "must be positive");
    if (!(c.domain.a >= c.domain.b)) fail("domain.a", "must be >= b");
  } else {
    if (!(c.domain.R > 0.0)) fail("domain.R", "must be positive");
    if (!(c.domain.L >= 0.0)) fail("domain.L", "must be non-negative");
  }
  if (c.resolution < 8) fail("grid.resolution", "must be at least 8");
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
    if (!(c.eps_list[i] > 0.0)) fail("minimize.eps_list", "entries must be positive");
    if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1])) fail("minimize.eps_list", "must be strictly decreasing");
  }
  if (c.max_iter < 1) fail("minimize.max_iter", "must be positive");
  if (!(c.tol > 0.0)) fail("minimize.tol", "must be positive");
  if (!(c.eta0 > 0.0)) fail("minimize.eta0", "must be positive");
  if (c.optimizer != "bb" && c.optimizer != "lbfgs") fail("minimize.optimizer", "expected bb or lbfgs");
  if (c.hessian_power != 1 && c.hessian_power != 2) fail("minimize.hessian_power", "expected 1 or 2");
  for (double b : c.kinetic_betas) {
    if (!(b > 0.0 && b <= 0.5 * kPi)) fail("diagnostics.kinetic_betas", "entries must lie in (0, pi/2]");
  }
  if (c.ensemble_size < 1000) fail("diagnostics.ensemble_size", "must be at least 1000");
  if (!(c.ensemble_T > 0.0)) fail("diagnostics.ensemble_T", "must be positive");
  if (!(c.ensemble_dt > 0.0 && c.ensemble_dt <= c.ensemble_T)) fail("diagnostics.ensemble_dt", "must lie in (0, T]");
  if (c.output.empty()) fail("output.directory", "must not be empty");
}

}  // namespace

Domain DomainSpec::build() const {
  return kind == "stadium" ? Domain::stadium(L, R, delta) : Domain::ellipse(a, b, delta);
}

MinimizeOptions ExperimentConfig::minimize_options() const {
  MinimizeOptions o;
  o.max_iter = max_iter;
  o.tol = tol;
  o.eta0 = eta0;
  o.eta_min = eta_min;
  o.hessian_power = hessian_power;
  o.optimizer = optimizer == "lbfgs" ? Optimizer::LBFGS : Optimizer::BB;
  return o;
}

std::filesystem::path ExperimentConfig::resolve(const std::string& p) const {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

std::filesystem::path ExperimentConfig::output_dir() const { return resolve(output); }

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto cut = raw.find_first_of("#;");
    const std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header", line);
      section = trim(s.substr(1, s.size() - 2));
      const bool known = std::any_of(keys().begin(), keys().end(), [&](const Key& k) { return k.section == section; });
      if (!known) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string name = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (section.empty()) throw ConfigError("key '" + name + "' outside a section", line);
    const auto it = std::find_if(keys().begin(), keys().end(),
                                 [&](const Key& k) { return k.section == section && k.name == name; });
    if (it == keys().end()) throw ConfigError("unknown key '" + name + "' in [" + section + "]", line);
    const std::string full = section + "." + name;
    if (seen.count(full)) throw ConfigError("duplicate key '" + name + "'", line);
    seen[full] = line;
    try {
      it->set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(full + ": " + e.what(), line);
    }
  }
  validate(cfg, seen);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse_config(ss.str());
  cfg.base_dir = std::filesystem::absolute(path).parent_path();
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out, section;
  for (const Key& k : keys()) {
    if (k.section != section) {
      out += (section.empty() ? "[" : "\n[") + k.section + "]\n";
      section = k.section;
    }
    out += k.name + " = " + k.get(cfg) + "\n";
  }
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace aglab
