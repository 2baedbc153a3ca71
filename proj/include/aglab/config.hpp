#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aglab/domain.hpp"
#include "aglab/minimize.hpp"

namespace aglab {

struct DomainSpec {
  std::string kind = "ellipse";  // ellipse | stadium
  double a = 1.0, b = 0.5;       // ellipse semi-axes
  double L = 2.0, R = 1.0;       // stadium segment length and radius
  double delta = -1.0;           // <= 0: domain default

  Domain build() const;
};

struct ExperimentConfig {
  DomainSpec domain;
  int resolution = 128;  // cells across the longer side of the Omega_delta box

  std::vector<double> eps_list{0.4, 0.2, 0.1};
  int max_iter = 20000;
  double tol = 1e-6;
  double eta0 = 1.0;
  double eta_min = -1.0;
  std::string optimizer = "bb";  // bb | lbfgs
  int hessian_power = 1;
  std::string warm_start;  // field dump, relative to the config file

  std::vector<double> entropy_frames{0.0, 0.25 * kPi};
  std::vector<double> kinetic_betas{kPi / 8, kPi / 4, kPi / 3, 3 * kPi / 8, kPi / 2};
  std::size_t ensemble_size = 100000;
  double ensemble_T = 0.5;
  double ensemble_dt = 1.0 / 256;
  std::size_t curve_dump = 20;

  std::string output = "out";  // relative to the config file
  std::uint64_t seed = 1;

  /// Directory holding the config file; relative paths resolve against it.
  std::filesystem::path base_dir;

  MinimizeOptions minimize_options() const;
  std::filesystem::path output_dir() const;
  std::filesystem::path resolve(const std::string& p) const;
};

/// Sections [domain] [grid] [minimize] [diagnostics] [output] with "key = value" lines;
/// '#' and ';' start comments. Unknown sections or keys, duplicates and malformed values throw
/// ConfigError carrying the line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text: every key in fixed order, numbers in shortest round-trip form.
std::string serialize_config(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of the canonical text.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hash_hex(std::uint64_t h);

}  // namespace aglab
