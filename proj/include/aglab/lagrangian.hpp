#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aglab/domain.hpp"
#include "aglab/vec2.hpp"

namespace aglab {

/// Angular jump of a characteristic, stored in forward time.
struct AngleJump {
  double t = 0.0;
  Vec2 x;
  double s_minus = 0.0;
  double s_plus = 0.0;
  int arc_sign = 1;  // +1: counterclockwise arc from s_minus to s_plus of length <= pi

  double arc_length() const;
};

/// Characteristic of the limit field: unit-speed straight pieces with piecewise-constant angle.
struct Characteristic {
  double t_minus = 0.0;
  double t_plus = 0.0;
  std::vector<std::pair<double, Vec2>> x_path;  // vertices at the start, every jump and the end
  double s_start = 0.0;
  std::vector<AngleJump> jumps;
  bool stuck = false;

  /// Right-continuous angle.
  double s_at(double t) const;
  Vec2 x_at(double t) const;
  double total_variation() const;
};

/// Omega' = {x : dist(x, dOmega_delta) > inset}.
struct TraceSettings {
  double T = 0.5;
  double dt = 1.0 / 256;
  double inset = -1.0;  // <= 0 selects 2 dt
};

/// Traces gamma_x' = e^{i gamma_s} from (x, s) at time t0, forwards (direction +1) over [t0, T] or
/// backwards (direction -1) over [0, t0], stopping at the boundary of Omega'. At the ridge the curve
/// keeps its angle when chi = 1 on the far side and is mirrored s -> -s otherwise.
/// Requires chi(x, s) = 1 for the limit field; a curve that would leave {chi = 1} is flagged stuck.
Characteristic trace_characteristic(const Domain& domain, Vec2 x, double s, const TraceSettings& settings,
                                    double t0 = 0.0, int direction = 1);

struct WeightedArc {
  double t = 0.0;
  Vec2 x;
  double s_from = 0.0;
  double s_to = 0.0;  // s_from + sign * mass
  int sign = 1;
  double mass = 0.0;
};

/// Signed angular arcs at the jump times; their masses sum to the total variation of gamma_s.
std::vector<WeightedArc> sigma_gamma(const Characteristic& c);

struct Ensemble {
  std::vector<Characteristic> curves;
  double weight = 0.0;  // common weight of every curve
  std::uint64_t seed = 0;
  std::size_t n_phase = 0, n_inflow = 0, n_outflow = 0;
};

/// Stationary ensemble on [0, T]: N uniform samples of {chi = 1} over Omega' at T/2 traced both ways,
/// plus the curves entering Omega' during (T/2, T) and those leaving it during (0, T/2).
Ensemble build_ensemble(const Domain& domain, std::size_t n, const TraceSettings& settings, std::uint64_t seed);

struct EnsembleReport {
  std::size_t curves = 0;
  std::size_t stuck = 0;
  std::size_t jumps = 0;
  std::vector<double> probe_times;
  std::vector<double> chi2;  // per probe time
  int dof = 0;
  double chi2_max_z = 0.0;   // max over probes of |chi2 - dof| / sqrt(2 dof)
  double chi2_min_p = 1.0;
  std::size_t chi_violations = 0;  // probe evaluations with chi = 0
  double ridge_fraction = 0.0;     // share of |sigma-hat| within 2 dt of the ridge
  double cancellation_ratio = 0.0;
  double ks_statistic = 0.0;
  double ks_p = 0.0;
  std::size_t ks_n1 = 0, ks_n2 = 0;
  double max_jump_offset = 0.0;  // max |x2| at recorded jumps
  double max_arc = 0.0;
  double minimal_ratio = 0.0;    // |sigma-hat| / (T |sigma_min|(Omega'))

  std::string to_json() const;
};

EnsembleReport ensemble_representation_check(const Domain& domain, std::size_t n, const TraceSettings& settings,
                                             std::uint64_t seed);
EnsembleReport analyze_ensemble(const Domain& domain, const Ensemble& ens, const TraceSettings& settings);

/// Asymptotic two-sample Kolmogorov-Smirnov test: statistic and p-value.
std::pair<double, double> ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One CSV per curve index below max_curves: "t,x1,x2,s" at every vertex, plus jumps.csv.
/// A non-empty comment is written first as a '#' line in every file.
void write_ensemble_csv(const std::string& dir, const Ensemble& ens, std::size_t max_curves,
                        const std::string& comment = "");

}  // namespace aglab
