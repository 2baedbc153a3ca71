#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "aglab/circle_measure.hpp"
#include "aglab/domain.hpp"
#include "aglab/entropy.hpp"
#include "aglab/grid.hpp"

namespace aglab {

/// chi(x, s) = 1 if e^{is} . m(x) > 0, on the angle grid s_j = 2 pi j / n_s.
struct KineticSample {
  GridPtr grid;
  int n_s = 0;
  std::vector<std::uint8_t> bits;  // node-major

  double angle(int j) const { return kTwoPi * j / n_s; }
  bool chi(std::size_t k, int j) const { return bits[k * n_s + j] != 0; }
  /// Lebesgue measure of {s : chi(x_k, s) = 1} on the sample grid.
  double measure(std::size_t k) const;
};

/// n_s must be even and positive. Ties |e^{is} . m| <= 1e-14 give 0.
KineticSample chi_sample(const VectorField& m, int n_s);

/// (sin s - cos beta) 1_{[pi/2 - beta, pi/2 + beta]}(s) - (2/pi)(sin beta - beta cos beta) for s in [0, pi],
/// extended pi-periodically. beta in [0, pi], else BetaOutOfRange.
double g_beta(double beta, double s);

/// Normalized minimal density of a jump with half angle beta in (0, pi), as a density measure.
CircleMeasure gbar_beta(double beta);
/// Normalization constant of gbar_beta, from the exact total variation of the unnormalized density.
double c_beta(double beta);

struct JumpIdentity {
  double lhs = 0.0;  // e1 . (Phi(e^{i beta}) - Phi(e^{-i beta}))
  double rhs = 0.0;  // -int g_beta psi'
};

/// beta in [0, pi/2]; the generator must be pi-periodic.
JumpIdentity jump_identity_check(double beta, const EntropyGenerator& gen);

struct Jump {
  double beta = 0.0;
  double s_bar = 0.0;
};

struct NonJump {
  double s_bar = 0.0;
  int sign = 1;
};

using PointKind = std::variant<Jump, NonJump>;

/// Jump: gbar_beta(s - s_bar). NonJump: sign (1/2)(delta_{s_bar - pi/2} + delta_{s_bar + pi/2}).
CircleMeasure minimal_disintegration(const PointKind& kind);
/// sign (1/4)(delta_{s_bar} + delta_{s_bar + pi} - (1/pi) L^1)
CircleMeasure factorization_variant(double s_bar, int sign);

/// {0, +-0.01, +-0.1, +-1} together with a uniform grid of step 1e-3 on [-0.25, 0.25].
std::vector<double> default_alpha_grid();

/// TV(mu + alpha L^1) >= TV(mu) - 1e-10 for every alpha. mu must have unit total variation.
bool minimality_check(const CircleMeasure& mu, const std::vector<double>& alphas = default_alpha_grid());

/// Angular measure carried by one grid node; sigma already includes the ridge length weight.
struct KineticNode {
  std::size_t node = 0;
  Vec2 normal{0.0, 1.0};
  double beta = 0.0;
  double s_bar = 0.0;
  double length = 0.0;  // ridge length inside the dual cell
  double scale = 0.0;   // per unit length, sigma = scale * length * gbar_beta(. - s_bar)
  CircleMeasure sigma;
};

struct KineticField {
  GridPtr grid;
  std::vector<KineticNode> nodes;
};

/// Minimal disintegration along the ridge of the limit field. With calibrate=true the per-point
/// scale is solved from the Sigma_{e1,e2} bracket; otherwise orientation / c(beta) is used.
KineticField ridge_disintegration(const Domain& domain, GridPtr grid, bool calibrate = true);

struct Bump {
  Vec2 center;
  double radius = 0.0;
  /// (1 - r^2/radius^2)^4 inside the disk.
  double operator()(Vec2 x) const;
};

struct TestBank {
  std::vector<Bump> bumps;
  std::vector<EntropyGenerator> generators;
};

/// Bumps of radius 0.4 * minor_scale on a lattice of spacing radius/2, kept when the support lies in Omega;
/// generators cos 2s, sin 2s, cos 4s, sin 4s.
TestBank default_test_bank(const Domain& domain);

/// max over the bank of |int Phi(m) . grad zeta - int zeta psi' dsigma|.
double kinetic_residual(const VectorField& m, const KineticField& sigma, const TestBank& bank);

/// Minimum of the distributional derivative of mu over the arcs (0, pi/2) and (pi, 3pi/2) shifted by `shift`.
/// Downward density jumps and atoms inside the arcs count as negative.
double sign_margin(const CircleMeasure& mu, double shift = 0.0);

struct SignStructureReport {
  std::size_t nodes = 0;
  std::vector<double> margins;  // per node, sigma rescaled to unit |scale * length|
  double min_margin = 0.0;
  std::size_t negative = 0;     // margins below -1e-12
  double axis_fraction = 0.0;   // normals within angle_tol of (+-1, 0) or (0, +-1)
};

SignStructureReport sign_structure_report(const KineticField& sigma, double angle_tol = 1e-9);

}  // namespace aglab
